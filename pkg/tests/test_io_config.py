import json
import os

import numpy as np
import pytest

import kredux as kx
from kredux.config import RunConfig, load_config
from kredux.io import (dump_field, load_field, load_kahler, load_path,
                       save_kahler, save_path, save_reduction, sha256_of)


def small_torus():
    return kx.torus_grid(n=12, n_l=17, margin=2)


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(testbed="radial", n=33, n_l=17, l_min=-0.7,
                    l_max=1.31e-1, flow_dt=1.25e-7, seed=3)
    path = tmp_path / "run.cfg"
    path.write_text(cfg.to_text())
    assert load_config(path) == cfg


def test_config_overrides_and_unknown_key():
    cfg = RunConfig()
    cfg2 = cfg.updated({"n": "64", "tau": "0.25"})
    assert cfg2.n == 64 and cfg2.tau == 0.25
    with pytest.raises(ValueError):
        cfg.updated({"resolution": "64"})


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        RunConfig(testbed="plane")
    with pytest.raises(ValueError):
        RunConfig(n=4)
    with pytest.raises(ValueError):
        RunConfig.from_text("n 32\n")


def test_field_dump_roundtrip(tmp_path):
    grid = small_torus()
    rng = np.random.default_rng(0)
    f = kx.fixtures.random_resolved_p(grid, rng)
    p = tmp_path / "f.csv"
    dump_field(f, str(p))
    grid2, vals, on_base = load_field(str(p))
    assert not on_base
    assert grid2 == grid
    assert np.array_equal(vals, f.values)  # 17 significant digits round-trip


def test_field_dump_roundtrip_base_radial(tmp_path):
    grid = kx.radial_grid(n_u=17, n_l=9, margin=2)
    sigma = kx.fs_sigma(grid)
    p = tmp_path / "sigma.csv"
    dump_field(sigma, str(p))
    _, vals, on_base = load_field(str(p))
    assert on_base
    assert np.array_equal(vals, sigma.h)


def test_kahler_directory_roundtrip(tmp_path):
    K = kx.flat_cylinder(small_torus())
    d = tmp_path / "kdir"
    save_kahler(K, str(d))
    with open(d / "meta.json") as fh:
        meta = json.load(fh)
    assert meta["c"] == 0.0
    assert meta["positivity_min_eig"] > 0
    K2 = load_kahler(str(d))
    assert np.array_equal(K2.phi.values, K.phi.values)
    assert np.max(np.abs(K2.mu.values - K.mu.values)) == 0.0


def test_reduction_directory(tmp_path):
    K = kx.flat_cylinder(small_torus())
    red = kx.reduced_potential(K, 0.4)
    d = tmp_path / "red"
    save_reduction(red, str(d))
    with open(d / "meta.json") as fh:
        meta = json.load(fh)
    assert meta["tau"] == 0.4
    assert meta["max_root_residual"] < 1e-12
    for name in ("ltau.csv", "psitau.csv", "omegatau.csv"):
        assert (d / name).exists()


def test_path_directory_roundtrip(tmp_path):
    grid = small_torus()
    sigma = kx.flat_sigma(grid)
    path = kx.kr_integrate(np.zeros(grid.spatial_shape), sigma, 0.01,
                           dt=2e-3, save_count=5)
    d = tmp_path / "pathdir"
    save_path(path, str(d))
    p2 = load_path(str(d))
    assert np.array_equal(p2.ts, path.ts)
    assert np.array_equal(p2.psis, path.psis)
    assert p2.kind == path.kind


def test_deterministic_outputs(tmp_path):
    grid = small_torus()
    rng1 = np.random.default_rng(42)
    rng2 = np.random.default_rng(42)
    f1 = kx.fixtures.random_resolved_p(grid, rng1)
    f2 = kx.fixtures.random_resolved_p(grid, rng2)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    dump_field(f1, str(p1))
    dump_field(f2, str(p2))
    assert sha256_of(str(p1)) == sha256_of(str(p2))
