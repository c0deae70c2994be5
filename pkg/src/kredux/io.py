"""File formats: field dumps, artifact directories, atomic writes.

Field dump (CSV, decimal text at 17 significant digits):

    # kredux-field v1, kind=torus, N=32, Nl=129, lmin=-1.2, lmax=1.2, lu=8, margin=4
    i,j,k,x1,x2,l,value

Radial grids use rows ``i,k,v,l,value``; base fields set ``Nl=0`` and drop
the fiber columns.  Writes are atomic (write to a temporary file, then
rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from .fields import Form11M, ScalarFieldM, ScalarFieldP
from .grids import TORUS, TestbedGrid
from .structure import KahlerData, assemble
from .flows import FlowPath


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, obj):
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# field dumps
# ---------------------------------------------------------------------------


def _header(grid: TestbedGrid, on_base: bool):
    nl = 0 if on_base else grid.n_l
    return (f"# kredux-field v1, kind={grid.kind}, N={grid.n_spatial}, "
            f"Nl={nl}, lmin={grid.l_min:.17g}, lmax={grid.l_max:.17g}, "
            f"lu={grid.l_u:.17g}, margin={grid.margin}")


def dump_field(field, path):
    """Write a scalar field or base (1,1)-form component to CSV."""
    if isinstance(field, Form11M):
        grid, values, on_base = field.grid, field.h, True
    elif isinstance(field, ScalarFieldM):
        grid, values, on_base = field.grid, field.values, True
    elif isinstance(field, ScalarFieldP):
        grid, values, on_base = field.grid, field.values, False
    else:
        raise TypeError(f"cannot dump {type(field).__name__}")
    lines = [_header(grid, on_base)]
    if grid.kind == TORUS:
        n = grid.n_spatial
        if on_base:
            for i in range(n):
                x1 = grid.x1[i]
                for j in range(n):
                    lines.append(f"{i},{j},{x1:.17g},{grid.x2[j]:.17g},"
                                 f"{values[i, j]:.17g}")
        else:
            for i in range(n):
                x1 = grid.x1[i]
                for j in range(n):
                    x2 = grid.x2[j]
                    for k in range(grid.n_l):
                        lines.append(f"{i},{j},{k},{x1:.17g},{x2:.17g},"
                                     f"{grid.l[k]:.17g},{values[i, j, k]:.17g}")
    else:
        if on_base:
            for i in range(grid.n_spatial):
                lines.append(f"{i},{grid.v[i]:.17g},{values[i]:.17g}")
        else:
            for i in range(grid.n_spatial):
                v = grid.v[i]
                for k in range(grid.n_l):
                    lines.append(f"{i},{k},{v:.17g},{grid.l[k]:.17g},"
                                 f"{values[i, k]:.17g}")
    atomic_write(path, "\n".join(lines) + "\n")


def _parse_header(line):
    if not line.startswith("# kredux-field v1"):
        raise ValueError("not a kredux field dump")
    meta = {}
    for part in line.split(",")[1:]:
        key, _, val = part.strip().partition("=")
        meta[key] = val
    return meta


def load_field(path):
    """Load a dumped field; returns (grid, values, on_base)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = _parse_header(fh.readline().strip())
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    kind = header["kind"]
    n = int(header["N"])
    nl = int(header["Nl"])
    on_base = nl == 0
    grid_nl = nl if nl else 9  # base dumps carry no fiber resolution
    grid = TestbedGrid(kind, n, max(grid_nl, 9), float(header["lmin"]),
                       float(header["lmax"]), l_u=float(header["lu"]),
                       margin=int(header["margin"]))
    vals = body[:, -1]
    if kind == TORUS:
        shape = (n, n) if on_base else (n, n, nl)
    else:
        shape = (n,) if on_base else (n, nl)
    return grid, vals.reshape(shape), on_base


# ---------------------------------------------------------------------------
# artifact directories
# ---------------------------------------------------------------------------


def save_kahler(K: KahlerData, outdir, extra_meta=None):
    os.makedirs(outdir, exist_ok=True)
    dump_field(K.sigma, os.path.join(outdir, "sigma.csv"))
    dump_field(K.phi, os.path.join(outdir, "phi.csv"))
    meta = {"c": K.c, "grid": K.grid.meta(),
            "positivity_min_eig": K.certificate.min_eigenvalue}
    if extra_meta:
        meta.update(extra_meta)
    write_json(os.path.join(outdir, "meta.json"), meta)
    return outdir


def load_kahler(outdir, require_positive=True) -> KahlerData:
    with open(os.path.join(outdir, "meta.json"), "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    g = meta["grid"]
    grid = TestbedGrid(g["kind"], g["n_spatial"], g["n_l"], g["l_min"],
                       g["l_max"], l_u=g["l_u"], margin=g["margin"])
    _, sig_vals, _ = load_field(os.path.join(outdir, "sigma.csv"))
    _, phi_vals, _ = load_field(os.path.join(outdir, "phi.csv"))
    return assemble(Form11M(grid, sig_vals), ScalarFieldP(grid, phi_vals),
                    float(meta["c"]), require_positive=require_positive)


def save_reduction(red, outdir, extra_meta=None):
    os.makedirs(outdir, exist_ok=True)
    dump_field(red.l_tau, os.path.join(outdir, "ltau.csv"))
    dump_field(red.psi_tau, os.path.join(outdir, "psitau.csv"))
    dump_field(red.omega_tau, os.path.join(outdir, "omegatau.csv"))
    meta = {"tau": red.tau, "max_root_residual": red.max_root_residual,
            "min_eigenvalue": red.min_eigenvalue}
    if extra_meta:
        meta.update(extra_meta)
    write_json(os.path.join(outdir, "meta.json"), meta)
    return outdir


def save_path(path_obj: FlowPath, outdir, extra_meta=None):
    os.makedirs(outdir, exist_ok=True)
    grid = path_obj.grid
    dump_field(path_obj.sigma, os.path.join(outdir, "sigma.csv"))
    lines = [f"# kredux-path v1, kind={path_obj.kind}, sigma=sigma.csv, "
             f"N={grid.n_spatial}"]
    for k, t in enumerate(path_obj.ts):
        psi = path_obj.psis[k]
        if grid.kind == TORUS:
            for i in range(grid.n_spatial):
                for j in range(grid.n_spatial):
                    lines.append(f"{k},{t:.17g},{i},{j},{psi[i, j]:.17g}")
        else:
            for i in range(grid.n_spatial):
                lines.append(f"{k},{t:.17g},{i},{psi[i]:.17g}")
    atomic_write(os.path.join(outdir, "path.csv"), "\n".join(lines) + "\n")
    meta = {"kind": path_obj.kind, "grid": grid.meta(),
            "normalization": path_obj.normalization,
            "dt_history": list(path_obj.dt_history),
            "ts": [float(t) for t in path_obj.ts]}
    if extra_meta:
        meta.update(extra_meta)
    write_json(os.path.join(outdir, "path_meta.json"), meta)
    return outdir


def load_path(outdir) -> FlowPath:
    with open(os.path.join(outdir, "path_meta.json"), "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    g = meta["grid"]
    grid = TestbedGrid(g["kind"], g["n_spatial"], g["n_l"], g["l_min"],
                       g["l_max"], l_u=g["l_u"], margin=g["margin"])
    _, sig_vals, _ = load_field(os.path.join(outdir, "sigma.csv"))
    with open(os.path.join(outdir, "path.csv"), "r", encoding="utf-8") as fh:
        fh.readline()
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    ts = np.array(meta["ts"], dtype=float)
    psis = body[:, -1].reshape((len(ts),) + grid.spatial_shape)
    return FlowPath(grid, Form11M(grid, sig_vals), meta["kind"], ts, psis,
                    meta.get("normalization", {}), meta.get("dt_history", []))


def dir_hashes(outdir):
    out = {}
    for name in sorted(os.listdir(outdir)):
        p = os.path.join(outdir, name)
        if os.path.isfile(p) and not name.endswith("meta.json"):
            out[name] = sha256_of(p)
    return out
