"""Canonical testbed data used across the verification suites.

* flat_cylinder: flat unit-volume torus metric times the standard cylinder
  fiber, phi = l^2/4, c = 0; moment map mu = -l, |V|^2 = 2.
* fs_cylinder: the round metric on CP^1 (component 1/(1+u)^2 in the radial
  chart, scalar curvature 2) times the same cylinder fiber.
* singular quotient moment map, see :mod:`kredux.golden`.
"""

from __future__ import annotations

import numpy as np

from .fields import Form11M, ScalarFieldM, ScalarFieldP
from .grids import RADIAL, TORUS, TestbedGrid, radial_grid, torus_grid
from .structure import KahlerData, assemble


def flat_sigma(grid: TestbedGrid) -> Form11M:
    if grid.kind != TORUS:
        raise ValueError("the flat reference lives on the torus testbed")
    return Form11M(grid, np.ones(grid.spatial_shape))


def fs_sigma(grid: TestbedGrid) -> Form11M:
    """Round CP^1 metric in the radial chart: H = 1/(1+u)^2."""
    if grid.kind != RADIAL:
        raise ValueError("the round reference lives on the radial testbed")
    return Form11M(grid, 1.0 / (1.0 + grid.u) ** 2)


def reference_sigma(grid: TestbedGrid) -> Form11M:
    return flat_sigma(grid) if grid.kind == TORUS else fs_sigma(grid)


def reference_ricci(grid: TestbedGrid) -> Form11M:
    """Analytic Ricci form of the reference metric (flat: 0, round: 2*sigma)."""
    if grid.kind == TORUS:
        return Form11M(grid, np.zeros(grid.spatial_shape))
    return 2.0 * fs_sigma(grid)


def cylinder_potential(grid: TestbedGrid) -> ScalarFieldP:
    """phi = l^2 / 4, the standard cylinder fiber potential."""
    l = grid.l
    vals = np.broadcast_to(0.25 * l * l, grid.p_shape).copy()
    return ScalarFieldP(grid, vals)


def flat_cylinder(grid: TestbedGrid | None = None) -> KahlerData:
    grid = grid or torus_grid()
    return assemble(flat_sigma(grid), cylinder_potential(grid), 0.0)


def fs_cylinder(grid: TestbedGrid | None = None) -> KahlerData:
    grid = grid or radial_grid()
    return assemble(fs_sigma(grid), cylinder_potential(grid), 0.0)


def perturbed_cylinder(grid: TestbedGrid | None = None, amplitude=0.05,
                       width=1.0) -> KahlerData:
    """Flat cylinder with phi += amplitude * cos(2 pi x1) exp(-l^2/width)."""
    grid = grid or torus_grid()
    if grid.kind != TORUS:
        raise ValueError("perturbed cylinder is a torus fixture")
    x1 = grid.x1[:, None, None]
    l = grid.l[None, None, :]
    bump = amplitude * np.cos(2 * np.pi * x1) * np.exp(-l * l / width)
    phi = cylinder_potential(grid) + ScalarFieldP(grid, np.broadcast_to(bump, grid.p_shape).copy())
    return assemble(flat_sigma(grid), phi, 0.0)


def perturbed_fs_cylinder(grid: TestbedGrid | None = None,
                          amplitude=0.01) -> KahlerData:
    """Round-base cylinder with phi += amplitude * exp(-v^2/4) exp(-l^2)."""
    grid = grid or radial_grid()
    if grid.kind != RADIAL:
        raise ValueError("this fixture lives on the radial testbed")
    bump = amplitude * np.exp(-grid.v[:, None] ** 2 / 4.0) \
        * np.exp(-grid.l[None, :] ** 2)
    phi = cylinder_potential(grid) + ScalarFieldP(grid, bump)
    return assemble(fs_sigma(grid), phi, 0.0)


def random_resolved_m(grid: TestbedGrid, rng, modes=3, amplitude=1.0) -> ScalarFieldM:
    """Random smooth base field: low trigonometric modes (torus) or a short
    Fourier sum in tanh(v/4) (radial), resolved at every testbed size."""
    if grid.kind == TORUS:
        x1 = grid.x1[:, None]
        x2 = grid.x2[None, :]
        vals = np.zeros(grid.spatial_shape)
        for k1 in range(-modes, modes + 1):
            for k2 in range(-modes, modes + 1):
                if k1 == 0 and k2 == 0:
                    continue
                a, b = rng.normal(size=2) / (1 + k1 * k1 + k2 * k2)
                ph = 2 * np.pi * (k1 * x1 + k2 * x2)
                vals += a * np.cos(ph) + b * np.sin(ph)
        return ScalarFieldM(grid, amplitude * vals / max(modes, 1))
    t = np.tanh(grid.v / 6.0)
    vals = np.zeros(grid.spatial_shape)
    for k in range(1, min(modes, 2) + 1):
        a, b = rng.normal(size=2) / (1 + k * k)
        vals += a * np.cos(np.pi * k * t) + b * np.sin(np.pi * k * t)
    return ScalarFieldM(grid, amplitude * vals)


def random_resolved_p(grid: TestbedGrid, rng, modes=3, amplitude=1.0) -> ScalarFieldP:
    """Random smooth invariant field with genuine fiber dependence."""
    l = grid.l
    span = max(abs(grid.l_min), abs(grid.l_max))
    profiles = [np.ones_like(l), l / span, np.exp(-l * l),
                np.cos(np.pi * l / (2 * span))]
    vals = np.zeros(grid.p_shape)
    for prof in profiles:
        base = random_resolved_m(grid, rng, modes=modes)
        vals += base.values[..., None] * prof
    return ScalarFieldP(grid, amplitude * vals / len(profiles))
