"""Lifting a path of potentials on the base to an invariant structure upstairs.

Given a uniformly sampled path psi_t with sigma + dd^c psi_t > 0, the lift

* shifts the path by a profile a_t so that the second time derivative is
  everywhere at most -2 (strict concavity),
* inverts  d psi_t / dt = l/2  fiberwise for t = mu(x, l) on a realized
  window of the log-fiber coordinate, and
* assembles phi(x, l) = psi_mu(x) - (mu/2) l with c = 0.

Reductions of the lifted structure reproduce the (shifted) path up to a
spatial constant per level; positivity of the lift is equivalent to the
concavity sign, and both are certified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .curvature import scal_m
from .errors import HypothesisViolated, NonConcave, OutOfWindow
from .fields import ScalarFieldP
from .flows import FlowPath, time_diff_matrix
from .grids import TestbedGrid
from .reduction import reduced_potential
from .reports import ResidualReport
from .structure import KahlerData, assemble


@dataclass(frozen=True)
class LiftResult:
    data: KahlerData
    window: tuple
    a_t: np.ndarray | None
    ts: np.ndarray
    mu_solved: ScalarFieldP
    max_inversion_residual: float
    concavity_max: float
    criterion_agrees: bool


# ---------------------------------------------------------------------------
# concavity shift
# ---------------------------------------------------------------------------


def concavity_shift(path: FlowPath, slack=1e-9):
    """Shift the path by a_t so its discrete second time derivative is <= -2.

    a_t = -t^2 - double integral of the running spatial sup of psi'' (trapezoid,
    piecewise linear in t), topped up by an exact quadratic if the discrete
    recheck still leaves an excess.  Returns (shifted path, a_t samples).
    """
    if path.n_samples < 5:
        raise ValueError("need at least 5 samples to shift a path")
    if not path.is_uniform():
        raise ValueError("samples must be uniform in time")
    ts = path.ts
    d2 = path.time_derivative(2)
    sup = np.max(d2.reshape(path.n_samples, -1), axis=1)
    inner = cumulative_trapezoid(sup, ts, initial=0.0)
    a = -ts * ts - cumulative_trapezoid(inner, ts, initial=0.0)

    D2 = time_diff_matrix(ts, 2)
    excess = float(np.max(d2 + (D2 @ a).reshape(-1, *([1] * (d2.ndim - 1)))) + 2.0)
    if excess > 0.0:
        # quadratic top-up is differentiated exactly by the same stencils
        a = a - 0.5 * (excess + slack) * ts * ts
    shifted = FlowPath(path.grid, path.sigma, path.kind + "+shift", ts,
                       path.psis + a.reshape(-1, *([1] * (path.psis.ndim - 1))),
                       dict(path.normalization, shift="a_t"),
                       list(path.dt_history))
    return shifted, a


# ---------------------------------------------------------------------------
# fiberwise Legendre inversion
# ---------------------------------------------------------------------------


class _TimeSplines:
    """Per-node cubic splines of a shifted path in t, with the quadratic
    constant-concavity extension beyond the sampled range."""

    def __init__(self, path: FlowPath):
        self.ts = path.ts
        self.shape = path.grid.spatial_shape
        y = path.psis.reshape(path.n_samples, -1)
        self._cs = CubicSpline(self.ts, y, axis=0)
        self._c = self._cs.c  # (4, nseg, nspace)
        self._n = y.shape[1]
        t0, t1 = self.ts[0], self.ts[-1]
        self.v0 = self._eval_in(np.full(self._n, t0), 1)
        self.v1 = self._eval_in(np.full(self._n, t1), 1)
        self.k0 = self._eval_in(np.full(self._n, t0), 2)
        self.k1 = self._eval_in(np.full(self._n, t1), 2)
        self.y0 = self._eval_in(np.full(self._n, t0), 0)
        self.y1 = self._eval_in(np.full(self._n, t1), 0)

    def _eval_in(self, t, deriv):
        seg = np.clip(np.searchsorted(self.ts, t, side="right") - 1,
                      0, len(self.ts) - 2)
        dx = t - self.ts[seg]
        c = self._c
        cols = np.arange(self._n)
        if deriv == 0:
            return ((c[0, seg, cols] * dx + c[1, seg, cols]) * dx
                    + c[2, seg, cols]) * dx + c[3, seg, cols]
        if deriv == 1:
            return (3 * c[0, seg, cols] * dx + 2 * c[1, seg, cols]) * dx \
                + c[2, seg, cols]
        return 6 * c[0, seg, cols] * dx + 2 * c[1, seg, cols]

    def value(self, t):
        t0, t1 = self.ts[0], self.ts[-1]
        tc = np.clip(t, t0, t1)
        out = self._eval_in(tc, 0)
        lo = t < t0
        hi = t > t1
        if np.any(lo):
            d = (t - t0)[lo]
            out[lo] = self.y0[lo] + self.v0[lo] * d + 0.5 * self.k0[lo] * d * d
        if np.any(hi):
            d = (t - t1)[hi]
            out[hi] = self.y1[hi] + self.v1[hi] * d + 0.5 * self.k1[hi] * d * d
        return out

    def velocity(self, t):
        t0, t1 = self.ts[0], self.ts[-1]
        tc = np.clip(t, t0, t1)
        out = self._eval_in(tc, 1)
        lo = t < t0
        hi = t > t1
        if np.any(lo):
            out[lo] = self.v0[lo] + self.k0[lo] * (t - t0)[lo]
        if np.any(hi):
            out[hi] = self.v1[hi] + self.k1[hi] * (t - t1)[hi]
        return out

    def curvature(self, t):
        t0, t1 = self.ts[0], self.ts[-1]
        tc = np.clip(t, t0, t1)
        out = self._eval_in(tc, 2)
        out[t < t0] = self.k0[t < t0]
        out[t > t1] = self.k1[t > t1]
        return out

    def solve_velocity(self, target, tol=1e-13, max_iter=120):
        """Root of velocity(t) = target per node; velocity is strictly
        decreasing, so the root is unique on the extended line."""
        t0, t1 = self.ts[0], self.ts[-1]
        lo = np.full(self._n, t0)
        hi = np.full(self._n, t1)
        # expand brackets through the linear extensions where needed
        need_lo = self.v0 < target
        if np.any(need_lo):
            lo[need_lo] = t0 + (target - self.v0[need_lo]) / self.k0[need_lo] - 1e-3
        need_hi = self.v1 > target
        if np.any(need_hi):
            hi[need_hi] = t1 + (target - self.v1[need_hi]) / self.k1[need_hi] + 1e-3
        x = 0.5 * (lo + hi)
        for _ in range(max_iter):
            r = self.velocity(x) - target
            if np.all(np.abs(r) <= tol * max(1.0, abs(target))):
                break
            lo = np.where(r > 0, np.maximum(lo, x), lo)
            hi = np.where(r < 0, np.minimum(hi, x), hi)
            d = self.curvature(x)
            x_new = x - r / d
            bad = (x_new <= lo) | (x_new >= hi) | ~np.isfinite(x_new)
            x = np.where(bad, 0.5 * (lo + hi), x_new)
        resid = float(np.max(np.abs(self.velocity(x) - target)))
        return x, resid


def realized_window(path: FlowPath, band=(0.15, 0.85), pad=0.02):
    """Fiber window realized by the path: the union of the per-level bands
    2 * [min_x, max_x] of the time velocity over the middle of the time range,
    padded, and capped by the 5%-shrunk global velocity range."""
    d1 = path.time_derivative(1)
    flat = d1.reshape(path.n_samples, -1)
    n = path.n_samples
    k0, k1 = int(band[0] * (n - 1)), int(np.ceil(band[1] * (n - 1)))
    w_lo = 2.0 * float(np.min(flat[k0:k1 + 1]))
    w_hi = 2.0 * float(np.max(flat[k0:k1 + 1]))
    span = w_hi - w_lo
    w_lo -= pad * span
    w_hi += pad * span
    g_lo, g_hi = 2.0 * float(np.min(flat)), 2.0 * float(np.max(flat))
    g_span = g_hi - g_lo
    cap_lo, cap_hi = g_lo + 0.05 * g_span, g_hi - 0.05 * g_span
    lo, hi = max(w_lo, cap_lo), min(w_hi, cap_hi)
    if not lo < hi:
        lo, hi = w_lo, w_hi
    return lo, hi


def legendre_lift(path: FlowPath, n_l=129, window=None, margin=4,
                  a_t=None) -> LiftResult:
    """Invert a strictly concave path into an invariant structure upstairs.

    Requires d^2 psi/dt^2 < 0 at every sample (run :func:`concavity_shift`
    first; its profile may be passed through ``a_t`` for the record); beyond
    the sampled time range the path is continued with constant concavity so
    the realized window is covered at every node.
    """
    if not path.is_uniform():
        raise ValueError("samples must be uniform in time")
    d2 = path.time_derivative(2)
    cmax = float(np.max(d2))
    if cmax >= 0.0:
        raise NonConcave(f"path is not strictly concave (max psi'' = {cmax:.3e})")

    grid0 = path.grid
    lo, hi = window if window is not None else realized_window(path)
    if not lo < hi:
        raise OutOfWindow("requested fiber window is empty")
    grid = TestbedGrid(grid0.kind, grid0.n_spatial, n_l, lo, hi,
                       l_u=grid0.l_u, margin=margin)

    splines = _TimeSplines(path)
    nspace = int(np.prod(grid.spatial_shape))
    mu = np.empty((nspace, n_l))
    phi = np.empty((nspace, n_l))
    worst = 0.0
    for j, l_val in enumerate(grid.l):
        t_j, resid = splines.solve_velocity(0.5 * l_val)
        worst = max(worst, resid)
        mu[:, j] = t_j
        phi[:, j] = splines.value(t_j) - 0.5 * t_j * l_val
    mu = mu.reshape(grid.spatial_shape + (n_l,))
    phi = phi.reshape(grid.spatial_shape + (n_l,))

    K = assemble(
        (type(path.sigma))(grid, path.sigma.h),
        ScalarFieldP(grid, phi), 0.0)

    curv = np.empty((nspace, n_l))
    for j in range(n_l):
        curv[:, j] = splines.curvature(mu.reshape(nspace, n_l)[:, j])
    concavity_ok = bool(np.all(curv < 0.0))
    agrees = concavity_ok == K.certificate.positive
    return LiftResult(K, (lo, hi),
                      None if a_t is None else np.asarray(a_t, dtype=float),
                      path.ts, ScalarFieldP(grid, mu), worst,
                      float(np.max(curv)), agrees)


def admissible_taus(path: FlowPath, lift: LiftResult, max_count=7, pad=0.01):
    """Sample times whose full spatial velocity band fits the lift window."""
    d1 = path.time_derivative(1).reshape(path.n_samples, -1)
    lo, hi = lift.window
    span = hi - lo
    good = []
    skip = 2 if path.n_samples >= 7 else 1
    for k in range(skip, path.n_samples - skip):
        b_lo, b_hi = 2.0 * float(np.min(d1[k])), 2.0 * float(np.max(d1[k]))
        if b_lo > lo + pad * span and b_hi < hi - pad * span:
            good.append(float(path.ts[k]))
    if not good:
        raise OutOfWindow("no sample time has its band inside the lift window")
    stride = max(len(good) // max_count, 1)
    return np.array(good[::stride][:max_count])


def roundtrip_check(path: FlowPath, lift: LiftResult, taus) -> ResidualReport:
    """Reductions of the lift against the source path, up to the concavity
    shift and a spatial constant per level (both removed by spatial-mean
    matching); the reduced forms are compared directly as well."""
    grid = lift.data.grid
    mask = grid.interior_m()
    splines = _TimeSplines(path)
    nspace = int(np.prod(grid.spatial_shape))
    sup = 0.0
    sq = []
    form_gap = 0.0
    by_tau = []
    for tau in np.asarray(taus, dtype=float):
        red = reduced_potential(lift.data, tau)
        target = splines.value(np.full(nspace, tau)).reshape(grid.spatial_shape)
        gap = red.psi_tau.values - target
        gap = gap - np.mean(gap[mask])
        g = float(np.max(np.abs(gap[mask])))
        sup = max(sup, g)
        sq.append(np.mean(gap[mask] ** 2))
        by_tau.append([float(tau), g])

        from .fields import ddc_m

        omega_path = path.sigma.h + ddc_m(target, path.grid).h
        form_gap = max(form_gap, float(np.max(np.abs(
            (red.omega_tau.h - omega_path)[mask]))))
    rep = ResidualReport("lift_roundtrip", grid.meta(), sup,
                         float(np.sqrt(np.mean(sq))), reduced_by_tau=by_tau)
    rep.extra["form_gap"] = form_gap
    rep.extra["inversion_residual"] = lift.max_inversion_residual
    return rep


def calabi_converse_w(path: FlowPath, h, C: float):
    """Candidate squared field strength along a scalar-curvature flow path:

        w = -C / d/dtau( scal(g_tau) - h(tau) ),

    which must be strictly positive under the monotone-velocity hypothesis.
    Raises HypothesisViolated listing the (time index, node) samples where the
    sign fails or the denominator degenerates.
    """
    if C <= 0:
        raise HypothesisViolated("the constant C must be positive", where=None)
    scals = np.array([scal_m(path.metric_at(k)).values
                      for k in range(path.n_samples)])
    hh = np.asarray(h(path.ts), dtype=float)
    q = scals - hh.reshape(-1, *([1] * (scals.ndim - 1)))
    D1 = time_diff_matrix(path.ts, 1)
    dq = np.einsum("kj,j...->k...", D1, q)
    tiny = 1e-10 * (1.0 + float(np.max(np.abs(scals))))
    bad = (dq >= -tiny)
    if np.any(bad):
        where = np.argwhere(bad)
        raise HypothesisViolated(
            f"velocity sign hypothesis fails at {len(where)} samples",
            where=where)
    w = -C / dq
    rep = ResidualReport("calabi_converse_w", path.grid.meta(),
                         float(np.max(w)), float(np.sqrt(np.mean(w * w))),
                         extra={"min_w": float(np.min(w))})
    return w, rep
