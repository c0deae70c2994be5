"""Time integration of the potential flows on the base manifold.

All flows evolve a potential against a fixed background form sigma:

* scalar-curvature flow (4th order):   psi' = (scal(g_psi) - lambda)/2
* coupled flow:                        solve D_psi psi' = lambda - scal, then step
* Ricci flow (unnormalized/normalized) psi' = (1/2) log(H_psi/H_sigma) [+ lambda psi]

Stepping is explicit RK4 at desk scale with a stability-derived default step;
energy monotonicity violations trigger step halving.  Additive constants are
gauge and fixed by the recorded normalization convention; with these choices
constant-scalar-curvature and Einstein fixtures are exact fixed points of the
discrete right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curvature import scal_m
from .errors import (ClassNotFixed, PositivityLost, SolvabilityViolated,
                     StepUnstable)
from .fields import Form11M, ScalarFieldM, ddc_m, integrate_m, grad_pair
from .grids import TORUS, fd_matrix, fd_weights
from .reports import ResidualReport
from .statics import lambda_mean


@dataclass
class FlowPath:
    """Uniformly sampled potential path psi_t against a background sigma."""

    grid: object
    sigma: Form11M
    kind: str
    ts: np.ndarray
    psis: np.ndarray  # (n_samples, *spatial)
    normalization: dict = field(default_factory=dict)
    dt_history: list = field(default_factory=list)

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=float)
        self.psis = np.asarray(self.psis, dtype=float)
        if self.psis.shape != (len(self.ts),) + self.grid.spatial_shape:
            raise ValueError("sample array does not match times and grid")
        if np.any(np.diff(self.ts) <= 0):
            raise ValueError("sample times must be strictly increasing")
        for k in range(len(self.ts)):
            if not (self.sigma + ddc_m(self.psis[k], self.grid)).is_positive():
                raise PositivityLost(f"sample {k} is not a Kahler potential",
                                     t=self.ts[k])

    @property
    def n_samples(self):
        return len(self.ts)

    def is_uniform(self, rtol=1e-8):
        dts = np.diff(self.ts)
        return bool(np.max(np.abs(dts - dts[0])) <= rtol * dts[0])

    def metric_at(self, k) -> Form11M:
        return self.sigma + ddc_m(self.psis[k], self.grid)

    def time_derivative(self, order=1):
        """d^order psi / dt^order at every sample (4th-order stencils when
        enough samples exist, 2nd-order otherwise)."""
        D = time_diff_matrix(self.ts, order)
        return np.einsum("kj,j...->k...", D, self.psis)

    def potential_field(self, k) -> ScalarFieldM:
        return ScalarFieldM(self.grid, self.psis[k])


def time_diff_matrix(ts, order):
    ts = np.asarray(ts, dtype=float)
    n = len(ts)
    if n >= 6:
        return fd_matrix(ts, order)
    if n < order + 1:
        raise ValueError("too few samples for a time derivative")
    width = min(n, order + 1 if n < 3 else 3)
    width = max(width, order + 1)
    D = np.zeros((n, n))
    for i in range(n):
        lo = min(max(i - width // 2, 0), n - width)
        idx = np.arange(lo, lo + width)
        D[i, idx] = fd_weights(ts[idx], ts[i], order)
    return D


# ---------------------------------------------------------------------------
# stability estimates
# ---------------------------------------------------------------------------

_RK4_REAL_AXIS = 2.785


def _laplacian_symbol_max(sigma: Form11M) -> float:
    grid = sigma.grid
    if grid.kind == TORUS:
        n = grid.n_spatial
        return (np.pi ** 2) * n * n / (2.0 * float(np.min(sigma.h)))
    stencil_max = 16.0 / (3.0 * grid.h_v ** 2)
    return float(np.max(stencil_max / (grid.u * sigma.h)))


def stable_dt(sigma: Form11M, kind: str, safety=0.9) -> float:
    lap = _laplacian_symbol_max(sigma)
    rate = {"calabi": lap * lap, "pseudo_calabi": 2.0 * lap,
            "kr": lap, "nkr": lap}[kind]
    return safety * _RK4_REAL_AXIS / rate


# ---------------------------------------------------------------------------
# integrator core
# ---------------------------------------------------------------------------


def _run_rk4(psi0, sigma, t_end, dt, rhs, kind, save_count=33,
             energy_fn=None, energy_tol=1e-10, max_halvings=10,
             normalization=None, metric_h=None):
    """Fixed-step RK4 with positivity and energy monitoring.

    ``rhs(psi, reuse)`` may exploit ``reuse``, the value it returned for the
    current accepted state (so the first stage costs nothing); the candidate
    state's evaluation doubles as the monitor probe.  An energy increase
    beyond tolerance halves the step (at most ``max_halvings`` times) and
    retries without accepting.
    """
    grid = sigma.grid
    if metric_h is None:
        metric_h = lambda p: sigma.h + ddc_m(p, grid).h  # noqa: E731
    psi = np.array(psi0, dtype=float, copy=True)
    n_steps = max(int(np.ceil(t_end / dt - 1e-12)), 1)
    dt = t_end / n_steps
    save_stride = max(n_steps // (save_count - 1), 1)
    # keep the sampling uniform: stretch step count to a multiple of the stride
    n_steps = int(np.ceil(n_steps / save_stride)) * save_stride
    dt = t_end / n_steps

    ts = [0.0]
    samples = [psi.copy()]
    dt_history = [dt]
    halvings = 0
    k1 = rhs(psi)
    energy_prev = energy_fn(psi) if energy_fn is not None else None
    t = 0.0
    step = 0
    while step < n_steps:
        k2 = rhs(psi + 0.5 * dt * k1)
        k3 = rhs(psi + 0.5 * dt * k2)
        k4 = rhs(psi + dt * k3)
        cand = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        # the candidate's evaluation doubles as the monitor probe and, on
        # acceptance, as the next step's first stage
        k1_cand = rhs(cand)
        h_cand = rhs.last_metric if hasattr(rhs, "last_metric") else metric_h(cand)
        if np.min(h_cand) <= 0.0:
            raise PositivityLost(f"flow left the Kahler cone at t={t + dt:.3e}",
                                 t=t + dt)
        if energy_fn is not None:
            e = energy_fn(cand)
            if e > energy_prev + energy_tol * (1.0 + abs(energy_prev)):
                halvings += 1
                if halvings > max_halvings:
                    raise StepUnstable(
                        f"energy kept increasing after {max_halvings} halvings")
                dt *= 0.5
                n_steps = 2 * n_steps
                step = 2 * step
                save_stride = 2 * save_stride
                dt_history.append(dt)
                continue
            energy_prev = e
        psi = cand
        k1 = k1_cand
        step += 1
        t = step * dt
        if step % save_stride == 0:
            ts.append(t)
            samples.append(psi.copy())
    return FlowPath(grid, sigma, kind, np.array(ts), np.array(samples),
                    normalization or {}, dt_history)


# ---------------------------------------------------------------------------
# the flows
# ---------------------------------------------------------------------------


class _TorusScal:
    """Raw spectral scalar-curvature evaluation for tight flow loops."""

    def __init__(self, sigma: Form11M):
        grid = sigma.grid
        n = grid.n_spatial
        k = 2.0 * np.pi * np.fft.fftfreq(n) * n
        self.ddbar = -0.25 * (k[:, None] ** 2 + k[None, :n // 2 + 1] ** 2)
        self.sigma_h = sigma.h
        from .fixtures import reference_ricci

        self.ric_ref = reference_ricci(grid).h
        self.quad = grid.spatial_quad_weights

    def metric_h(self, psi):
        return self.sigma_h + np.fft.irfft2(
            2.0 * self.ddbar * np.fft.rfft2(psi), s=psi.shape)

    def scal(self, psi, h=None):
        if h is None:
            h = self.metric_h(psi)
        h_ric = self.ric_ref - np.fft.irfft2(
            self.ddbar * np.fft.rfft2(np.log(h / self.sigma_h)), s=psi.shape)
        return h_ric / h

    def energy(self, psi, lam):
        h = self.metric_h(psi)
        s = self.scal(psi, h)
        return float(np.sum((s - lam) ** 2 * h * self.quad))


def calabi_energy(sigma: Form11M, psi_vals) -> float:
    grid = sigma.grid
    omega = sigma + ddc_m(psi_vals, grid)
    lam = lambda_mean(sigma)
    s = scal_m(omega)
    return integrate_m((s.values - lam) ** 2, omega)


def calabi_integrate(psi0, sigma: Form11M, t_end: float, dt: float | None = None,
                     save_count=33) -> FlowPath:
    """Scalar-curvature flow of the potential: psi' = (scal - lambda)/2.

    The flow energy int (scal - lambda)^2 dV is monitored every step; an
    increase beyond tolerance halves the step (at most ten times).
    """
    grid = sigma.grid
    lam = lambda_mean(sigma)
    psi0 = np.asarray(psi0.values if isinstance(psi0, ScalarFieldM) else psi0,
                      dtype=float)
    if not (sigma + ddc_m(psi0, grid)).is_positive():
        raise PositivityLost("initial potential is not Kahler", t=0.0)
    dt = dt if dt is not None else stable_dt(sigma, "calabi")

    if grid.kind == TORUS:
        fast = _TorusScal(sigma)

        class _Rhs:
            last_metric = None
            last_scal = None

            def __call__(self, psi_vals):
                h = fast.metric_h(psi_vals)
                s = fast.scal(psi_vals, h)
                self.last_metric, self.last_scal = h, s
                return 0.5 * (s - lam)

        rhs = _Rhs()

        def energy_fn(_):
            # the loop probes the candidate right after evaluating it
            return float(np.sum((rhs.last_scal - lam) ** 2
                                * rhs.last_metric * fast.quad))
    else:
        def rhs(psi_vals):
            omega = sigma + ddc_m(psi_vals, grid)
            return 0.5 * (scal_m(omega).values - lam)

        energy_fn = lambda p: calabi_energy(sigma, p)  # noqa: E731

    return _run_rk4(psi0, sigma, t_end, dt, rhs, "calabi",
                    save_count=save_count, energy_fn=energy_fn,
                    normalization={"convention": "psi' = (scal - lambda)/2",
                                   "lambda": lam})


def _poisson_solve(sigma: Form11M, rhs_vals):
    """Solve D_omega f = rhs with zero mean, for omega = sigma here."""
    grid = sigma.grid
    target = rhs_vals * sigma.h  # f_{z zbar} = H * rhs
    if grid.kind == TORUS:
        n = grid.n_spatial
        k = 2.0 * np.pi * np.fft.fftfreq(n) * n
        k1 = k[:, None]
        k2 = k[None, :]
        sym = -0.25 * (k1 * k1 + k2 * k2)
        sym[0, 0] = 1.0
        fhat = np.fft.fft2(target)
        fhat /= sym
        fhat[0, 0] = 0.0
        out = np.real(np.fft.ifft2(fhat))
        return out - np.mean(out)
    # radial: f_vv = u * H * rhs, two spline antiderivatives, Neumann ends
    from scipy.interpolate import CubicSpline

    g = grid.u * target
    a1 = CubicSpline(grid.v, g).antiderivative()(grid.v)
    a1 -= a1[0]
    out = CubicSpline(grid.v, a1).antiderivative()(grid.v)
    w = grid.spatial_quad_weights / (np.pi * grid.u)
    return out - np.sum(out * w) / np.sum(w)


def pseudo_calabi_integrate(psi0, sigma: Form11M, t_end: float,
                            dt: float | None = None, save_count=33,
                            solvability_tol=1e-8) -> FlowPath:
    """Coupled flow: at each stage solve D_psi v = lambda - scal(g_psi) for the
    mean-zero velocity v and step psi by it."""
    grid = sigma.grid
    lam = lambda_mean(sigma)
    psi0 = np.asarray(psi0.values if isinstance(psi0, ScalarFieldM) else psi0,
                      dtype=float)
    dt = dt if dt is not None else stable_dt(sigma, "pseudo_calabi")

    def rhs(psi_vals):
        omega = sigma + ddc_m(psi_vals, grid)
        target = lam - scal_m(omega).values
        compat = integrate_m(target, omega)
        if abs(compat) > solvability_tol:
            raise SolvabilityViolated(
                f"int (lambda - scal) dV = {compat:.3e} is not zero")
        return _poisson_solve(omega, target)

    return _run_rk4(psi0, sigma, t_end, dt, rhs, "pseudo_calabi",
                    save_count=save_count,
                    normalization={"convention": "mean-zero velocity",
                                   "lambda": lam})


def kr_integrate(psi0, sigma: Form11M, t_end: float, dt: float | None = None,
                 normalized=False, lam: float | None = None,
                 save_count=33) -> FlowPath:
    """Ricci flow of the potential.

    Unnormalized mode requires the flat-class torus testbed (the class must
    not move); normalized mode adds +lambda psi and keeps Einstein fixtures
    fixed.  The velocity is taken mean-zero.
    """
    grid = sigma.grid
    if not normalized and grid.kind != TORUS:
        raise ClassNotFixed(
            "unnormalized Ricci flow moves the class off the torus testbed")
    psi0 = np.asarray(psi0.values if isinstance(psi0, ScalarFieldM) else psi0,
                      dtype=float)
    if lam is None:
        lam = lambda_mean(sigma) if normalized else 0.0
    dt = dt if dt is not None else stable_dt(sigma, "kr")

    def rhs(psi_vals):
        h = sigma.h + ddc_m(psi_vals, grid).h
        v = 0.5 * np.log(h / sigma.h)
        if normalized:
            v = v + lam * psi_vals
        return v - np.mean(v)

    kind = "nkr" if normalized else "kr"
    return _run_rk4(psi0, sigma, t_end, dt, rhs, kind, save_count=save_count,
                    normalization={"convention": "mean-zero velocity",
                                   "normalized": normalized, "lambda": lam})


def kr_time_map(a: float, b: float, lam: float, t):
    """Level reparametrization of the normalized Ricci flow:
    tau(t) = (a + b e^{lam t})/lam, with d tau/dt = b e^{lam t}."""
    if lam == 0:
        raise ValueError("lam must be nonzero; use the unnormalized mode instead")
    return (a + b * np.exp(lam * np.asarray(t, dtype=float))) / lam


# ---------------------------------------------------------------------------
# geodesic residuals of a path
# ---------------------------------------------------------------------------


def geodesic_residual_path(path: FlowPath) -> ResidualReport:
    """Residual of the potential-geodesic equation along a sampled path.

    Evaluates both  psi'' - |grad psi'|^2/2  and its exponential rewriting
    psi'' - e^{-psi'} D e^{psi'} + D psi'; the two must agree to
    discretization error.  The path is a geodesic up to normalization
    exactly when the residual is spatially constant, so the reported norms
    are of the deviation from the spatial mean at interior times.
    """
    if path.n_samples < 3:
        raise ValueError("need at least 3 samples")
    if not path.is_uniform():
        raise ValueError("samples must be uniform in time")
    grid = path.grid
    d1 = path.time_derivative(1)
    d2 = path.time_derivative(2)
    skip = 2 if path.n_samples >= 6 else 1
    ks = range(skip, path.n_samples - skip)
    mask = grid.interior_m()

    dev_sup = 0.0
    dev_sq = []
    agree = 0.0
    by_t = []
    means = []
    for k in ks:
        omega = path.metric_at(k)
        vk = ScalarFieldM(grid, d1[k])
        r1 = d2[k] - 0.5 * grad_pair(vk, vk, omega).values

        from .curvature import laplacian_m

        ev = ScalarFieldM(grid, np.exp(d1[k]))
        r2 = (d2[k]
              - np.exp(-d1[k]) * laplacian_m(ev, omega).values
              + laplacian_m(vk, omega).values)
        agree = max(agree, float(np.max(np.abs((r1 - r2)[mask]))))
        mean_k = float(np.mean(r1[mask]))
        dev = np.abs(r1 - mean_k)[mask]
        dev_sup = max(dev_sup, float(np.max(dev)))
        dev_sq.append(np.mean(dev * dev))
        by_t.append([float(path.ts[k]), float(np.max(dev))])
        means.append(mean_k)
    rep = ResidualReport("geodesic_path", grid.meta(), dev_sup,
                         float(np.sqrt(np.mean(dev_sq))), reduced_by_tau=by_t)
    rep.extra["forms_agreement"] = agree
    rep.extra["residual_mean_by_t"] = means
    return rep
