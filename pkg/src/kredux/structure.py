"""Circle-invariant Kahler structures on the product total space.

A structure is held as the triple (sigma, phi, c): a Kahler form on the base,
an invariant potential on the total space and a moment-map constant.  The
derived data are

    omega = pi^* sigma + dd^c phi,
    mu    = JV(phi) + c,
    |V|^2 = JV(mu),

and positivity is certified through the smallest eigenvalue of omega's
Hermitian component matrix over the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotPositive
from .fields import (Form11M, Form11P, ScalarFieldM, ScalarFieldP,
                     _ddc_m_fiberwise, ddc_m, jv_apply)
from .grids import TestbedGrid
from .interp import FiberInterp, FiberSpline


@dataclass(frozen=True)
class PositivityCertificate:
    min_eigenvalue: float
    worst_node: tuple

    @property
    def positive(self):
        return self.min_eigenvalue > 0.0


@dataclass(frozen=True)
class KahlerData:
    """Immutable bundle (sigma, phi, c) with derived omega, mu, |V|^2."""

    grid: TestbedGrid
    sigma: Form11M
    phi: ScalarFieldP
    c: float
    omega: Form11P
    mu: ScalarFieldP
    vsq: ScalarFieldP
    certificate: PositivityCertificate
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def mu_interp(self) -> FiberInterp:
        if "mu_interp" not in self._cache:
            self._cache["mu_interp"] = self.mu.interp()
        return self._cache["mu_interp"]

    def log_v(self) -> ScalarFieldP:
        """log |V| = log(vsq)/2."""
        return ScalarFieldP(self.grid, 0.5 * np.log(self.vsq.values))

    def mu_range(self):
        """Largest tau-interval reachable at every spatial node."""
        mu = self.mu.values
        return float(np.max(mu[..., -1])), float(np.min(mu[..., 0]))


def assemble(sigma: Form11M, phi: ScalarFieldP, c: float,
             require_positive: bool = True) -> KahlerData:
    """Build the invariant structure from a triple (sigma, phi, c).

    Raises NotPositive when the component matrix of omega fails strict
    positive-definiteness at some node, unless ``require_positive`` is off
    (the certificate is computed either way).
    """
    grid = phi.grid
    if sigma.grid != grid:
        raise ValueError("sigma and phi live on different grids")
    mu = jv_apply(phi) + c
    vsq = jv_apply(mu)
    g11 = sigma.h[..., None] + _ddc_m_fiberwise(grid, phi.values)
    g12 = -grid.dz_stripped(mu.values)
    g22 = 0.5 * vsq.values
    omega = Form11P(grid, g11, g12, g22)
    mineig = omega.min_eigenvalue()
    worst = np.unravel_index(int(np.argmin(mineig)), mineig.shape)
    cert = PositivityCertificate(float(mineig[worst]), tuple(int(i) for i in worst))
    if require_positive and not cert.positive:
        raise NotPositive(
            f"omega is not positive: min eigenvalue {cert.min_eigenvalue:.3e} "
            f"at node {cert.worst_node}",
            node=cert.worst_node, eigenvalue=cert.min_eigenvalue)
    return KahlerData(grid, sigma, phi, float(c), omega, mu, vsq, cert)


def gauge(K: KahlerData, u: ScalarFieldM, b: float, c_tilde: float,
          require_positive: bool = True) -> KahlerData:
    """Move to the equivalent triple

        sigma~ = sigma + dd^c u,
        phi~   = phi - pi^* u + ((c~ - c)/2) l + b.

    The derived omega and mu agree pointwise with those of K; only the
    bookkeeping triple changes.
    """
    grid = K.grid
    if u.grid != grid:
        raise ValueError("gauge function lives on a different grid")
    sigma_t = K.sigma + ddc_m(u)
    if require_positive and not sigma_t.is_positive():
        raise NotPositive("sigma + dd^c u is not positive")
    l_ax = grid.l
    phi_t = ScalarFieldP(
        grid,
        K.phi.values - u.values[..., None] + 0.5 * (c_tilde - K.c) * l_ax + b)
    return assemble(sigma_t, phi_t, c_tilde, require_positive=require_positive)


def potential_from_moment(mu: ScalarFieldP, c: float) -> ScalarFieldP:
    """Invariant potential with JV(phi) + c = mu, vanishing at l_min.

    phi(x, l) = (1/2) * integral_{l_min}^{l} (c - mu(x, lam)) dlam, by
    fiberwise spline quadrature; jv_apply(phi) + c reproduces mu to the
    accuracy of the fiber stencils.
    """
    grid = mu.grid
    integrand = 0.5 * (c - mu.values)
    vals = FiberSpline(grid.l, integrand).antiderivative_values()
    return ScalarFieldP(grid, vals)
