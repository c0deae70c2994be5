"""Ricci forms, scalar curvatures and Laplacians, on the base and upstairs.

Curvature on the total space is computed relative to the analytic product
reference (flat or round base times the standard cylinder) through the ratio
of top-form densities, so that reference fixtures are curvature-exact and no
raw determinant is differentiated twice without a smooth baseline.
"""

from __future__ import annotations

import numpy as np

from .fields import (Form11M, Form11P, ScalarFieldM, ScalarFieldP, ddc_m,
                     d_wedge_dc, ddc_p, interior_norms, jv_apply,
                     trace_against, wedge_square)
from .fixtures import reference_ricci, reference_sigma
from .reports import ResidualReport
from .structure import KahlerData


def ricci_m(omega: Form11M, sigma_ref: Form11M | None = None,
            ricci_ref: Form11M | None = None) -> Form11M:
    """Ricci form of a base metric:  Ric(ref) - (1/2) dd^c log(H / H_ref).

    The reference defaults to the grid's canonical metric, whose Ricci form
    is supplied in closed form.
    """
    grid = omega.grid
    if not omega.is_positive():
        raise ValueError("ricci_m needs a positive form")
    if sigma_ref is None:
        sigma_ref = reference_sigma(grid)
        ricci_ref = reference_ricci(grid)
    elif ricci_ref is None:
        raise ValueError("an explicit reference needs its analytic Ricci form")
    log_ratio = np.log(omega.h / sigma_ref.h)
    return ricci_ref + (-0.5) * ddc_m(log_ratio, grid)


def scal_m(omega: Form11M, sigma_ref: Form11M | None = None,
           ricci_ref: Form11M | None = None) -> ScalarFieldM:
    """Scalar curvature: ratio of the Ricci and metric components."""
    ric = ricci_m(omega, sigma_ref, ricci_ref)
    return ScalarFieldM(omega.grid, ric.h / omega.h)


def laplacian_m(f: ScalarFieldM, omega: Form11M) -> ScalarFieldM:
    """Metric-trace Laplacian on the base: H^{-1} f_{z zbar}."""
    if not omega.is_positive():
        raise ValueError("laplacian_m needs a positive metric")
    grid = f.grid
    return ScalarFieldM(grid, grid.dzbar_dz(f.values) / omega.h)


def laplacian_p(f: ScalarFieldP, K: KahlerData) -> ScalarFieldP:
    """Metric-trace Laplacian on the total space: (1/2) tr(G^{-1} dd^c f)."""
    return ScalarFieldP(f.grid, 0.5 * trace_against(K.omega, ddc_p(f)))


def ricci_p(K: KahlerData) -> Form11P:
    """Ricci form of omega through the product-reference volume ratio."""
    grid = K.grid
    sigma_ref = reference_sigma(grid)
    ric_ref = reference_ricci(grid)
    density = wedge_square(K.omega).t
    log_f = ScalarFieldP(grid, np.log(density / (2.0 * sigma_ref.h[..., None])))
    correction = (-0.5) * ddc_p(log_f)
    g11 = ric_ref.h[..., None] + correction.g11
    return Form11P(grid, g11, correction.g12, correction.g22)


def scal_p(K: KahlerData) -> ScalarFieldP:
    """Scalar curvature of the total-space metric."""
    return ScalarFieldP(K.grid, trace_against(K.omega, ricci_p(K)))


def _descent_pieces(K: KahlerData):
    log_v = K.log_v()
    delta_mu = laplacian_p(K.mu, K)
    jv_log_v = jv_apply(log_v)
    return log_v, delta_mu - jv_log_v


def descending_ricci(K: KahlerData) -> Form11P:
    """The 2-form upstairs whose reduction is the Ricci form of every
    reduced metric:

        Ric(omega) + dd^c log|V| + d( ((D mu - JV log|V|) / |V|^2) d^c mu ).
    """
    log_v, drift = _descent_pieces(K)
    g = drift / K.vsq
    return ricci_p(K) + ddc_p(log_v) + d_wedge_dc(g, K.mu)


def descending_scalar(K: KahlerData) -> ScalarFieldP:
    """The scalar upstairs that reduces to scal of every reduced metric:

        scal(g) + 2 D log|V| + (2/|V|^2) (D mu - JV log|V|)^2
                + JV(D mu - JV log|V|) / |V|^2.
    """
    log_v, drift = _descent_pieces(K)
    return (scal_p(K)
            + 2.0 * laplacian_p(log_v, K)
            + 2.0 * drift * drift / K.vsq
            + jv_apply(drift) / K.vsq)


def check_moment_ricci_identity(K: KahlerData) -> ResidualReport:
    """Residual of  i_V Ric(omega) + d(D mu) = 0  in frame components."""
    from .fields import contract_v

    grid = K.grid
    ric = ricci_p(K)
    dmu = laplacian_p(K.mu, K)
    cv = contract_v(ric)
    res_z = cv.z + grid.dz_stripped(dmu.values)
    res_l = cv.l + grid.d_l(dmu.values, 1)
    mask = grid.interior_p()
    mags = np.maximum(np.abs(res_z) * np.sqrt(grid.mixed_weight[..., None]),
                      np.abs(res_l))
    linf, l2 = interior_norms(mags, mask)
    return ResidualReport("moment_ricci", grid.meta(), linf, l2)
