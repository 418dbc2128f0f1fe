"""Holomorphic linking in C^3: the kernel double integral over a pair of
complex curves, the closed form for complex lines, the theta-independent
complex linking number, and the sphere reproducing-property check.

Measure convention: a complex parameter t = x + iy integrates against the
real area element dA = dx dy. Pulling the kernel 4-form back through two
complex charts turns d(tbar) ^ d(sbar) ^ dt ^ ds into +4 dA dA, so every
double integral below carries an explicit factor 4 on the pointwise
kernel. The sphere normalizer is measured, not assumed: integrating the
kernel 5-form over a round sphere with f = 1 gives exactly -4*pi^3*i, so
the reproducing map divides by that (multiplies by i/(4 pi^3)).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import _kernels
from .errors import CoincidentPoints, DegenerateConfiguration, MethodInapplicable
from .geometry import det3
from .quadrature import domain_for_curve, integrate_pv

C3 = math.pi ** 3
AREA_FACTOR = 4.0  # d(tbar)^d(sbar)^dt^ds = +4 dA1 dA2
SPHERE_NORMALIZER = 1j / (4.0 * math.pi ** 3)

_LEVI_CIVITA = (((0, 1, 2), 1.0), ((1, 2, 0), 1.0), ((2, 0, 1), 1.0),
                ((0, 2, 1), -1.0), ((2, 1, 0), -1.0), ((1, 0, 2), -1.0))


@dataclass(frozen=True)
class BMContext:
    """Normalization context for the kernel integrals.

    include_cn switches the volume prefactor C3 = pi^3 on the pointwise
    kernel; all calibrated constants are measured with include_cn=True.
    """

    n: int = 3
    c3: float = field(default=C3)
    include_cn: bool = True

    def __post_init__(self):
        if self.n != 3:
            raise ValueError("only ambient dimension 3 is supported")
        if abs(self.c3 - C3) > 1e-12 * C3:
            raise ValueError("c3 must be pi^3")

    @property
    def prefactor(self):
        return self.c3 if self.include_cn else 1.0


def bm_pullback_integrand(z, dz, w, dw, ctx):
    """Pointwise kernel conj(det3(z-w, dz, dw)) / ||z-w||^6.

    Multiplied by C3 when ctx.include_cn. Broadcasts over leading axes;
    raises CoincidentPoints when z = w.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    r = z - w
    n2 = np.sum(r.real ** 2 + r.imag ** 2, axis=-1)
    if np.any(n2 < 1e-28):
        raise CoincidentPoints("kernel evaluated at z = w")
    val = np.conj(det3(r, dz, dw)) / (n2 ** 3)
    return val * ctx.prefactor


def bm_pullback_epsilon_sum(z, dz, w, dw, ctx):
    """Reference form of the kernel: the explicit antisymmetric sum

        sum_{ijk} eps^{ijk} conj(z_i - w_i) conj(dz_j) conj(dw_k) / ||z-w||^6

    with eps^{123} = +1, times C3 when ctx.include_cn. Agrees with
    bm_pullback_integrand to machine precision; kept as an independent
    cross-check of the determinant form.
    """
    z = np.asarray(z, dtype=complex)
    dz = np.asarray(dz, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dw = np.asarray(dw, dtype=complex)
    r = z - w
    n2 = np.sum(r.real ** 2 + r.imag ** 2, axis=-1)
    if np.any(n2 < 1e-28):
        raise CoincidentPoints("kernel evaluated at z = w")
    acc = np.zeros(np.broadcast(r[..., 0], dz[..., 0], dw[..., 0]).shape,
                   dtype=complex)
    for (i, j, k), sign in _LEVI_CIVITA:
        acc = acc + sign * np.conj(r[..., i]) * np.conj(dz[..., j]) * np.conj(dw[..., k])
    return acc / (n2 ** 3) * ctx.prefactor


def _require_complex_pair(curve1, curve2, what):
    if curve1.kind != "complex_affine" or curve2.kind != "complex_affine":
        raise MethodInapplicable(f"{what} needs two complex curves")


def holo_linking_integral(s1, s2, ctx, cfg):
    """Holomorphic linking of two weighted complex curves.

    s1 and s2 are (ParamCurve, OneForm) pairs. The value is the double
    integral of the pointwise kernel times both form coefficients over the
    two parameter domains (area measure, factor 4; C3 per ctx). Forms with
    declared poles route through the principal-value integrator; truncated
    domains get the R vs 2R tail step with 1/R^2 decay.
    """
    curve1, form1 = s1
    curve2, form2 = s2
    _require_complex_pair(curve1, curve2, "holo_linking_integral")
    dom_a = domain_for_curve(curve1, cfg)
    dom_b = domain_for_curve(curve2, cfg)
    scale = AREA_FACTOR * ctx.prefactor

    def integrand(u, v):
        x, dx = curve1.eval_batch(u)
        y, dy = curve2.eval_batch(v)
        grid = _kernels.bm_grid(x, dx, y, dy)
        return grid * (scale * form1.coeff_batch(u))[:, None] * form2.coeff_batch(v)[None, :]

    return integrate_pv(
        integrand, dom_a, dom_b,
        (tuple(form1.poles), tuple(form2.poles)), cfg,
        geom_a=lambda u: curve1.eval_batch(u)[0],
        geom_b=lambda v: curve2.eval_batch(v)[0],
        decay_order=2)


def line_holo_closed(e1, e2, e3, c1, c2, constants):
    """Closed form for two complex lines: kappa_line * c1 * c2 / det3(e1,e2,e3).

    e1, e2 are the line directions, e3 joins their base points, and c1, c2
    are the pairings of each direction with its line's one-form. kappa_line
    comes from the calibrated constants.
    """
    e1 = np.asarray(e1, dtype=complex)
    e2 = np.asarray(e2, dtype=complex)
    e3 = np.asarray(e3, dtype=complex)
    d = complex(det3(e1, e2, e3))
    scale = (np.linalg.norm(e1) * np.linalg.norm(e2) * np.linalg.norm(e3))
    if abs(d) <= 1e-12 * max(scale, 1e-300):
        raise DegenerateConfiguration(
            "complex lines intersect or are parallel (det3 = 0)")
    return constants.kappa_line * complex(c1) * complex(c2) / d


def complex_linking_number(curve1, curve2, ctx, cfg):
    """Theta-independent linking energy: the double integral of

        C3 * |det3(z-w, dz, dw)|^2 / ||z-w||^6

    over both curve domains (area measure, factor 4). Real and positive.
    """
    _require_complex_pair(curve1, curve2, "complex_linking_number")
    dom_a = domain_for_curve(curve1, cfg)
    dom_b = domain_for_curve(curve2, cfg)
    scale = AREA_FACTOR * ctx.prefactor

    def integrand(u, v):
        x, dx = curve1.eval_batch(u)
        y, dy = curve2.eval_batch(v)
        return scale * _kernels.clink_grid(x, dx, y, dy)

    return integrate_pv(
        integrand, dom_a, dom_b, ((), ()), cfg,
        geom_a=lambda u: curve1.eval_batch(u)[0],
        geom_b=lambda v: curve2.eval_batch(v)[0],
        decay_order=2)


# ---------------------------------------------------------------------------
# sphere reproduction

_COMPLEMENT = ((1, 2), (0, 2), (0, 1))


def _sphere_chart(w0, eps, alpha, beta, p1, p2, p3):
    """Point offsets and the five tangent vectors of the round 5-sphere chart

        zeta = eps * (cos a e^{i p1}, sin a cos b e^{i p2}, sin a sin b e^{i p3})
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    e1, e2, e3 = np.exp(1j * p1), np.exp(1j * p2), np.exp(1j * p3)
    zeta = np.stack([ca * e1, sa * cb * e2, sa * sb * e3], axis=-1) * eps
    zero = np.zeros_like(e1)
    t_alpha = np.stack([-sa * e1, ca * cb * e2, ca * sb * e3], axis=-1) * eps
    t_beta = np.stack([zero, -sa * sb * e2, sa * cb * e3], axis=-1) * eps
    t_p1 = np.stack([1j * ca * e1, zero, zero], axis=-1) * eps
    t_p2 = np.stack([zero, 1j * sa * cb * e2, zero], axis=-1) * eps
    t_p3 = np.stack([zero, zero, 1j * sa * sb * e3], axis=-1) * eps
    tangents = np.stack([t_alpha, t_beta, t_p1, t_p2, t_p3], axis=-2)
    return zeta, tangents


def bm_reproduce(f, w0, eps, cfg):
    """Integrate f against the kernel 5-form over the radius-eps sphere
    around w0 and return the reproduced value (contract: -> f(w0) as
    eps -> 0 for polynomial f).

    Fixed-order tensor Gauss-Legendre product rule, cfg.panel_order nodes
    per axis: the integrand is smooth and periodic, and a single
    high-order panel keeps the error eps-dominated instead of
    roundoff-dominated.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    w0 = np.asarray(w0, dtype=complex).reshape(3)
    order = max(int(cfg.panel_order), 4)
    g, wts = leggauss(order)
    half = 0.25 * np.pi * (g + 1.0)      # [0, pi/2]
    full = np.pi * (g + 1.0)             # [0, 2 pi]
    jac = (0.25 * np.pi) ** 2 * np.pi ** 3

    alpha, beta, p1, p2, p3 = np.meshgrid(half, half, full, full, full,
                                          indexing="ij")
    weight = (wts[:, None, None, None, None] * wts[None, :, None, None, None]
              * wts[None, None, :, None, None] * wts[None, None, None, :, None]
              * wts[None, None, None, None, :]).ravel()
    zeta, tangents = _sphere_chart(w0, eps, alpha.ravel(), beta.ravel(),
                                   p1.ravel(), p2.ravel(), p3.ravel())

    total = np.zeros(zeta.shape[0], dtype=complex)
    rows = np.empty(zeta.shape[:-1] + (5, 5), dtype=complex)
    for r, (a, b) in enumerate(_COMPLEMENT):
        rows[..., 0, :] = np.conj(tangents[..., a])
        rows[..., 1, :] = np.conj(tangents[..., b])
        rows[..., 2, :] = tangents[..., 0]
        rows[..., 3, :] = tangents[..., 1]
        rows[..., 4, :] = tangents[..., 2]
        total += (-1.0) ** r * np.conj(zeta[..., r]) * np.linalg.det(rows)

    values = np.asarray(f(w0[None, :] + zeta), dtype=complex).reshape(-1)
    raw = np.sum(weight * values * total) / eps ** 6 * jac
    return complex(raw * SPHERE_NORMALIZER)
