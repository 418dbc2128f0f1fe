"""Residue route: lift a curve's one-form to a rational 3-form with
double-pole along a complete-intersection cut, take iterated residues,
and sum simple-pole residues over the cut surface's intersections with
the second curve. Includes the projective two-line example computed in
affine charts with an automatic chart change for intersection points at
infinity.

Residue convention: res(du/u) = 1 (no 2*pi*i factor anywhere); any
route-global constant relating this to the kernel double integral lives
in the calibrated kappa_xmethod.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (DependentGradients, IdenticallyZero, LinesIntersect,
                     MultiplierNotPolynomial, NonGenericHyperplanes,
                     NonSimpleRoot, PoleCollision)
from .geometry import Poly3, det3, poly_deg, poly_trim

RESIDUAL_TOL = 1e-10     # |F(root)| relative to max coefficient magnitude
DERIVATIVE_TOL = 1e-8    # |F'(root)| relative to the same scale


@dataclass(frozen=True)
class PolyMultiplier:
    """Polynomial of a linear functional: M(z) = m(a . z + b).

    Degree-0 instances ignore (a, b); higher degrees tie the functional to
    a line's parameter so that M restricts to the fitted 1-D polynomial.
    """

    coeffs: np.ndarray
    a: np.ndarray
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "coeffs", poly_trim(np.asarray(self.coeffs, dtype=complex)))
        object.__setattr__(self, "a", np.asarray(self.a, dtype=complex).reshape(3))
        object.__setattr__(self, "b", complex(self.b))

    @classmethod
    def constant(cls, value):
        return cls(np.array([value], dtype=complex), np.zeros(3), 0.0)

    @property
    def degree(self):
        return poly_deg(self.coeffs)

    def __call__(self, points):
        pts = np.asarray(points, dtype=complex)
        s = pts @ self.a + self.b
        return P.polyval(s, self.coeffs)

    def compose_curve(self, components):
        """Ascending coefficients of M(gamma(t)) for a polynomial curve."""
        s_of_t = np.array([self.b], dtype=complex)
        for ai, comp in zip(self.a, components):
            s_of_t = P.polyadd(s_of_t, ai * np.asarray(comp, dtype=complex))
        total = np.zeros(1, dtype=complex)
        for k, ck in enumerate(self.coeffs):
            if ck != 0.0:
                total = P.polyadd(total, ck * P.polypow(s_of_t, k))
        return poly_trim(total, tol=0.0)


@dataclass(frozen=True)
class LiftedThreeForm:
    """Rational 3-form multiplier * base / (f1 * f2) with double pole along
    the cut {f1 = 0, f2 = 0}."""

    base: object          # AmbientForm
    f1: Poly3
    f2: Poly3
    multiplier: PolyMultiplier


@dataclass(frozen=True)
class IntersectionSet:
    """Simple intersection parameters of a surface with a curve."""

    params: tuple
    multiplicities: tuple


def _polish_roots(coeffs, roots):
    deriv = P.polyder(coeffs)
    for _ in range(40):
        vals = P.polyval(roots, coeffs)
        dvals = P.polyval(roots, deriv)
        safe = np.abs(dvals) > 1e-300
        step = np.where(safe, vals / np.where(safe, dvals, 1.0), 0.0)
        roots = roots - step
        if np.all(np.abs(P.polyval(roots, coeffs)) <= 1e-13 * np.max(np.abs(coeffs))):
            break
    return roots


def _sorted_by_param(values):
    return tuple(sorted(values, key=lambda t: (round(t.real, 12), round(t.imag, 12))))


def curve_surface_intersections(f, curve):
    """All parameters t with f(gamma(t)) = 0 in the curve's working domain.

    Roots come from companion-matrix eigenvalues of the composed
    polynomial, Newton-polished to 1e-13 relative residual. Disk domains
    are truncation windows of an affine curve, so every finite root
    counts; rect domains are exact and filter. Raises IdenticallyZero when
    the curve lies inside the surface and NonSimpleRoot on tangency.
    """
    comp = poly_trim(f.compose_curve(curve.components))
    scale = float(np.max(np.abs(comp)))
    if scale <= 1e-250:
        raise IdenticallyZero("curve lies inside the surface (f(gamma) = 0)")
    comp = poly_trim(comp, tol=1e-14 * scale)
    if poly_deg(comp) == 0:
        return IntersectionSet((), ())
    roots = P.polyroots(comp)
    roots = _polish_roots(comp, roots)
    deriv = P.polyder(comp)
    params = []
    for r in roots:
        if curve.domain[0] == "rect" and not curve.in_domain(r):
            continue
        if abs(P.polyval(r, comp)) > RESIDUAL_TOL * scale:
            raise NonSimpleRoot(
                f"root {r} did not polish below {RESIDUAL_TOL} of scale")
        if abs(P.polyval(r, deriv)) < DERIVATIVE_TOL * scale:
            raise NonSimpleRoot(
                f"tangential intersection at t = {r}: |f'(gamma(t))| below "
                f"{DERIVATIVE_TOL} of scale")
        params.append(complex(r))
    params = _sorted_by_param(params)
    return IntersectionSet(params, (1,) * len(params))


def _sample_window(curve):
    if curve.domain[0] == "disk":
        half = min(0.5 * curve.domain[1], 10.0)
        return -half, half, 0.0
    x0, x1, y0, y1 = curve.domain[1:]
    return x0, x1, 0.5 * (y0 + y1)


def _chebyshev_params(curve, n):
    lo, hi, imag = _sample_window(curve)
    nodes = np.cos(np.pi * np.arange(n) / (n - 1))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes + 1j * imag


def double_leray_residue(lift, curve, params=None):
    """Coefficient samples of the iterated residue of the lifted form on
    the cut curve.

    At each parameter s the residue 1-form evaluates on gamma'(s) as
    M(z) * base_ratio(z) * det3(u1, u2, gamma'(s)) where (u1, u2) solve
    grad f_i(z) . u_j = delta_ij (minimum-norm). Returns (params, coeffs).
    """
    if params is None:
        params = _chebyshev_params(curve, 33)
    params = np.asarray(params, dtype=complex)
    pts, vel = curve.eval_batch(params)
    g1 = np.stack([g(pts) for g in lift.f1.grad()], axis=-1)
    g2 = np.stack([g(pts) for g in lift.f2.grad()], axis=-1)
    grads = np.stack([g1, g2], axis=-2)  # (n, 2, 3)
    sv = np.linalg.svd(grads, compute_uv=False)
    if np.any(sv[..., 1] <= 1e-10 * np.maximum(sv[..., 0], 1e-300)):
        raise DependentGradients(
            "cut gradients are linearly dependent along the curve")
    u = np.linalg.pinv(grads)  # (n, 3, 2): grads @ u = I2
    coeffs = (lift.multiplier(pts) * lift.base.ratio_batch(pts)
              * det3(u[..., 0], u[..., 1], vel))
    return params, coeffs


def lift_theta(cut, eta, theta1, curve1, degree_bound=8):
    """Lift of theta1 through the cut: fits the multiplier M so the
    iterated residue of M * eta / (f1 f2) restricted to curve1 reproduces
    theta1's coefficient to 1e-10 relative.

    The fit is a polynomial in the curve parameter on Chebyshev samples; a
    non-constant fit is pinned to ambient coordinates through the line's
    parameter functional, so non-line curves only support constant
    multipliers.
    """
    base_lift = LiftedThreeForm(eta, cut.f1, cut.f2, PolyMultiplier.constant(1.0))
    params, res_coeffs = double_leray_residue(base_lift, curve1)
    theta_coeffs = theta1.coeff_batch(params)
    if np.any(np.abs(res_coeffs) <= 1e-300):
        raise DependentGradients("iterated residue vanishes at a sample point")
    ratio = theta_coeffs / res_coeffs
    scale = max(1.0, float(np.max(np.abs(ratio))))

    deg = min(degree_bound, params.size - 2)
    unit = max(float(np.max(np.abs(params))), 1e-300)
    vander = np.vander(params / unit, deg + 1, increasing=True)
    fit, *_ = np.linalg.lstsq(vander, ratio, rcond=None)
    residual = float(np.max(np.abs(vander @ fit - ratio)))
    if residual > 1e-10 * scale:
        raise MultiplierNotPolynomial(
            f"multiplier fit residual {residual:.3e} exceeds 1e-10 of scale "
            f"at degree {deg}")
    fit = fit / unit ** np.arange(deg + 1)
    fit = poly_trim(fit, tol=1e-12 * max(float(np.max(np.abs(fit))), 1e-300))

    if poly_deg(fit) == 0:
        multiplier = PolyMultiplier.constant(fit[0])
    else:
        if not curve1.is_line:
            raise MultiplierNotPolynomial(
                "non-constant multiplier requires a degree-1 curve to pin "
                "the parameter as a linear functional of position")
        p0, e = curve1.line_frame()
        a = np.conj(e) / float(np.sum(e.real ** 2 + e.imag ** 2))
        multiplier = PolyMultiplier(fit, a, -complex(a @ p0))

    lift = LiftedThreeForm(eta, cut.f1, cut.f2, multiplier)
    _, check = double_leray_residue(lift, curve1, params)
    err = float(np.max(np.abs(check - theta_coeffs)))
    if err > 1e-10 * max(1.0, float(np.max(np.abs(theta_coeffs)))):
        raise MultiplierNotPolynomial(
            f"lift verification failed: residue differs from theta by {err:.3e}")
    return lift


def _eta_ratio_value(lift, eta, points):
    if lift.base is eta:
        return np.ones(np.asarray(points).shape[:-1], dtype=complex)
    return lift.base.ratio_batch(points) / eta.ratio_batch(points)


def residue_linking(lift, s2, eta):
    """Sum of simple-pole residues of the lifted form restricted to the
    second weighted curve.

    At each intersection t* of {f1 = 0} with curve2, the residue of
    theta2coeff(t) * M(gamma2(t)) * base/eta ratio / (f1(gamma2) f2(gamma2))
    is evaluated by the simple-pole formula with d/dt f1(gamma2) in the
    denominator. Terms are accumulated in sorted parameter order.
    """
    curve2, theta2 = s2
    inter = curve_surface_intersections(lift.f1, curve2)
    comp1 = poly_trim(lift.f1.compose_curve(curve2.components))
    dcomp1 = P.polyder(comp1)
    comp2 = poly_trim(lift.f2.compose_curve(curve2.components))
    scale2 = max(float(np.max(np.abs(comp2))), 1e-300)
    theta_scale = max(float(np.max(np.abs(theta2.den))), 1e-300)

    total = 0.0 + 0.0j
    for t in inter.params:
        f2_val = complex(P.polyval(t, comp2))
        if abs(f2_val) <= DERIVATIVE_TOL * scale2:
            raise PoleCollision(
                f"f2 vanishes at the f1-intersection t = {t}")
        if abs(complex(P.polyval(t, np.asarray(theta2.den, dtype=complex)))) \
                <= 1e-12 * theta_scale:
            raise PoleCollision(
                f"theta2 has a pole at the intersection t = {t}")
        pt = curve2.eval_batch(np.array([t]))[0][0]
        eta_ratio = complex(_eta_ratio_value(lift, eta, pt[None, :])[0])
        d1 = complex(P.polyval(t, dcomp1))
        theta_val = complex(theta2.coeff_batch(np.array([t]))[0])
        m_val = complex(lift.multiplier(pt[None, :])[0])
        total += theta_val * m_val * eta_ratio / (d1 * f2_val)
    return total


# ---------------------------------------------------------------------------
# rational-function residue bookkeeping (whole-curve pole accounting)

def compose_restriction(lift, curve2, theta2, eta):
    """Numerator and denominator coefficient arrays (ascending, in the
    curve2 parameter) of the full restricted 1-form coefficient

        theta2coeff * M(gamma2) * (base/eta ratio)(gamma2) / (f1 f2)(gamma2).
    """
    comps = curve2.components
    num = P.polymul(np.asarray(theta2.num, dtype=complex),
                    lift.multiplier.compose_curve(comps))
    num = P.polymul(num, lift.base.num.compose_curve(comps))
    num = P.polymul(num, eta.den.compose_curve(comps))
    den = P.polymul(np.asarray(theta2.den, dtype=complex),
                    lift.f1.compose_curve(comps))
    den = P.polymul(den, lift.f2.compose_curve(comps))
    den = P.polymul(den, lift.base.den.compose_curve(comps))
    den = P.polymul(den, eta.num.compose_curve(comps))
    return poly_trim(num), poly_trim(den)


def residue_at_infinity(num, den):
    """res at t = infinity of (num/den) dt, via the u = 1/t substitution:
    minus the coefficient of u^(deg den - deg num - 2)... computed from the
    Taylor series of the reversed-coefficient ratio at u = 0."""
    num = poly_trim(np.asarray(num, dtype=complex))
    den = poly_trim(np.asarray(den, dtype=complex))
    n, d = poly_deg(num), poly_deg(den)
    k = n + 1 - d
    if k < 0:
        return 0.0 + 0.0j
    rnum = num[::-1]
    rden = den[::-1]
    series = np.zeros(k + 1, dtype=complex)
    for i in range(k + 1):
        acc = rnum[i] if i < rnum.size else 0.0
        for j in range(i):
            if i - j < rden.size:
                acc -= series[j] * rden[i - j]
        series[i] = acc / rden[0]
    return -complex(series[k])


def rational_all_residues(num, den):
    """All finite simple-pole residues of (num/den) dt plus the residue at
    infinity: returns (poles, residues, res_inf). NonSimpleRoot on
    repeated or ill-conditioned denominator roots."""
    num = poly_trim(np.asarray(num, dtype=complex))
    den = poly_trim(np.asarray(den, dtype=complex))
    scale = float(np.max(np.abs(den)))
    roots = _polish_roots(den, P.polyroots(den))
    dden = P.polyder(den)
    poles, residues = [], []
    for r in _sorted_by_param([complex(r) for r in roots]):
        d = complex(P.polyval(r, dden))
        if abs(d) < DERIVATIVE_TOL * scale:
            raise NonSimpleRoot(f"denominator root {r} is not simple")
        poles.append(r)
        residues.append(complex(P.polyval(r, num)) / d)
    return poles, residues, residue_at_infinity(num, den)


# ---------------------------------------------------------------------------
# projective two-line example

def _canonical_nullspace_frame(rows):
    """Orthonormal-then-row-reduced basis of the 2-D nullspace of two
    4-vectors: pivots in coordinate order, pivot entries normalized to 1.
    Deterministic in the inputs; the earlier-pivot vector comes first."""
    a = np.asarray(rows, dtype=complex).reshape(2, 4)
    _, sv, vh = np.linalg.svd(a)
    if sv[1] <= 1e-12 * max(sv[0], 1e-300):
        raise LinesIntersect("cut hyperplanes do not intersect transversally")
    basis = vh[2:].conj()
    work = basis.copy()
    pivots = []
    row = 0
    for col in range(4):
        if row >= 2:
            break
        idx = row + int(np.argmax(np.abs(work[row:, col])))
        if abs(work[idx, col]) <= 1e-10:
            continue
        work[[row, idx]] = work[[idx, row]]
        work[row] = work[row] / work[row, col]
        for other in range(2):
            if other != row:
                work[other] = work[other] - work[other, col] * work[row]
        pivots.append(col)
        row += 1
    if row < 2:
        raise LinesIntersect("degenerate nullspace frame")
    return work[0], work[1]


def _lin_on_frame(form, q0, q1):
    """(c0, c1) with form(q0 + t q1) = c0 + c1 t."""
    return complex(form @ q0), complex(form @ q1)


def atiyah_p3(l_forms, p_forms, details=False):
    """Residue pairing of two disjoint lines in projective 3-space.

    l_forms = (l1, l2, l3, l4): linear forms in (z0..z3) cutting the lines
    L1 = {l1 = l2 = 0} and L2 = {l3 = l4 = 0}. p_forms = (p1..p4): the
    general-position hyperplanes weighting the ambient form 1/(p1 p2 p3 p4)
    and the line forms 1/(p1 p2), 1/(p3 p4).

    Restricted to L2 the ratio of the lifted form to the ambient form
    leaves theta0 / (l1 l2), with every p-factor cancelling in pairs; the
    value is the residue sum over {l1 = 0} on L2, chart-changed to reach
    an intersection point at infinity (where theta0 pulls back to -du).
    The p-cancellation is verified numerically at generic probe
    parameters (the residue point itself may sit on a p-hyperplane, which
    is harmless precisely because the factors cancel). Returns the value
    with the measured cancellation factor kept in; details=True returns
    (kept, reduced, ratio) so both assemblies can be reported.
    """
    L = np.asarray(l_forms, dtype=complex).reshape(4, 4)
    Pmat = np.asarray(p_forms, dtype=complex).reshape(4, 4)
    row_scale = np.prod(np.linalg.norm(L, axis=1))
    if abs(np.linalg.det(L)) <= 1e-10 * max(row_scale, 1e-300):
        raise LinesIntersect("the two lines meet (cut forms are dependent)")
    frame1 = _canonical_nullspace_frame(L[:2])
    q0, q1 = _canonical_nullspace_frame(L[2:])
    for i, p in enumerate(Pmat):
        pn = max(float(np.linalg.norm(p)), 1e-300)
        for qa, qb in (frame1, (q0, q1)):
            if max(abs(p @ qa), abs(p @ qb)) <= 1e-10 * pn:
                raise NonGenericHyperplanes(
                    f"hyperplane p{i + 1} contains one of the lines")

    c0, c1 = _lin_on_frame(L[0], q0, q1)
    lin_scale = max(abs(c0), abs(c1))
    if abs(c1) > 1e-12 * lin_scale:
        theta0 = 1.0            # chart z(t) = q0 + t q1, theta0 -> dt
        root = -c0 / c1
        deriv = c1
        point = q0 + root * q1
    else:
        theta0 = -1.0           # chart z(u) = u q0 + q1, theta0 -> -du
        u0, u1_ = complex(L[0] @ q1), complex(L[0] @ q0)
        root = -u0 / u1_
        deriv = u1_
        point = root * q0 + q1

    l2_val = complex(L[1] @ point)
    l_scale = float(np.linalg.norm(L[1]) * max(np.linalg.norm(point), 1e-300))
    if abs(l2_val) <= 1e-10 * l_scale:
        raise PoleCollision("l2 vanishes at the l1-intersection point")
    reduced = theta0 / (deriv * l2_val)

    # measure the p1..p4 cancellation (each p enters the lifted form once
    # above and once below) at generic probe points on the line
    probe_pts = (q0[None, :] + np.array([0.37, 1.21, -0.89])[:, None] * q1[None, :])
    probe_vals = probe_pts @ Pmat.T  # (3, 4)
    pscale = np.linalg.norm(Pmat, axis=1) * np.maximum(
        np.linalg.norm(probe_pts, axis=1)[:, None], 1e-300)
    good = np.all(np.abs(probe_vals) > 1e-10 * pscale, axis=1)
    if not np.any(good):
        raise NonGenericHyperplanes(
            "no generic probe point clear of all p-hyperplanes")
    ratios = (np.prod(probe_vals[good], axis=1)
              / (probe_vals[good, 0] * probe_vals[good, 1]
                 * probe_vals[good, 2] * probe_vals[good, 3]))
    cancellation = complex(np.mean(ratios))
    kept = reduced * cancellation
    if details:
        return kept, reduced, cancellation
    return kept
