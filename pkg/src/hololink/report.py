"""Method dispatch, applicability rules, reports, cross-checks, calibration.

A Report is the single output record of every computation: the value, its
error and tail estimates, convergence state, the constants and quadrature
configuration that produced it, and wall time. Reports serialize to JSON
(deterministic except wall_time_ms) and to fixed-column CSV.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import scenes as _scenes
from .errors import (CalibrationUnstable, MethodInapplicable, NumericalError,
                     SceneInvalid)
from .gauss import (Polyline3, crossing_linking, gauss_linking,
                    line_gauss_closed)
from .geometry import NormalizationConstants, poly_deg
from .holo import (BMContext, complex_linking_number, holo_linking_integral,
                   line_holo_closed)
from .quadrature import QuadConfig, QuadResult
from .residue import atiyah_p3, lift_theta, residue_linking

METHODS = (
    "gauss_integral", "gauss_crossing", "gauss_closed",
    "holo_integral", "holo_pv", "holo_closed",
    "residue", "complex_link", "atiyah",
)

# methods eligible for automatic cross-checking; complex_link measures a
# different (theta-independent) quantity and atiyah needs extra scene data,
# so both run only when asked for by name.
XCHECK_METHODS = (
    "gauss_integral", "gauss_crossing", "gauss_closed",
    "holo_integral", "holo_pv", "holo_closed", "residue",
)

CROSSING_SAMPLES = 512


@dataclass
class Report:
    scene_id: str
    method: str
    value: complex
    err_estimate: float
    tail_estimate: float
    converged: bool
    panels_evaluated: int
    constants: NormalizationConstants
    config: QuadConfig
    wall_time_ms: float = 0.0
    extra: dict = field(default_factory=dict)


def _config_dict(cfg):
    return {
        "tol": cfg.tol,
        "max_depth": cfg.max_depth,
        "panel_order": cfg.panel_order,
        "radius": cfg.truncation_radius,
    }


def report_to_dict(report):
    value = complex(report.value)
    return {
        "scene_id": report.scene_id,
        "method": report.method,
        "value": [value.real, value.imag],
        "err_estimate": float(report.err_estimate),
        "tail_estimate": float(report.tail_estimate),
        "converged": bool(report.converged),
        "panels_evaluated": int(report.panels_evaluated),
        "constants": report.constants.to_dict(),
        "config": _config_dict(report.config),
        "extra": report.extra,
        "wall_time_ms": float(report.wall_time_ms),
    }


def report_to_json(report):
    return json.dumps(report_to_dict(report), indent=2)


CSV_HEADER = ("scene_id,method,value_re,value_im,err_estimate,tail_estimate,"
              "converged,panels_evaluated,c3,kappa_line_re,kappa_line_im,"
              "kappa_xmethod_re,kappa_xmethod_im,tol,max_depth,panel_order,"
              "radius,wall_time_ms")


def report_to_csv_row(report):
    value = complex(report.value)
    consts = report.constants

    def cx(v):
        if v is None:
            return ["", ""]
        v = complex(v)
        return [repr(v.real), repr(v.imag)]

    cells = ([report.scene_id, report.method,
              repr(value.real), repr(value.imag),
              repr(float(report.err_estimate)),
              repr(float(report.tail_estimate)),
              str(bool(report.converged)).lower(),
              str(int(report.panels_evaluated)),
              repr(float(consts.c3))]
             + cx(consts.kappa_line) + cx(consts.kappa_xmethod)
             + [repr(report.config.tol), str(report.config.max_depth),
                str(report.config.panel_order),
                repr(report.config.truncation_radius),
                repr(float(report.wall_time_ms))])
    return ",".join(cells)


# ---------------------------------------------------------------------------
# applicability

def _query(scene):
    n1, n2 = scene.query_pair()
    return (n1, scene.curves[n1]), (n2, scene.curves[n2])


def _has_poles(curve, form):
    return bool(form.poles) or bool(curve.marked_points)


def _constant_coeff(form):
    return poly_deg(form.num) == 0 and poly_deg(form.den) == 0


def applicable_methods(scene):
    """The cross-checkable methods this scene supports, in canonical order.

    Real-curve methods apply only when the query curves carry no forms (a
    weighted pair is a holomorphic query); holomorphic methods need a form
    on each query curve. The residue route additionally needs the ambient
    form and a two-surface cut containing the first curve.
    """
    (n1, c1), (n2, c2) = _query(scene)
    f1, f2 = scene.form_for(n1), scene.form_for(n2)
    out = []

    no_forms = f1 is None and f2 is None
    both_real_closed = c1.kind == "real_closed" and c2.kind == "real_closed"
    both_complex = c1.kind == "complex_affine" and c2.kind == "complex_affine"
    both_real_lines = both_complex and c1.is_real_line and c2.is_real_line

    if no_forms and (both_real_closed or both_real_lines):
        out.append("gauss_integral")
    if no_forms and both_real_closed:
        out.append("gauss_crossing")
    if no_forms and both_real_lines:
        out.append("gauss_closed")

    weighted = both_complex and f1 is not None and f2 is not None
    if weighted:
        any_poles = _has_poles(c1, f1) or _has_poles(c2, f2)
        out.append("holo_pv" if any_poles else "holo_integral")
        if (c1.is_line and c2.is_line and not any_poles
                and _constant_coeff(f1) and _constant_coeff(f2)):
            out.append("holo_closed")
        cut = scene.cut_for(n1)
        if (scene.ambient is not None and cut is not None
                and cut.f2 is not None and not any_poles):
            out.append("residue")
    return out


def _require(cond, method, why):
    if not cond:
        raise MethodInapplicable(f"{method}: {why}")


# ---------------------------------------------------------------------------
# computation

def _line_data(scene, name1, c1, name2, c2):
    p1, e1 = c1.line_frame()
    p2, e2 = c2.line_frame()
    return p1, e1, p2, e2


def compute(scene, method, cfg, seed=0, include_cn=True):
    """Run one method on a scene's query pair and wrap the result."""
    if method not in METHODS:
        raise SceneInvalid("method", f"unknown method {method!r}; "
                                     f"choose from {METHODS}")
    (n1, c1), (n2, c2) = _query(scene)
    f1, f2 = scene.form_for(n1), scene.form_for(n2)
    consts = scene.constants or NormalizationConstants()
    ctx = BMContext(include_cn=include_cn)
    t0 = time.perf_counter()

    value = None
    err = tail = 0.0
    converged = True
    panels = 0
    extra = {}

    if method in ("gauss_integral", "gauss_crossing", "gauss_closed"):
        _require(f1 is None and f2 is None, method,
                 "query curves carry one-forms (holomorphic query)")

    if method == "gauss_integral":
        res = gauss_linking(c1, c2, cfg)
        value, err, tail = res.value, res.err_estimate, res.tail_estimate
        converged, panels = res.converged, res.panels_evaluated
    elif method == "gauss_crossing":
        _require(c1.kind == "real_closed" and c2.kind == "real_closed",
                 method, "needs two closed real curves")
        pl1 = Polyline3.from_curve(c1, CROSSING_SAMPLES)
        pl2 = Polyline3.from_curve(c2, CROSSING_SAMPLES)
        value = float(crossing_linking(pl1, pl2, seed=seed))
        extra = {"samples": CROSSING_SAMPLES}
    elif method == "gauss_closed":
        _require(c1.is_real_line and c2.is_real_line, method,
                 "needs two real lines")
        p1, e1, p2, e2 = _line_data(scene, n1, c1, n2, c2)
        value = line_gauss_closed(e1.real, e2.real, (p2 - p1).real)
    elif method in ("holo_integral", "holo_pv"):
        _require(c1.kind == "complex_affine" and c2.kind == "complex_affine",
                 method, "needs two complex curves")
        _require(f1 is not None and f2 is not None, method,
                 "needs a one-form on each query curve")
        any_poles = _has_poles(c1, f1) or _has_poles(c2, f2)
        if method == "holo_integral":
            _require(not any_poles, method,
                     "forms carry poles; use holo_pv")
        else:
            _require(any_poles, method, "no declared poles; use holo_integral")
        res = holo_linking_integral((c1, f1), (c2, f2), ctx, cfg)
        value, err, tail = res.value, res.err_estimate, res.tail_estimate
        converged, panels = res.converged, res.panels_evaluated
    elif method == "holo_closed":
        _require(c1.is_line and c2.is_line, method, "needs two complex lines")
        _require(f1 is not None and f2 is not None, method,
                 "needs a one-form on each query curve")
        _require(_constant_coeff(f1) and _constant_coeff(f2), method,
                 "needs constant-coefficient forms")
        _require(consts.kappa_line is not None, method,
                 "needs calibrated constants (kappa_line)")
        p1, e1, p2, e2 = _line_data(scene, n1, c1, n2, c2)
        coeff1 = f1.num[0] / f1.den[0]
        coeff2 = f2.num[0] / f2.den[0]
        value = line_holo_closed(e1, e2, p2 - p1, coeff1, coeff2, consts)
    elif method == "residue":
        _require(c1.kind == "complex_affine" and c2.kind == "complex_affine",
                 method, "needs two complex curves")
        _require(f1 is not None and f2 is not None, method,
                 "needs a one-form on each query curve")
        _require(scene.ambient is not None, method, "needs an ambient form")
        cut = scene.cut_for(n1)
        _require(cut is not None and cut.f2 is not None, method,
                 "needs a two-surface cut containing the first curve")
        lift = lift_theta(cut, scene.ambient, f1, c1)
        value = residue_linking(lift, (c2, f2), scene.ambient)
    elif method == "complex_link":
        _require(c1.kind == "complex_affine" and c2.kind == "complex_affine",
                 method, "needs two complex curves")
        res = complex_linking_number(c1, c2, ctx, cfg)
        value, err, tail = res.value, res.err_estimate, res.tail_estimate
        converged, panels = res.converged, res.panels_evaluated
    elif method == "atiyah":
        _require(scene.atiyah is not None, method,
                 "scene declares no projective line data")
        kept, reduced, ratio = atiyah_p3(scene.atiyah["l"], scene.atiyah["p"],
                                         details=True)
        value = kept
        extra = {"reduced": [reduced.real, reduced.imag],
                 "cancellation": [complex(ratio).real, complex(ratio).imag]}

    ms = (time.perf_counter() - t0) * 1000.0
    return Report(scene_id=scene.scene_id, method=method, value=complex(value),
                  err_estimate=float(err), tail_estimate=float(tail),
                  converged=bool(converged), panels_evaluated=int(panels),
                  constants=consts, config=cfg, wall_time_ms=ms, extra=extra)


# ---------------------------------------------------------------------------
# cross-check

@dataclass
class CrossCheck:
    scene_id: str
    verdict: str
    reports: list
    checks: list
    failures: list


def xcheck(scene, cfg, seed=0, include_cn=True):
    """Run every applicable method and compare all pairs.

    Residue values are converted to the integral normalization through
    kappa_xmethod before comparison. A pair passes when the difference is
    within three times the summed error and tail estimates (plus a machine
    -precision floor); any numerical failure is recorded and fails the
    check.
    """
    methods = applicable_methods(scene)
    if len(methods) < 2:
        raise MethodInapplicable(
            f"cross-check needs at least two applicable methods; scene "
            f"{scene.scene_id!r} supports {methods or 'none'}")
    consts = scene.constants or NormalizationConstants()
    if "residue" in methods and consts.kappa_xmethod is None:
        raise MethodInapplicable(
            "cross-check with the residue route needs calibrated constants "
            "(kappa_xmethod); run calibrate first")

    reports, failures = [], []
    for method in methods:
        try:
            reports.append(compute(scene, method, cfg, seed=seed,
                                   include_cn=include_cn))
        except NumericalError as exc:
            failures.append({"method": method,
                             "error": type(exc).__name__,
                             "message": str(exc)})

    comparable = []
    for rep in reports:
        value = rep.value
        if rep.method == "residue":
            value = value * consts.kappa_xmethod
        comparable.append((rep.method, value, rep.err_estimate,
                           rep.tail_estimate, rep.converged))

    checks = []
    verdict_ok = not failures
    for i in range(len(comparable)):
        for j in range(i + 1, len(comparable)):
            mi, vi, ei, ti, oki = comparable[i]
            mj, vj, ej, tj, okj = comparable[j]
            diff = abs(vi - vj)
            allowed = 3.0 * (ei + ti + ej + tj) \
                + 1e-9 * max(1.0, abs(vi), abs(vj))
            ok = bool(diff <= allowed and oki and okj)
            checks.append({"methods": [mi, mj], "diff": diff,
                           "allowed": allowed, "pass": ok})
            verdict_ok = verdict_ok and ok

    return CrossCheck(scene_id=scene.scene_id,
                      verdict="PASS" if verdict_ok else "FAIL",
                      reports=reports, checks=checks, failures=failures)


def xcheck_to_dict(result):
    return {
        "scene_id": result.scene_id,
        "verdict": result.verdict,
        "methods": [r.method for r in result.reports],
        "reports": [report_to_dict(r) for r in result.reports],
        "checks": [{"methods": c["methods"],
                    "diff": float(c["diff"]),
                    "allowed": float(c["allowed"]),
                    "pass": bool(c["pass"])} for c in result.checks],
        "failures": result.failures,
    }


# ---------------------------------------------------------------------------
# calibration

def calibrate(cfg, include_cn=True):
    """Measure the line constants on the reference line-pair scene.

    kappa_line is the tail-extrapolated holomorphic linking integral of the
    reference pair (truncation R with the engine's R-vs-2R step, so R = 40
    evaluates at 40 and 80). kappa_xmethod divides that by the same scene's
    raw residue-route value. Raises CalibrationUnstable when the two radii
    disagree beyond 1% or the integral fails to converge.
    """
    scene = _scenes.l0(radius=cfg.truncation_radius)
    (n1, c1), (n2, c2) = _query(scene)
    f1, f2 = scene.form_for(n1), scene.form_for(n2)
    ctx = BMContext(include_cn=include_cn)
    res = holo_linking_integral((c1, f1), (c2, f2), ctx, cfg)
    if not res.converged:
        raise CalibrationUnstable(
            f"reference integral did not converge within max_depth="
            f"{cfg.max_depth} (err estimate {res.err_estimate:.3e})")
    scale = max(abs(res.value), 1e-300)
    if res.tail_estimate > 0.01 * scale:
        raise CalibrationUnstable(
            f"truncation radii R={cfg.truncation_radius:g} and "
            f"R={2 * cfg.truncation_radius:g} disagree by "
            f"{res.tail_estimate / scale:.2%} (limit 1%)")
    kappa_line = complex(res.value)

    cut = scene.cut_for(n1)
    lift = lift_theta(cut, scene.ambient, f1, c1)
    raw = residue_linking(lift, (c2, f2), scene.ambient)
    if abs(raw) < 1e-12:
        raise CalibrationUnstable("reference residue value vanished")
    kappa_xmethod = kappa_line / raw
    return NormalizationConstants(kappa_line=kappa_line,
                                  kappa_xmethod=kappa_xmethod)
