"""Scene JSON: load, validate, save.

Layout: a UTF-8 JSON object with keys `curves`, `forms`, `ambient`,
`cuts`, `constants`, plus optional `scene_id` and `atiyah`. Complex
numbers are two-element arrays [re, im] (bare numbers are accepted on
input); three-variable polynomials are term lists
{"exponents": [i, j, k], "coeff": [re, im]} and one-variable polynomials
use single-entry exponent lists. Every parse error names the JSON path
of the offending field.
"""

import json

import numpy as np

from .errors import SceneInvalid
from .geometry import (AmbientForm, NormalizationConstants, OneForm,
                       ParamCurve, Poly3, Scene, SurfaceCut, poly_trim,
                       validate_scene)


def _complex_in(value, path):
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise SceneInvalid(path, f"expected a number or [re, im] pair, got {value!r}")


def _complex_out(value):
    value = complex(value)
    return [value.real, value.imag]


def _vector_in(value, path, n=3):
    if not isinstance(value, list) or len(value) != n:
        raise SceneInvalid(path, f"expected a list of {n} numbers")
    return [_complex_in(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _terms_in(value, path, nvars):
    if not isinstance(value, list) or not value:
        raise SceneInvalid(path, "expected a non-empty list of terms")
    terms = []
    for i, term in enumerate(value):
        tpath = f"{path}[{i}]"
        if not isinstance(term, dict):
            raise SceneInvalid(tpath, "expected an object with exponents and coeff")
        exps = term.get("exponents")
        if (not isinstance(exps, list) or len(exps) != nvars
                or not all(isinstance(e, int) and e >= 0 for e in exps)):
            raise SceneInvalid(tpath + ".exponents",
                               f"expected {nvars} non-negative integers")
        if "coeff" not in term:
            raise SceneInvalid(tpath + ".coeff", "missing coefficient")
        terms.append((tuple(exps), _complex_in(term["coeff"], tpath + ".coeff")))
    return terms


def _poly3_in(value, path):
    return Poly3.from_terms(_terms_in(value, path, 3))


def _poly1_in(value, path):
    terms = _terms_in(value, path, 1)
    deg = max(e[0] for e, _ in terms)
    coeffs = np.zeros(deg + 1, dtype=complex)
    for (k,), c in terms:
        coeffs[k] += c
    return coeffs


def _poly3_out(poly):
    return [{"exponents": [int(e) for e in exps], "coeff": _complex_out(c)}
            for exps, c in zip(poly.exponents, poly.coeffs)]


def _poly1_out(coeffs):
    coeffs = poly_trim(np.asarray(coeffs, dtype=complex))
    return [{"exponents": [k], "coeff": _complex_out(c)}
            for k, c in enumerate(coeffs) if c != 0 or k == 0]


def _domain_in(value, path):
    if not isinstance(value, dict) or "type" not in value:
        raise SceneInvalid(path, "expected an object with a type field")
    kind = value["type"]
    if kind == "circle":
        return ("circle",)
    if kind == "disk":
        radius = value.get("radius")
        if not isinstance(radius, (int, float)) or radius <= 0:
            raise SceneInvalid(path + ".radius", "expected a positive number")
        return ("disk", float(radius))
    if kind == "rect":
        re = value.get("re")
        im = value.get("im")
        for key, pair in (("re", re), ("im", im)):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, (int, float)) for v in pair)
                    or not pair[0] < pair[1]):
                raise SceneInvalid(f"{path}.{key}",
                                   "expected [lo, hi] with lo < hi")
        return ("rect", float(re[0]), float(re[1]), float(im[0]), float(im[1]))
    raise SceneInvalid(path + ".type", f"unknown domain type {kind!r}")


def _domain_out(domain):
    if domain[0] == "circle":
        return {"type": "circle"}
    if domain[0] == "disk":
        return {"type": "disk", "radius": domain[1]}
    return {"type": "rect", "re": [domain[1], domain[2]],
            "im": [domain[3], domain[4]]}


def _real_rows_in(value, path, allow_empty=False):
    if value is None and allow_empty:
        return []
    if not isinstance(value, list):
        raise SceneInvalid(path, "expected a list of 3-vectors")
    rows = []
    for i, row in enumerate(value):
        vec = _vector_in(row, f"{path}[{i}]")
        for j, v in enumerate(vec):
            if v.imag != 0.0:
                raise SceneInvalid(f"{path}[{i}][{j}]",
                                   "real_closed maps take real coefficients")
        rows.append([v.real for v in vec])
    return rows


def _curve_in(name, value, path):
    if not isinstance(value, dict):
        raise SceneInvalid(path, "expected a curve object")
    kind = value.get("kind")
    marked = [_complex_in(p, f"{path}.marked_points[{i}]")
              for i, p in enumerate(value.get("marked_points", []))]
    mp = value.get("map")
    if not isinstance(mp, dict):
        raise SceneInvalid(path + ".map", "expected a map object")
    if kind == "real_closed":
        const = value.get("map", {}).get("const", [0.0, 0.0, 0.0])
        const_vec = [v.real for v in _vector_in(const, path + ".map.const")]
        cos_rows = _real_rows_in(mp.get("cos"), path + ".map.cos", allow_empty=True)
        sin_rows = _real_rows_in(mp.get("sin"), path + ".map.sin", allow_empty=True)
        if not cos_rows and not sin_rows:
            raise SceneInvalid(path + ".map", "real_closed map needs cos or sin rows")
        marked_real = [p.real for p in marked]
        return ParamCurve.real_closed(const_vec, cos_rows, sin_rows,
                                      marked_points=marked_real)
    if kind == "complex_affine":
        comps = mp.get("components")
        if not isinstance(comps, list) or len(comps) != 3:
            raise SceneInvalid(path + ".map.components",
                               "expected three polynomial components")
        components = tuple(
            _poly1_in(c, f"{path}.map.components[{i}]")
            for i, c in enumerate(comps))
        domain = _domain_in(value.get("domain", {"type": "disk", "radius": 40.0}),
                            path + ".domain")
        if domain[0] == "circle":
            raise SceneInvalid(path + ".domain.type",
                               "complex_affine curves need a disk or rect domain")
        return ParamCurve.complex_affine(components, domain=domain,
                                         marked_points=marked)
    raise SceneInvalid(path + ".kind", f"unknown curve kind {kind!r}")


def _curve_out(curve):
    out = {"kind": curve.kind}
    if curve.kind == "real_closed":
        out["map"] = {"const": [float(v) for v in curve.const],
                      "cos": [[float(v) for v in row] for row in curve.cos_rows],
                      "sin": [[float(v) for v in row] for row in curve.sin_rows]}
        out["domain"] = {"type": "circle"}
        out["marked_points"] = [float(np.real(p)) for p in curve.marked_points]
    else:
        out["map"] = {"components": [_poly1_out(c) for c in curve.components]}
        out["domain"] = _domain_out(curve.domain)
        out["marked_points"] = [_complex_out(p) for p in curve.marked_points]
    return out


def _form_in(value, path, curves):
    if not isinstance(value, dict):
        raise SceneInvalid(path, "expected a form object")
    curve = value.get("curve")
    if not isinstance(curve, str) or curve not in curves:
        raise SceneInvalid(path + ".curve", f"unknown curve {curve!r}")
    coeff = value.get("coeff")
    if not isinstance(coeff, dict) or "numerator" not in coeff:
        raise SceneInvalid(path + ".coeff", "expected numerator (and optional denominator)")
    num = _poly1_in(coeff["numerator"], path + ".coeff.numerator")
    if "denominator" in coeff:
        den = _poly1_in(coeff["denominator"], path + ".coeff.denominator")
    else:
        den = np.ones(1, dtype=complex)
    poles = [_complex_in(p, f"{path}.poles[{i}]")
             for i, p in enumerate(value.get("poles", []))]
    return OneForm(curve, num, den, tuple(poles))


def _form_out(form):
    out = {"curve": form.curve,
           "coeff": {"numerator": _poly1_out(form.num)}}
    if not (form.den.size == 1 and form.den[0] == 1.0):
        out["coeff"]["denominator"] = _poly1_out(form.den)
    out["poles"] = [_complex_out(p) for p in form.poles]
    return out


def _ambient_in(value, path):
    if not isinstance(value, dict) or "numerator" not in value:
        raise SceneInvalid(path, "expected numerator (and optional denominator)")
    num = _poly3_in(value["numerator"], path + ".numerator")
    if "denominator" in value:
        den = _poly3_in(value["denominator"], path + ".denominator")
    else:
        den = Poly3.constant(1.0)
    return AmbientForm(num, den)


def _ambient_out(ambient):
    out = {"numerator": _poly3_out(ambient.num)}
    if not (ambient.den.coeffs.size == 1
            and ambient.den.coeffs[0] == 1.0
            and not ambient.den.exponents.any()):
        out["denominator"] = _poly3_out(ambient.den)
    return out


def _cut_in(value, path, curves):
    if not isinstance(value, dict):
        raise SceneInvalid(path, "expected a cut object")
    if "F1" not in value:
        raise SceneInvalid(path + ".F1", "missing cut polynomial")
    f1 = _poly3_in(value["F1"], path + ".F1")
    f2 = _poly3_in(value["F2"], path + ".F2") if "F2" in value else None
    contains = value.get("contains_curve")
    if not isinstance(contains, str) or contains not in curves:
        raise SceneInvalid(path + ".contains_curve", f"unknown curve {contains!r}")
    return SurfaceCut(f1, f2, contains)


def _cut_out(cut):
    out = {"F1": _poly3_out(cut.f1)}
    if cut.f2 is not None:
        out["F2"] = _poly3_out(cut.f2)
    out["contains_curve"] = cut.contains_curve
    return out


def _constants_in(value, path):
    if not isinstance(value, dict):
        raise SceneInvalid(path, "expected a constants object")
    out = {}
    if "C3" in value:
        if not isinstance(value["C3"], (int, float)):
            raise SceneInvalid(path + ".C3", "expected a number")
        out["C3"] = value["C3"]
    for key in ("kappa_line", "kappa_xmethod"):
        if value.get(key) is not None:
            out[key] = _complex_out(_complex_in(value[key], f"{path}.{key}"))
    return NormalizationConstants.from_dict(out)


def _atiyah_in(value, path):
    if not isinstance(value, dict):
        raise SceneInvalid(path, "expected an object with l and p arrays")
    out = {}
    for key in ("l", "p"):
        rows = value.get(key)
        if not isinstance(rows, list) or len(rows) != 4:
            raise SceneInvalid(f"{path}.{key}", "expected four linear forms")
        out[key] = np.array(
            [_vector_in(r, f"{path}.{key}[{i}]", n=4) for i, r in enumerate(rows)],
            dtype=complex)
    return out


def _atiyah_out(atiyah):
    return {key: [[_complex_out(v) for v in row] for row in np.asarray(rows)]
            for key, rows in atiyah.items()}


def loads_scene(text, scene_id="scene"):
    """Parse and validate a scene from a JSON string."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneInvalid("$", f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SceneInvalid("$", "top level must be an object")
    if "curves" not in data or not isinstance(data["curves"], dict) or not data["curves"]:
        raise SceneInvalid("curves", "expected a non-empty object of curves")

    curves = {}
    for name, cdef in data["curves"].items():
        curves[name] = _curve_in(name, cdef, f"curves.{name}")

    forms = {}
    for name, fdef in data.get("forms", {}).items():
        forms[name] = _form_in(fdef, f"forms.{name}", curves)

    ambient = None
    if data.get("ambient") is not None:
        ambient = _ambient_in(data["ambient"], "ambient")

    cuts = {}
    cut_data = data.get("cuts", {})
    if not isinstance(cut_data, dict):
        raise SceneInvalid("cuts", "expected an object of named cuts")
    for name, cdef in cut_data.items():
        cuts[name] = _cut_in(cdef, f"cuts.{name}", curves)

    constants = None
    if data.get("constants") is not None:
        constants = _constants_in(data["constants"], "constants")

    atiyah = None
    if data.get("atiyah") is not None:
        atiyah = _atiyah_in(data["atiyah"], "atiyah")

    scene = Scene(curves=curves, forms=forms, ambient=ambient, cuts=cuts,
                  constants=constants, atiyah=atiyah,
                  scene_id=str(data.get("scene_id", scene_id)))
    return validate_scene(scene)


def load_scene(path):
    """Load and validate a scene from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SceneInvalid("$", f"cannot read {path}: {exc}") from exc
    import os
    default_id = os.path.splitext(os.path.basename(str(path)))[0]
    return loads_scene(text, scene_id=default_id)


def scene_to_dict(scene):
    out = {"scene_id": scene.scene_id,
           "curves": {name: _curve_out(c) for name, c in scene.curves.items()}}
    if scene.forms:
        out["forms"] = {name: _form_out(f) for name, f in scene.forms.items()}
    if scene.ambient is not None:
        out["ambient"] = _ambient_out(scene.ambient)
    if scene.cuts:
        out["cuts"] = {name: _cut_out(c) for name, c in scene.cuts.items()}
    if scene.constants is not None:
        out["constants"] = scene.constants.to_dict()
    if scene.atiyah is not None:
        out["atiyah"] = _atiyah_out(scene.atiyah)
    return out


def dumps_scene(scene):
    """Serialize a scene to a JSON string (round-trips through loads_scene)."""
    return json.dumps(scene_to_dict(scene), indent=2)


def save_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_scene(scene))
        fh.write("\n")
