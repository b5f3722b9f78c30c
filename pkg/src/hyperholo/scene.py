"""Scene files: JSON descriptions of a backend and the named objects living on it.

Schema 1, top-level keys::

    schema          1
    name, description
    chart           list of coordinate names            (exactly one of chart /
    point_algebra   {labels, pairing, brackets}           point_algebra)
    twist           {"comps": {"a,b,c": expr}}
    tangent_endos   name -> n x n matrix of expressions
    endos           name -> {"matrix": 2n x 2n} | {"lift": tangent} | {"b_conjugate": [endo, form]} | {"product": [names]}
    forms           name -> {"degree": k, "comps": {"a,b": expr}}
    bivectors       name -> {"degree": k, "comps": {...}}  (multivector fields of any degree)
    sections        name -> list of rank expressions
    frames          name -> list of section names
    omegas          name -> {"triple": [I, J, K], "orientation": +-1} | {"J": name, "sharp": name}
    checks          list of {"command", "args", "expect"}

Brackets of a point algebra are given as ``"a,b": [coefficients]`` on basis indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .chartcalc import Chart, DiffForm, MultiVec, TanEndo, ext_d, form, multivec
from .courant import ChartBackend, PointBackend, Section, b_transform_matrix, lifted_matrix
from .eigencalc import certify
from .endo import Endo, Triple
from .errors import ConstructionError, ParseError, SchemaError, UnresolvedReference
from .linalg import Matrix
from .scalars import Scalar, parse

SCHEMA_VERSION = 1
TOP_KEYS = {
    "schema",
    "name",
    "description",
    "chart",
    "point_algebra",
    "twist",
    "endos",
    "tangent_endos",
    "forms",
    "bivectors",
    "sections",
    "frames",
    "omegas",
    "checks",
}
KINDS = ("tangent_endos", "endos", "forms", "bivectors", "sections", "frames", "omegas")
SCENE_DIR = Path(__file__).parent / "scenes"


def bundled_scenes():
    return sorted(p.name for p in SCENE_DIR.glob("*.json"))


def resolve_path(path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    alt = SCENE_DIR / p.name
    if alt.exists():
        return alt
    raise SchemaError(f"scene file {str(path)!r} not found")


@dataclass
class Check:
    command: str
    args: list
    expect: str = "pass"


@dataclass
class Scene:
    name: str
    backend: object
    raw: dict
    path: str = ""
    description: str = ""
    checks: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict)
    _active: set = field(default_factory=set)

    @property
    def chart(self) -> Chart | None:
        return getattr(self.backend, "chart", None)

    @property
    def vars(self):
        return tuple(self.backend.vars)

    def names(self, kind):
        return list(self.raw.get(kind, {}))

    def has(self, kind, name) -> bool:
        return name in self.raw.get(kind, {})

    def get(self, kind, name):
        key = (kind, name)
        if key in self._cache:
            return self._cache[key]
        spec = self.raw.get(kind, {})
        if name not in spec:
            raise UnresolvedReference(f"{kind[:-1] if kind.endswith('s') else kind} {name!r} is not declared")
        if key in self._active:
            raise UnresolvedReference(f"circular reference through {kind} {name!r}")
        self._active.add(key)
        try:
            value = _BUILD[kind](self, name, spec[name])
        finally:
            self._active.discard(key)
        self._cache[key] = value
        return value

    def tangent(self, name) -> TanEndo:
        return self.get("tangent_endos", name)

    def endo(self, name) -> Endo:
        return self.get("endos", name)

    def form(self, name) -> DiffForm:
        return self.get("forms", name)

    def multivector(self, name) -> MultiVec:
        return self.get("bivectors", name)

    def section(self, name) -> Section:
        return self.get("sections", name)

    def frame(self, name):
        return self.get("frames", name)

    def omega(self, name):
        return self.get("omegas", name)

    def triple(self, names=("I", "J", "K")) -> Triple:
        if len(names) != 3:
            raise SchemaError("a triple needs exactly three endomorphism names")
        return Triple(*(self.endo(n) for n in names))

    def validate(self):
        """Resolve every declared object once."""
        for kind in KINDS:
            for name in self.names(kind):
                self.get(kind, name)
        return self


def _where(kind, name):
    return f"{kind}.{name}"


def _expr(scene: Scene, text, where) -> Scalar:
    if not isinstance(text, (str, int)):
        raise SchemaError(f"{where}: expected an expression string, got {type(text).__name__}")
    try:
        return parse(str(text), scene.vars)
    except ParseError as exc:
        message = str(exc.args[0]).rsplit(" at position", 1)[0]
        raise type(exc)(f"{where}: {message}", exc.text, exc.pos) from exc


def _matrix(scene: Scene, rows, size, where) -> Matrix:
    if not isinstance(rows, list) or len(rows) != size or any(not isinstance(r, list) or len(r) != size for r in rows):
        raise SchemaError(f"{where}: expected a {size}x{size} matrix")
    return Matrix(scene.vars, [[_expr(scene, x, f"{where}[{a}][{b}]") for b, x in enumerate(r)] for a, r in enumerate(rows)])


def _require_chart(scene: Scene, where):
    if scene.chart is None:
        raise SchemaError(f"{where}: needs a chart backend")
    return scene.chart


def _indices(key, dim, where):
    try:
        idx = tuple(int(s) for s in str(key).split(",")) if str(key) else ()
    except ValueError as exc:
        raise SchemaError(f"{where}: bad index key {key!r}") from exc
    if any(a < 0 or a >= dim for a in idx):
        raise SchemaError(f"{where}: index out of range in {key!r}")
    return idx


def _tensor_comps(scene, spec, degree, dim, where):
    comps = spec.get("comps", {})
    if not isinstance(comps, dict):
        raise SchemaError(f"{where}: comps must be an object")
    out = {}
    for k, v in comps.items():
        idx = _indices(k, dim, where)
        if len(idx) != degree:
            raise SchemaError(f"{where}: key {k!r} does not have {degree} indices")
        out[idx] = _expr(scene, v, f"{where}.comps[{k}]")
    return out


def _build_tangent(scene, name, spec):
    chart = _require_chart(scene, _where("tangent_endos", name))
    return TanEndo(chart, _matrix(scene, spec, chart.dim, _where("tangent_endos", name)))


def _build_endo(scene, name, spec):
    where = _where("endos", name)
    B = scene.backend
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SchemaError(f"{where}: expected exactly one of matrix, lift, b_conjugate, product")
    (kind, val), = spec.items()
    if kind == "matrix":
        return Endo(B, _matrix(scene, val, B.rank, where))
    if kind == "lift":
        _require_chart(scene, where)
        return Endo(B, lifted_matrix(B, scene.tangent(val).matrix))
    if kind == "b_conjugate":
        _require_chart(scene, where)
        if not isinstance(val, list) or len(val) != 2:
            raise SchemaError(f"{where}: b_conjugate takes [endo, form]")
        E, bf = scene.endo(val[0]), scene.form(val[1])
        if bf.degree != 2:
            raise SchemaError(f"{where}: B-field must be a 2-form")
        if not ext_d(bf).is_zero():
            raise ConstructionError(f"{where}: B-field {val[1]!r} is not closed")
        return Endo(B, b_transform_matrix(B, bf) @ E.matrix @ b_transform_matrix(B, -bf))
    if kind == "product":
        if not isinstance(val, list) or not val:
            raise SchemaError(f"{where}: product takes a non-empty list of names")
        out = scene.endo(val[0])
        for n in val[1:]:
            out = out @ scene.endo(n)
        return out
    raise SchemaError(f"{where}: unknown endomorphism kind {kind!r}")


def _build_form(scene, name, spec):
    where = _where("forms", name)
    chart = _require_chart(scene, where)
    if not isinstance(spec, dict) or "degree" not in spec:
        raise SchemaError(f"{where}: expected {{degree, comps}}")
    return form(chart, spec["degree"], _tensor_comps(scene, spec, spec["degree"], chart.dim, where))


def _build_multivector(scene, name, spec):
    where = _where("bivectors", name)
    chart = _require_chart(scene, where)
    if not isinstance(spec, dict) or "degree" not in spec:
        raise SchemaError(f"{where}: expected {{degree, comps}}")
    return multivec(chart, spec["degree"], _tensor_comps(scene, spec, spec["degree"], chart.dim, where))


def _build_section(scene, name, spec):
    where = _where("sections", name)
    r = scene.backend.rank
    if not isinstance(spec, list) or len(spec) != r:
        raise SchemaError(f"{where}: expected a list of {r} expressions")
    return Section(scene.backend, [_expr(scene, x, f"{where}[{a}]") for a, x in enumerate(spec)])


def _build_frame(scene, name, spec):
    if not isinstance(spec, list) or not spec:
        raise SchemaError(f"{_where('frames', name)}: expected a non-empty list of section names")
    return certify(scene.backend, [scene.section(s) for s in spec], label=name)


def _build_omega(scene, name, spec):
    from .holosym import HoloSymp, from_triple

    where = _where("omegas", name)
    if not isinstance(spec, dict):
        raise SchemaError(f"{where}: expected an object")
    if "triple" in spec:
        T = scene.triple(spec["triple"])
        orientation = spec.get("orientation", 1)
        if orientation not in (1, -1):
            raise SchemaError(f"{where}: orientation must be 1 or -1")
        return from_triple(T, orientation, check=False)
    if "J" in spec and "sharp" in spec:
        return HoloSymp(scene.endo(spec["J"]), scene.endo(spec["sharp"]), orientation=spec.get("orientation", 1))
    raise SchemaError(f"{where}: expected triple or J + sharp")


_BUILD = {
    "tangent_endos": _build_tangent,
    "endos": _build_endo,
    "forms": _build_form,
    "bivectors": _build_multivector,
    "sections": _build_section,
    "frames": _build_frame,
    "omegas": _build_omega,
}


def _number(x):
    v = parse(str(x), ())
    return 0 if v.is_zero() else v.constant_value()


def _backend(raw: dict):
    if ("chart" in raw) == ("point_algebra" in raw):
        raise SchemaError("declare exactly one of chart and point_algebra")
    if "chart" in raw:
        coords = raw["chart"]
        if not isinstance(coords, list) or not coords or not all(isinstance(c, str) for c in coords):
            raise SchemaError("chart must be a non-empty list of coordinate names")
        if len(set(coords)) != len(coords):
            raise SchemaError("chart coordinates must be unique")
        try:
            chart = Chart(tuple(coords))
        except ValueError as exc:
            raise SchemaError(f"chart: {exc}") from exc
        twist = None
        if raw.get("twist") is not None:
            probe = Scene("", ChartBackend(chart), raw)
            spec = raw["twist"]
            if not isinstance(spec, dict) or "comps" not in spec:
                raise SchemaError("twist must be an object with comps")
            twist = form(chart, 3, _tensor_comps(probe, spec, 3, chart.dim, "twist"))
        return ChartBackend(chart, twist)
    pa = raw["point_algebra"]
    if not isinstance(pa, dict) or "pairing" not in pa:
        raise SchemaError("point_algebra needs labels, pairing and brackets")
    pairing = pa["pairing"]
    dim = len(pairing)
    gram = [[_number(x) for x in row] for row in pairing]
    structure = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for key, coeffs in pa.get("brackets", {}).items():
        a, b = _indices(key, dim, "point_algebra.brackets")
        if not isinstance(coeffs, list) or len(coeffs) != dim:
            raise SchemaError(f"point_algebra.brackets[{key}]: expected {dim} coefficients")
        structure[a][b] = [_number(x) for x in coeffs]
    return PointBackend(structure, gram, pa.get("labels"))


def scene_from_dict(raw: dict, path="") -> Scene:
    if not isinstance(raw, dict):
        raise SchemaError("scene must be a JSON object")
    if raw.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema {raw.get('schema')!r}; expected {SCHEMA_VERSION}")
    extra = set(raw) - TOP_KEYS
    if extra:
        raise SchemaError(f"unknown top-level keys: {sorted(extra)}")
    for kind in KINDS:
        if not isinstance(raw.get(kind, {}), dict):
            raise SchemaError(f"{kind} must be an object")
    seen = {}
    for kind in KINDS:
        for name in raw.get(kind, {}):
            if name in seen:
                raise SchemaError(f"name {name!r} declared in both {seen[name]} and {kind}")
            seen[name] = kind
    checks = []
    for c in raw.get("checks", []):
        if not isinstance(c, dict) or "command" not in c:
            raise SchemaError("each check needs a command")
        expect = c.get("expect", "pass")
        if expect not in ("pass", "fail"):
            raise SchemaError(f"check expect must be pass or fail, got {expect!r}")
        checks.append(Check(c["command"], [str(a) for a in c.get("args", [])], expect))
    return Scene(raw.get("name", Path(path).stem), _backend(raw), raw, str(path), raw.get("description", ""), checks)


def load_scene(path) -> Scene:
    p = resolve_path(path)
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{p.name}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    return scene_from_dict(raw, str(p)).validate()
