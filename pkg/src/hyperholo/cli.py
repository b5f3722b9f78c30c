"""Command-line front end: ``hyperholo COMMAND SCENE [ARGS...]``.

Positional ARGS name scene objects or give numbers; ``key=value`` tokens set
options.  The report is written as JSON to stdout or ``--out``.  Exit status is
0 when every check passes, 1 when a check fails, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .connection import (
    HXConnection,
    behrend_fantechi,
    christoffel,
    delta_identities,
    foliation_frame,
    leibniz_anomaly,
    parallelism_report,
    pure_slot_curvature,
    restrict,
    tables_equal,
    tangent_block,
    torsion_report,
    vector_table_report,
)
from .courant import default_funcs, frame as standard_frame, verify_axioms
from .endo import complex_structure_check, hypercomplex_check, jacobiator_check, nijenhuis_table, poisson_of, sphere_structure
from .errors import (
    ConstructionError,
    HyperHoloError,
    NotQuaternionic,
    ParseError,
    SchemaError,
    UnknownCommand,
    UnknownName,
    UnresolvedReference,
)
from .holosym import (
    HyperPoisson,
    closedness_equivalences,
    decompose,
    deformation_family,
    from_triple,
    hyper_poisson_equivalence,
    roundtrip_report,
)
from .report import Report, serialize
from .scalars import GaussRat
from .scene import Scene, bundled_scenes, load_scene

INPUT_ERRORS = (SchemaError, ParseError, UnresolvedReference, UnknownCommand, UnknownName, ConstructionError, ValueError)
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class Call:
    """Positional arguments and key=value options of one command invocation."""

    def __init__(self, tokens):
        self.pos = [t for t in tokens if "=" not in t]
        self.opts = dict(t.split("=", 1) for t in tokens if "=" in t)

    def opt(self, key, default=None):
        return self.opts.get(key, default)

    def int_opt(self, key, default):
        v = self.opts.get(key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError as exc:
            raise ValueError(f"option {key} expects an integer, got {v!r}") from exc


def _lookup(scene: Scene, kind, name):
    if not scene.has(kind, name):
        raise UnknownName(f"no {kind[:-1]} named {name!r} in scene {scene.name}")
    return scene.get(kind, name)


def _triple(scene: Scene, names):
    names = list(names) or ["I", "J", "K"]
    if len(names) != 3:
        raise ValueError("a triple needs three endomorphism names")
    for n in names:
        _lookup(scene, "endos", n)
    return scene.triple(names), names


def _rational(text) -> GaussRat:
    try:
        return GaussRat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"expected a rational number, got {text!r}") from exc


def _nonzero(table):
    return {f"{a},{b}": v for (a, b), v in table.items() if not v.is_zero()}


# -- commands ------------------------------------------------------------------------


def cmd_verify_axioms(scene, call):
    return verify_axioms(scene.backend), None


def cmd_check_complex(scene, call):
    if len(call.pos) != 1:
        raise ValueError("check-complex takes one endomorphism name")
    name = call.pos[0]
    return complex_structure_check(_lookup(scene, "endos", name), name), None


def cmd_check_hypercomplex(scene, call):
    T, names = _triple(scene, call.pos)
    try:
        return hypercomplex_check(T), {"triple": names}
    except NotQuaternionic as exc:
        rep = Report("hypercomplex")
        rep.add("quaternionic relations", False, str(exc))
        return rep, {"triple": names}


def cmd_nijenhuis(scene, call):
    if len(call.pos) != 2:
        raise ValueError("nijenhuis takes two endomorphism names")
    F, G = (_lookup(scene, "endos", n) for n in call.pos)
    table = nijenhuis_table(F, G)
    nz = _nonzero(table)
    rep = Report(f"N({call.pos[0]},{call.pos[1]})")
    first = next(iter(nz.items()), None)
    rep.add(f"N({call.pos[0]},{call.pos[1]}) = 0 on frame pairs", not nz, None if first is None else {"pair": first[0], "value": first[1]})
    return rep, {"nonzero": nz}


def cmd_poisson_of(scene, call):
    if len(call.pos) != 1:
        raise ValueError("poisson-of takes one endomorphism name")
    F = _lookup(scene, "endos", call.pos[0])
    pi = poisson_of(F)
    fs = default_funcs(scene.backend)[:3]
    jac, rhs = jacobiator_check(F, *fs)
    rep = Report(f"poisson bivector of {call.pos[0]}")
    rep.add("Jacobiator = -1/4 N(F,F)(Df,Dg,Dh)", jac == rhs, {"jacobiator": jac, "nijenhuis": rhs})
    rep.info["jacobiator vanishes on samples"] = jac.is_zero()
    return rep, {"pi": pi}


def _connection(scene, call, check=True):
    T, names = _triple(scene, call.pos[:3])
    return HXConnection(T, check=check), names


def cmd_connection(scene, call):
    C, names = _connection(scene, call)
    rep = Report("hypercomplex connection")
    rep.extend(parallelism_report(C))
    fr = standard_frame(scene.backend)
    fs = default_funcs(scene.backend)
    f = fs[-1]
    for a in range(len(fr)):
        rep.extend(delta_identities(C, f, fr[a], fr[(a + 1) % len(fr)]), f"[{a}] ")
    w = None
    for a in range(len(fr)):
        for b in range(len(fr)):
            lhs, rhs = leibniz_anomaly(C, f, fr[a], fr[b])
            if lhs != rhs:
                w = w or {"pair": [a, b], "anomaly": lhs, "-Delta_f": rhs}
    rep.add("Leibniz anomaly = -Delta_f", w is None, w)
    return rep, {"triple": names, "nabla": _nonzero(christoffel(C))}


def cmd_torsion(scene, call):
    T, names = _triple(scene, call.pos[:3])
    C = HXConnection(T, check=False)
    rep = Report("torsion")
    rep.extend(torsion_report(C))
    rep.extend(torsion_report(C, balance=True))
    return rep, {"triple": names}


def cmd_curvature(scene, call):
    C, names = _connection(scene, call)
    return pure_slot_curvature(C), {"triple": names}


def _omega_for(scene, call, T, names):
    name = call.opt("omega")
    if name is not None:
        return _lookup(scene, "omegas", name)
    return from_triple(T, call.int_opt("orientation", 1))


def cmd_restrict(scene, call):
    if not call.pos:
        raise ValueError("restrict takes a frame name, optionally followed by a triple")
    fr = _lookup(scene, "frames", call.pos[0])
    T, names = _triple(scene, call.pos[1:4])
    mode = call.opt("mode", "dirac")
    orientation = call.int_opt("orientation", 1)
    C = HXConnection(T.oriented(orientation))
    holo = _omega_for(scene, call, T, names) if mode == "lagrangian" else None
    flat = call.opt("flat")
    res, rep = restrict(C, fr, mode, holo, None if flat is None else flat in ("1", "true", "yes"))
    rep.conventions.append(f"orientation {orientation}")
    return rep, res


def cmd_holosym_from_triple(scene, call):
    T, names = _triple(scene, call.pos)
    orientation = call.int_opt("orientation", 1)
    rep = roundtrip_report(T, orientation)
    H = from_triple(T, orientation, check=False)
    rep.conventions.append(f"orientation {orientation}")
    return rep, {"omega_sharp": H.omega_sharp.matrix, "omega": H.omega}


def _holo(scene, call):
    if len(call.pos) < 1:
        raise ValueError("expected the name of an omega declaration")
    return _lookup(scene, "omegas", call.pos[0])


def cmd_holosym_check(scene, call):
    H = _holo(scene, call)
    rep = Report("holomorphic symplectic")
    inv = H.invariants(closed=False)
    rep.extend(inv)
    if inv.ok:
        rep.extend(closedness_equivalences(H))
    return rep, {"omega": H.omega}


def cmd_decompose(scene, call):
    dec, rep = decompose(_holo(scene, call))
    return rep, dec


def cmd_sphere(scene, call):
    if len(call.pos) == 3:
        T, names = _triple(scene, [])
        nums = call.pos
    elif len(call.pos) == 6:
        T, names = _triple(scene, call.pos[:3])
        nums = call.pos[3:]
    else:
        raise ValueError("sphere takes l1 l2 l3, optionally preceded by a triple")
    S = sphere_structure(T, *(_rational(x) for x in nums))
    return complex_structure_check(S, "S"), {"matrix": S.matrix, "coefficients": nums}


def cmd_deform(scene, call):
    if len(call.pos) != 3:
        raise ValueError("deform takes an omega name and two rationals a b")
    H = _holo(scene, call)
    S, fr, rep = deformation_family(H, _rational(call.pos[1]), _rational(call.pos[2]))
    return rep, {"matrix": S.matrix, "frame": list(fr) if fr is not None else None}


def cmd_hyper_poisson(scene, call):
    names = call.pos or ["i", "j", "k", "pi1", "pi2", "pi3"]
    if len(names) != 6:
        raise ValueError("hyper-poisson takes i j k pi1 pi2 pi3")
    t = [_lookup(scene, "tangent_endos", n) for n in names[:3]]
    p = [_lookup(scene, "bivectors", n) for n in names[3:]]
    return hyper_poisson_equivalence(HyperPoisson(*t, *p)), {"names": names}


def cmd_bf_connection(scene, call):
    if len(call.pos) < 3:
        raise ValueError("bf-connection takes a 2-form, a tangent complex structure and frame vector fields")
    w = _lookup(scene, "forms", call.pos[0])
    j = _lookup(scene, "tangent_endos", call.pos[1])
    vs = [_lookup(scene, "bivectors", n) for n in call.pos[2:]]
    table = behrend_fantechi(w, j, vs)
    rep = Report("Behrend-Fantechi connection")
    rep.extend(vector_table_report(vs, table))
    conormals = call.opt("conormals")
    if conormals:
        names = call.opt("triple", "I,J,K").split(",")
        T, _ = _triple(scene, names)
        orientation = call.int_opt("orientation", -1)
        H = from_triple(T, orientation)
        L = foliation_frame(scene.backend, vs, [_lookup(scene, "forms", n) for n in conormals.split(",")])
        res, sub = restrict(HXConnection(T.oriented(orientation)), L, "lagrangian", H)
        rep.extend(sub, "restrict: ")
        other = tangent_block(res, vs)
        rep.add("equals restrict()", tables_equal(other, table), {"restrict": other, "formula": table})
        rep.conventions.append(f"orientation {orientation}")
    return rep, {"table": {f"{a},{b}": v for (a, b), v in table.items()}}


COMMANDS = {
    "verify-axioms": cmd_verify_axioms,
    "check-complex": cmd_check_complex,
    "check-hypercomplex": cmd_check_hypercomplex,
    "nijenhuis": cmd_nijenhuis,
    "poisson-of": cmd_poisson_of,
    "connection": cmd_connection,
    "torsion": cmd_torsion,
    "curvature": cmd_curvature,
    "restrict": cmd_restrict,
    "holosym-from-triple": cmd_holosym_from_triple,
    "holosym-check": cmd_holosym_check,
    "decompose": cmd_decompose,
    "sphere": cmd_sphere,
    "deform": cmd_deform,
    "hyper-poisson": cmd_hyper_poisson,
    "bf-connection": cmd_bf_connection,
    "report-all": None,
}


def _execute(command, scene, tokens):
    """(report, result) for one command; domain errors become an error check."""
    if command not in COMMANDS:
        raise UnknownCommand(f"unknown command {command!r}")
    if command == "report-all":
        return _report_all(scene)
    call = Call(tokens)
    try:
        return COMMANDS[command](scene, call)
    except INPUT_ERRORS:
        raise
    except (HyperHoloError, ZeroDivisionError) as exc:
        rep = Report(command)
        rep.error(type(exc).__name__, str(exc))
        return rep, None


def _report_all(scene):
    rep = Report(f"all checks of {scene.name}")
    results = []
    for c in scene.checks:
        sub, _ = _execute(c.command, scene, c.args)
        outcome = "pass" if sub.ok else "fail"
        label = " ".join([c.command] + c.args)
        rep.add(f"{label} (expect {c.expect})", outcome == c.expect, {"status": sub.status})
        results.append({"command": c.command, "args": c.args, "expect": c.expect, "report": sub})
    return rep, results


def run(command, scene_path, tokens=(), timing=True, witness_limit=None):
    """Run one command on a scene file; returns (exit code, JSON document)."""
    start = time.perf_counter()
    doc = {"schema": 1, "command": command, "scene": str(scene_path), "args": list(tokens)}
    try:
        scene = load_scene(scene_path)
        rep, result = _execute(command, scene, list(tokens))
    except INPUT_ERRORS as exc:
        doc.update({"status": "input-error", "error": {"type": type(exc).__name__, "message": str(exc)}})
        code = EXIT_INPUT
    except HyperHoloError as exc:
        doc.update({"status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}})
        code = EXIT_FAIL
    else:
        doc["status"] = rep.status
        doc["report"] = rep.to_json(witness_limit)
        if result is not None:
            doc["result"] = serialize(result, witness_limit)
        code = EXIT_PASS if rep.ok else EXIT_FAIL
    if timing:
        doc["seconds"] = round(time.perf_counter() - start, 3)
    return code, doc


def build_parser():
    p = argparse.ArgumentParser(prog="hyperholo", description="Exact verification of hypercomplex and holomorphic symplectic structures on Courant algebroids.")
    p.add_argument("--out", help="write the JSON report to this path")
    p.add_argument("--no-timing", action="store_true", help="omit the timing field")
    p.add_argument("--witness-limit", type=int, default=None, help="truncate witness strings to N characters")
    p.add_argument("--fixtures", action="store_true", help="list bundled scene files and exit")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    opts, rest = parser.parse_known_args(argv)
    if opts.fixtures:
        print("\n".join(bundled_scenes()))
        return EXIT_PASS
    bad = [t for t in rest if t.startswith("--")]
    if bad:
        parser.print_usage(sys.stderr)
        print(f"hyperholo: unknown option {bad[0]}", file=sys.stderr)
        return EXIT_INPUT
    if len(rest) < 2:
        parser.print_usage(sys.stderr)
        print("hyperholo: expected COMMAND SCENE [ARGS...]; commands: " + ", ".join(COMMANDS), file=sys.stderr)
        return EXIT_INPUT
    command, scene_path, tokens = rest[0], rest[1], rest[2:]
    code, doc = run(command, scene_path, tokens, timing=not opts.no_timing, witness_limit=opts.witness_limit)
    text = json.dumps(doc, indent=2) + "\n"
    if opts.out:
        with open(opts.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
