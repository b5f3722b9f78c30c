"""Regenerate the bundled scene files from the fixture builders.

Usage: python3 scripts/make_fixtures.py [OUTDIR]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from hyperholo import fixtures as F
from hyperholo.chartcalc import components
from hyperholo.holosym import omega_sharp_of
from hyperholo.scene import SCENE_DIR

TRIPLE_CHECKS = [
    {"command": "check-hypercomplex", "args": []},
    {"command": "connection", "args": []},
    {"command": "torsion", "args": []},
    {"command": "curvature", "args": []},
    {"command": "holosym-from-triple", "args": []},
]


def tensor(t):
    return {"degree": t.degree, "comps": {",".join(map(str, k)): str(v) for k, v in t.items()}}


def matrix(m):
    return m.to_text()


def base(fx, checks=()):
    B = fx.backend
    out = {"schema": 1, "name": fx.name, "description": fx.description}
    if B.kind == "chart":
        out["chart"] = list(B.chart.coords)
        if B.twist is not None:
            out["twist"] = {"comps": tensor(B.twist)["comps"]}
    if fx.tangent:
        out["tangent_endos"] = {k: matrix(v.matrix) for k, v in fx.tangent.items()}
    if fx.triple is not None:
        out["endos"] = {name: {"matrix": matrix(E.matrix)} for name, E in fx.triple.members()}
    out["checks"] = [dict(c) for c in checks]
    return out


def coordinate_sections(fx):
    B = fx.backend
    return {f"e{a}": [str(c) for c in s.coeffs] for a, s in enumerate(_frame(B))}


def _frame(B):
    from hyperholo.courant import frame

    return frame(B)


def flatq():
    fx = F.flatq()
    out = base(fx)
    out["endos"] = {name: {"lift": t} for name, t in zip("IJK", "ijk")}
    out["sections"] = coordinate_sections(fx)
    out["sections"]["x0e0"] = ["x0", "0", "0", "0", "0", "0", "0", "0"]
    out["frames"] = {"TM": ["e0", "e1", "e2", "e3"]}
    out["omegas"] = {"Omega": {"triple": ["I", "J", "K"], "orientation": 1}}
    out["checks"] = TRIPLE_CHECKS + [
        {"command": "verify-axioms", "args": []},
        {"command": "holosym-check", "args": ["Omega"]},
        {"command": "decompose", "args": ["Omega"]},
        {"command": "sphere", "args": ["3/5", "4/5", "0"]},
        {"command": "deform", "args": ["Omega", "1/2", "0"]},
        {"command": "restrict", "args": ["TM", "mode=dirac", "flat=1"]},
        {"command": "poisson-of", "args": ["I"]},
    ]
    return out


def c2std():
    fx = F.c2std()
    out = base(fx, TRIPLE_CHECKS)
    out["forms"] = {"omega1": tensor(fx.data["omega1"]), "omega2": tensor(fx.data["omega2"])}
    out["omegas"] = {"Omega": {"triple": ["I", "J", "K"], "orientation": 1}}
    out["checks"] += [
        {"command": "holosym-check", "args": ["Omega"]},
        {"command": "decompose", "args": ["Omega"]},
        {"command": "deform", "args": ["Omega", "1", "2"]},
    ]
    return out


def c2lag():
    fx = F.c2lag()
    out = base(fx)
    forms = {"omega": tensor(fx.data["omega"]), "omega1": tensor(fx.data["omega1"]), "omega2": tensor(fx.data["omega2"])}
    bivs = {}
    sections = {}
    frames = {}
    for key in ("flat", "twisted"):
        (Y,) = fx.data["foliations"][key]
        (a,) = fx.data["conormals01"][key]
        bivs[f"Y_{key}"] = tensor(Y)
        forms[f"conormal_{key}"] = tensor(a)
        n = fx.backend.n
        sections[f"sY_{key}"] = [str(c) for c in components(Y)] + ["0"] * n
        sections[f"sconormal_{key}"] = ["0"] * n + [str(c) for c in components(a)]
        frames[f"L_{key}"] = [f"sY_{key}", f"sconormal_{key}"]
    out.update(forms=forms, bivectors=bivs, sections=sections, frames=frames)
    out["omegas"] = {"Omega": {"triple": ["I", "J", "K"], "orientation": -1}}
    out["checks"] = [
        {"command": "holosym-from-triple", "args": ["orientation=-1"]},
        {"command": "bf-connection", "args": ["omega", "j", "Y_flat", "conormals=conormal_flat", "orientation=-1"]},
        {"command": "bf-connection", "args": ["omega", "j", "Y_twisted", "conormals=conormal_twisted", "orientation=-1"]},
        {"command": "restrict", "args": ["L_flat", "mode=lagrangian", "orientation=-1", "omega=Omega"]},
        {"command": "restrict", "args": ["L_twisted", "mode=lagrangian", "orientation=-1", "omega=Omega"]},
    ]
    return out


def hpt():
    fx = F.hpt()
    B = fx.backend
    brackets = {}
    for a in range(B.rank):
        for b in range(B.rank):
            c = B.structure[a][b]
            if any(not x.is_zero() for x in c):
                brackets[f"{a},{b}"] = [str(x) for x in c]
    out = base(fx, TRIPLE_CHECKS + [{"command": "verify-axioms", "args": []}, {"command": "sphere", "args": ["0", "3/5", "4/5"]}])
    out["point_algebra"] = {"labels": list(B.labels), "pairing": [[str(x) for x in r] for r in B.pairing], "brackets": brackets}
    out["sections"] = coordinate_sections(fx)
    return out


def flatq_b():
    fx = F.flatq_b()
    out = base(fx, TRIPLE_CHECKS)
    out["tangent_endos"] = {k: matrix(v.matrix) for k, v in F.flatq().tangent.items()}
    out["forms"] = {"B": tensor(fx.data["B"])}
    out["endos"] = {f"{n}0": {"lift": t} for n, t in zip("IJK", "ijk")}
    out["endos"].update({n: {"b_conjugate": [f"{n}0", "B"]} for n in "IJK"})
    out["omegas"] = {"Omega": {"triple": ["I", "J", "K"], "orientation": 1}}
    out["checks"] += [{"command": "holosym-check", "args": ["Omega"]}, {"command": "deform", "args": ["Omega", "0", "1"]}]
    return out


def nonint():
    fx = F.nonint()
    out = base(
        fx,
        [
            {"command": "check-hypercomplex", "args": [], "expect": "fail"},
            {"command": "nijenhuis", "args": ["I", "J"], "expect": "fail"},
            {"command": "torsion", "args": [], "expect": "fail"},
            {"command": "poisson-of", "args": ["F"]},
        ],
    )
    out["endos"]["F"] = {"matrix": matrix(fx.data["F_poisson"].matrix)}
    return out


def hp_kahler(broken=False):
    fx = F.hp_kahler(broken)
    expect = "fail" if broken else "pass"
    out = base(fx, [{"command": "hyper-poisson", "args": [], "expect": expect}])
    out["bivectors"] = {k: tensor(fx.data[k]) for k in ("pi1", "pi2", "pi3")}
    return out


def twist_c2():
    fx = F.twist_c2()
    out = base(fx, [{"command": "verify-axioms", "args": []}, {"command": "check-hypercomplex", "args": []}])
    return out


def twist_c3_neg():
    fx = F.twist_c3_neg()
    out = base(fx, [{"command": "verify-axioms", "args": []}, {"command": "check-complex", "args": ["J"], "expect": "fail"}])
    out["endos"] = {"J": {"lift": "j"}}
    return out


def broken_omega(coord):
    fx = F.broken_omega(coord)
    out = base(fx, [{"command": "holosym-check", "args": ["Omega"], "expect": "fail"}])
    out["endos"]["Os"] = {"matrix": matrix(omega_sharp_of(fx.triple).matrix)}
    out["omegas"] = {"Omega": {"J": "J", "sharp": "Os"}}
    return out


SCENES = {
    "flatq.json": flatq,
    "c2std.json": c2std,
    "c2lag.json": c2lag,
    "hpt.json": hpt,
    "flatq_b.json": flatq_b,
    "nonint.json": nonint,
    "hp_kahler.json": hp_kahler,
    "hp_kahler_broken.json": lambda: hp_kahler(True),
    "twist_c2.json": twist_c2,
    "twist_c3_neg.json": twist_c3_neg,
    "broken_omega_x0.json": lambda: broken_omega("x0"),
    "broken_omega_x2.json": lambda: broken_omega("x2"),
    "broken_omega_x3.json": lambda: broken_omega("x3"),
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    outdir = Path(argv[0]) if argv else SCENE_DIR
    outdir.mkdir(parents=True, exist_ok=True)
    for name, build in SCENES.items():
        (outdir / name).write_text(json.dumps(build(), indent=2) + "\n")
        print(outdir / name)


if __name__ == "__main__":
    main()
