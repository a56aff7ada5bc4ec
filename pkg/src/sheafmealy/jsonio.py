"""Canonical JSON encoding for every object the command line touches.

One serialization convention throughout: keys sorted, compact separators,
exact rationals as strings ("1/2", "3"), never floats in rectangle-union
payloads.  Writing is deterministic, so serialize, parse, serialize is
byte-identical; golden files can be compared directly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .epshelly import DepthReport, EpsilonInstance, epsilon_instance
from .errors import CheckerError
from .explain import Judge, Section, judge, section
from .localglobal import ObstructionReport, SeparationReport
from .systems import (
    Covering,
    MealySystem,
    OpenImmersion,
    SystemMorphism,
    covering,
    morphism,
    open_immersion,
    validate_system,
)
from .tame import (
    ProjectionJudge,
    Rect,
    RectUnion,
    RobustDisconnectionCertificate,
    SheafVerdict,
    union_from_payload,
)


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return (canonical_dumps(obj) + "\n").encode("utf-8")


def loads(text: str | bytes) -> Any:
    return json.loads(text)


# ---------------------------------------------------------------- systems

def system_payload(s: MealySystem) -> dict:
    rows = []
    for st in s.before:
        for c in s.inputs:
            s2, o = s.transition(st, c)
            rows.append({"s": st, "i": c, "s2": s2, "o": o})
    return {
        "before_states": list(s.before),
        "after_states": list(s.after),
        "inputs": list(s.inputs),
        "outputs": list(s.outputs),
        "dynamics": rows,
    }


def system_from_payload(payload: Mapping) -> MealySystem:
    return validate_system(payload)


# ----------------------------------------------------------------- judges

def judge_payload(j: Judge) -> dict:
    return {
        "interp_inputs": list(j.interp_inputs),
        "interp_outputs": list(j.interp_outputs),
        "i_map": {k: v for k, v in j.i_map},
        "o_map": {k: v for k, v in j.o_map},
    }


def judge_from_payload(payload: Mapping) -> Judge:
    return judge(
        payload["i_map"],
        payload["o_map"],
        payload.get("interp_inputs"),
        payload.get("interp_outputs"),
    )


# ------------------------------------------------------------- immersions

def _map_payload(pairs: tuple[tuple[str, str], ...]) -> dict:
    return {k: v for k, v in pairs}


def immersion_payload(p: OpenImmersion) -> dict:
    m = p.morphism
    src = m.source
    return {
        "source": system_payload(src),
        "f_b": {u: m.map_b(u) for u in src.before},
        "f_a": {u: m.map_a(u) for u in src.after},
        "f_i": {u: m.map_i(u) for u in src.inputs},
        "f_o": {u: m.map_o(u) for u in src.outputs},
    }


def immersion_from_payload(target: MealySystem, payload: Mapping) -> OpenImmersion:
    src = validate_system(payload["source"])
    m = morphism(src, target, payload["f_b"], payload["f_a"],
                 payload["f_i"], payload["f_o"])
    return open_immersion(m)


def covering_payload(c: Covering) -> dict:
    return {
        "system": system_payload(c.target),
        "patches": [immersion_payload(p) for p in c.patches],
    }


def covering_from_payload(payload: Mapping) -> Covering:
    tgt = validate_system(payload["system"])
    patches = [immersion_from_payload(tgt, p) for p in payload["patches"]]
    return covering(tgt, patches)


# ---------------------------------------------------------------- sections

def section_payload(s: Section) -> dict:
    """The machine and the state components of the morphism; the interface
    components are forced by the judge and the patch, so they are derived
    on read rather than stored."""
    m = s.psi
    src = s.patch.source
    return {
        "machine": system_payload(s.explanatory),
        "psi_b": {u: m.map_b(u) for u in src.before},
        "psi_a": {u: m.map_a(u) for u in src.after},
    }


def section_from_payload(patch: OpenImmersion, j: Judge, payload: Mapping) -> Section:
    machine = validate_system(payload["machine"])
    src = patch.source
    j_i = dict(j.i_map)
    j_o = dict(j.o_map)
    psi = morphism(
        src,
        machine,
        payload["psi_b"],
        payload["psi_a"],
        {c: j_i[patch.morphism.map_i(c)] for c in src.inputs},
        {o: j_o[patch.morphism.map_o(o)] for o in src.outputs},
    )
    return section(patch, machine, psi)


# -------------------------------------------------------------- rect unions

def _frac(x: Fraction) -> str:
    return str(x)


def _rect_payload(r: Rect, dim: int) -> dict:
    out: dict[str, Any] = {
        "x": [_frac(r.x.lo), _frac(r.x.hi)],
        "open": [r.x.lo_open, r.x.hi_open],
    }
    if dim == 2:
        out["open"] = [r.x.lo_open, r.x.hi_open, r.y.lo_open, r.y.hi_open]
        out["y"] = [_frac(r.y.lo), _frac(r.y.hi)]
    return out


def union_payload(u: RectUnion, pj: ProjectionJudge) -> dict:
    return {
        "dim": u.dim,
        "axis": pj.axis,
        "rects": [_rect_payload(r, u.dim) for r in u.rects],
    }


def union_from_json(payload: Mapping) -> tuple[RectUnion, ProjectionJudge]:
    return union_from_payload(payload)


def certificate_payload(cert: RobustDisconnectionCertificate) -> dict:
    return {
        "t0": _frac(cert.t0),
        "band": [_frac(cert.n_lo), _frac(cert.n_hi)],
        "components": [
            {"rects": [_rect_payload(r, comp.dim) for r in comp.rects], "dim": comp.dim}
            for comp in cert.components
        ],
        "fiber_points": [[_frac(x) for x in p] for p in cert.fiber_points],
        "component_of_first_point": cert.v_index,
    }


def sheaf_verdict_payload(v: SheafVerdict) -> dict:
    return {
        "is_sheaf": v.is_sheaf,
        "candidates": [_frac(t) for t in v.candidates],
        "certificates": [certificate_payload(c) for c in v.certificates],
        "notes": list(v.notes),
    }


# ------------------------------------------------------------ epsilon data

def epsilon_payload(inst: EpsilonInstance, patches: list[list[str]],
                    eps: float | None = None) -> dict:
    out: dict[str, Any] = {
        "dim": inst.dim,
        "domain": inst.domain,
        "values": {k: list(v) for k, v in inst.values},
        "i_map": {k: v for k, v in inst.i_map},
        "interp_inputs": list(inst.interp_inputs),
        "patches": patches,
    }
    if inst.box is not None:
        out["box"] = [list(b) for b in inst.box]
    if eps is not None:
        out["eps"] = eps
    return out


def epsilon_from_payload(payload: Mapping) -> tuple[EpsilonInstance, list[list[str]], float | None]:
    inst = epsilon_instance(
        int(payload["dim"]),
        payload["domain"],
        payload["values"],
        payload["i_map"],
        payload.get("interp_inputs"),
        payload.get("box"),
    )
    patches = [list(p) for p in payload.get("patches", [])]
    eps = payload.get("eps")
    return inst, patches, None if eps is None else float(eps)


# ---------------------------------------------------------------- reports

def obstruction_payload(rep: ObstructionReport) -> dict:
    return {
        "kind": rep.kind,
        "site": list(rep.site),
        "word": None if rep.word is None else list(rep.word),
        "forced": [
            {
                "label": f.label,
                "machine": system_payload(f.machine),
                "state": f.state,
                "outputs": list(f.outputs),
            }
            for f in rep.forced
        ],
        "narrative": rep.narrative,
    }


def separation_payload(rep: SeparationReport) -> dict:
    out: dict[str, Any] = {
        "kind": rep.kind,
        "locally_equal": rep.locally_equal,
        "globally_equal": rep.globally_equal,
        "separation_violated": rep.separation_violated,
        "local_witnesses": [
            None if w is None else {"state": w[0], "word": list(w[1])}
            for w in rep.local_witnesses
        ],
    }
    if rep.global_witness is not None:
        out["global_witness"] = {
            "state": rep.global_witness[0],
            "word": list(rep.global_witness[1]),
        }
    if rep.obstruction is not None:
        out["obstruction"] = obstruction_payload(rep.obstruction)
    return out


def depth_payload(rep: DepthReport) -> dict:
    return {
        "feasible": rep.feasible,
        "depth": rep.depth,
        "subfamily": None if rep.subfamily is None else list(rep.subfamily),
        "i_prime": rep.i_prime,
        "marginal": rep.marginal,
    }
