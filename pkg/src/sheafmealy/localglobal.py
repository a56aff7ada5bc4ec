"""Separation and gluing checkers for families of judged sections.

Local data lives on the patches of a covering; the checkers here decide
whether local agreement forces global agreement (separation) and whether
compatible local explanations assemble into a global one (gluing), at four
resolutions of "same explanation": literal equality, common core, equal
behavior, and equal behavior over the patch's judged input range.  Negative
verdicts come with replayable obstruction reports.

Conventions used throughout:

* families are indexed like their covering's patches, and each section's
  patch must be the covering patch itself;
* behavioral comparisons on an overlap use the componentwise intersection
  patch of the two covering patches;
* after-states that no transition forces are explained by the first patch
  containing them, in patch order.  Only the before-state assignment is
  observable, so this choice never affects behavioral comparisons.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    CheckerError,
    IncompatibleFamily,
    InternalConsistencyError,
    NotStateless,
    ScaleExceeded,
)
from .explain import (
    BehEquivReport,
    BehaviorPartition,
    CogermWitness,
    Judge,
    Section,
    behavioral_equiv,
    block_distinguishing_word,
    check_cogerm_witness,
    cogerm_equiv,
    pooled_behavior,
    restrict_section,
    restricted_interface,
    validate_section,
)
from .systems import (
    Covering,
    Ident,
    MealySystem,
    OpenImmersion,
    amalgamate,
    check_covering,
    identity_morphism,
    make_system,
    morphism,
    overlap_patch,
    restrict_immersion,
    subsystem,
)


@dataclass(frozen=True)
class ForcedBehavior:
    """One of the conflicting continuations in an obstruction: a state of a
    concrete machine whose outputs along the report's word realize it."""

    label: str
    machine: MealySystem
    state: Ident
    outputs: tuple[Ident, ...]


@dataclass(frozen=True)
class ObstructionReport:
    """Replayable negative verdict.

    ``kind`` is one of behavioral-gluing, separation, stateless.  ``site``
    names the offending identifiers (an after-state, a state, or a judged
    input).  Running each forced behavior's machine from its state along
    ``word`` reproduces ``outputs``, and the two output sequences differ.
    """

    kind: str
    site: tuple[Ident, ...]
    word: tuple[Ident, ...] | None
    forced: tuple[ForcedBehavior, ...]
    narrative: str


def _identity_patch(system: MealySystem) -> OpenImmersion:
    return OpenImmersion(identity_morphism(system))


def _overlap_restrictions(
    c: Covering, sections: Sequence[Section], a: int, b: int
) -> tuple[Section, Section]:
    w = overlap_patch(c.patches[a], c.patches[b])
    na = restrict_immersion(w, c.patches[a])
    nb = restrict_immersion(w, c.patches[b])
    return restrict_section(sections[a], na), restrict_section(sections[b], nb)


def _sections_aligned(c: Covering, sections: Sequence[Section]) -> None:
    if len(sections) != len(c.patches):
        raise CheckerError("one section per covering patch is required")
    for k, (p, s) in enumerate(zip(c.patches, sections)):
        if s.patch != p:
            raise CheckerError(f"section {k} does not sit on covering patch {k}")


@dataclass(frozen=True)
class SeparationReport:
    kind: str
    locally_equal: tuple[bool, ...]
    local_witnesses: tuple[tuple[Ident, tuple[Ident, ...]] | None, ...]
    globally_equal: bool
    global_witness: tuple[Ident, tuple[Ident, ...]] | None
    separation_violated: bool
    obstruction: ObstructionReport | None


def _strict_equal(s: Section, t: Section) -> bool:
    return s.explanatory == t.explanatory and s.psi == t.psi


def check_separation(
    kind: str,
    c: Covering,
    s: Section,
    t: Section,
    j: Judge,
) -> SeparationReport:
    """Compare two sections of the covered system patchwise and globally.

    ``kind`` selects the resolution: ``strict`` (literal equality),
    ``cogerm`` (common core), ``beh`` (equal behavior over the full
    interpretable alphabet), or ``ri`` (equal behavior over each patch's
    judged input range, and over the target's range globally).  Separation
    is violated when all patchwise comparisons succeed but the global one
    fails; the report then carries a replayable obstruction.
    """
    if kind not in ("strict", "cogerm", "beh", "ri"):
        raise CheckerError(f"unknown separation kind {kind!r}")
    if s.patch != t.patch or s.patch.source != c.target:
        raise CheckerError("separation compares sections of the covered system")
    locally: list[bool] = []
    local_wit: list[tuple[Ident, tuple[Ident, ...]] | None] = []
    for p in c.patches:
        rs = restrict_section(s, p)
        rt = restrict_section(t, p)
        if kind == "strict":
            locally.append(_strict_equal(rs, rt))
            local_wit.append(None)
        elif kind == "cogerm":
            locally.append(cogerm_equiv(rs, rt) is not None)
            local_wit.append(None)
        else:
            alphabet = j.interp_inputs if kind == "beh" else restricted_interface(j, p)
            rep = behavioral_equiv(rs, rt, alphabet)
            locally.append(rep.ok)
            local_wit.append(None if rep.ok else (rep.state, rep.word))
    if kind == "strict":
        globally, gwit = _strict_equal(s, t), None
    elif kind == "cogerm":
        globally, gwit = cogerm_equiv(s, t) is not None, None
    else:
        alphabet = (
            j.interp_inputs if kind == "beh" else restricted_interface(j, s.patch)
        )
        rep: BehEquivReport = behavioral_equiv(s, t, alphabet)
        globally, gwit = rep.ok, (None if rep.ok else (rep.state, rep.word))
    violated = all(locally) and not globally
    obstruction = None
    if violated and gwit is not None:
        state, word = gwit
        forced = (
            ForcedBehavior(
                "first section from its image of the witness state",
                s.explanatory,
                s.psi_b(state),
                s.explanatory.run(s.psi_b(state), word),
            ),
            ForcedBehavior(
                "second section from its image of the witness state",
                t.explanatory,
                t.psi_b(state),
                t.explanatory.run(t.psi_b(state), word),
            ),
        )
        obstruction = ObstructionReport(
            "separation",
            (state,),
            word,
            forced,
            f"sections agree on every patch but diverge from state {state!r} "
            f"on the word {'/'.join(word)}",
        )
    elif violated:
        obstruction = ObstructionReport(
            "separation",
            (),
            None,
            (),
            "sections agree on every patch but admit no common core globally",
        )
    return SeparationReport(
        kind,
        tuple(locally),
        tuple(local_wit),
        globally,
        gwit,
        violated,
        obstruction,
    )


@dataclass(frozen=True)
class CompatibleFamily:
    """Covering-indexed family of sections, optionally with core witnesses
    for the pairwise overlap comparisons (keyed by patch index pairs)."""

    covering: Covering
    judge: Judge
    sections: tuple[Section, ...]
    witnesses: tuple[tuple[tuple[int, int], CogermWitness], ...] = ()

    def witness_for(self, a: int, b: int) -> CogermWitness | None:
        for key, w in self.witnesses:
            if key == (a, b):
                return w
        return None


def compatible_family(
    covering_: Covering,
    j: Judge,
    sections: Sequence[Section],
    witnesses: Mapping[tuple[int, int], CogermWitness] | None = None,
) -> CompatibleFamily:
    _sections_aligned(covering_, sections)
    chk = check_covering(covering_)
    if not chk.ok:
        raise CheckerError(f"family covering leaves {chk.pair!r} uncovered on the {chk.side} side")
    for k, s in enumerate(sections):
        rep = validate_section(j, s)
        if not rep.ok:
            raise CheckerError(f"local section {k} invalid: {rep.reason}")
    wit = tuple(sorted((witnesses or {}).items()))
    return CompatibleFamily(covering_, j, tuple(sections), wit)


def glue_cogerm(family: CompatibleFamily) -> Section:
    """Assemble a family into a global section, up to common cores.

    Overlap witnesses are taken from the family or synthesized by the
    pair-closure decision procedure; a missing or invalid witness raises
    :class:`IncompatibleFamily`.  The global machine is the quotient of the
    disjoint union of the local machines by the witness identifications,
    computed as iterated pushouts of injections in one amalgamation step.
    """
    c, j, sections = family.covering, family.judge, family.sections
    machines = [s.explanatory for s in sections]
    for k, m in enumerate(machines):
        if m.inputs != j.interp_inputs or m.outputs != j.interp_outputs:
            raise CheckerError(f"local machine {k} is not on the full interpretable interface")
    idents: list[tuple[int, Ident, int, Ident]] = []
    for a in range(len(sections)):
        for b in range(a + 1, len(sections)):
            ra, rb = _overlap_restrictions(c, sections, a, b)
            w = family.witness_for(a, b)
            if w is None:
                w = cogerm_equiv(ra, rb)
                if w is None:
                    raise IncompatibleFamily(
                        f"patches {a} and {b} admit no common core on their overlap"
                    )
            ok, reason = check_cogerm_witness(ra, rb, w)
            if not ok:
                raise IncompatibleFamily(f"witness for patches {a} and {b} fails: {reason}")
            for r in w.core.before:
                idents.append((a, w.i1.map_b(r), b, w.i2.map_b(r)))
    amalgam = amalgamate(machines, idents)
    tgt = c.target
    psi_b: dict[Ident, Ident] = {}
    psi_a: dict[Ident, Ident] = {}
    for k, (p, s) in enumerate(zip(c.patches, sections)):
        emb = amalgam.embeddings[k]
        for u in p.source.before:
            x = p.morphism.map_b(u)
            v = emb.map_b(s.psi_b(u))
            if psi_b.setdefault(x, v) != v:
                raise InternalConsistencyError(f"glued before-assignment conflicts at {x!r}")
        for u in p.source.after:
            x = p.morphism.map_a(u)
            v = emb.map_a(s.psi_a(u))
            if psi_a.setdefault(x, v) != v:
                raise InternalConsistencyError(f"glued after-assignment conflicts at {x!r}")
    missing_b = [x for x in tgt.before if x not in psi_b]
    missing_a = [x for x in tgt.after if x not in psi_a]
    if missing_b or missing_a:
        raise CheckerError(f"covering leaves states unexplained: {missing_b + missing_a!r}")
    psi = morphism(
        tgt,
        amalgam.system,
        psi_b,
        psi_a,
        {i: j.j_i[i] for i in tgt.inputs},
        {o: j.j_o[o] for o in tgt.outputs},
    )
    glued = Section(_identity_patch(tgt), amalgam.system, psi)
    rep = validate_section(j, glued)
    if not rep.ok:
        raise InternalConsistencyError(f"glued section fails validation: {rep.reason}")
    return glued


def glue_behavioral(
    c: Covering,
    sections: Sequence[Section],
    j: Judge,
) -> Section | ObstructionReport:
    """Assemble a family into a global section, up to behavior.

    The local machines are pooled into one behavior partition; each
    before-state of the target takes the class of its image in the first
    patch containing it, which pairwise overlap compatibility (checked
    first, raising :class:`IncompatibleFamily`) makes patch-independent.
    Every transition of the target then forces a class on its successor;
    an after-state forced to two distinct classes is a gluing obstruction,
    returned as a replayable report.  Otherwise the forced classes, closed
    under one-step dynamics, form the global machine.
    """
    _sections_aligned(c, sections)
    alphabet = j.interp_inputs
    for k, s in enumerate(sections):
        rep = validate_section(j, s)
        if not rep.ok:
            raise CheckerError(f"local section {k} invalid: {rep.reason}")
        if s.explanatory.inputs != alphabet:
            raise CheckerError("behavioral gluing needs full-interface local machines")
    machines = [s.explanatory for s in sections]
    part = pooled_behavior(machines, alphabet)
    lookup: dict[tuple[int, Ident], int] = {}
    for bk, members in enumerate(part.blocks):
        for ks in members:
            lookup[ks] = bk
    for a in range(len(sections)):
        for b in range(a + 1, len(sections)):
            ra, rb = _overlap_restrictions(c, sections, a, b)
            rep2 = behavioral_equiv(ra, rb, alphabet)
            if not rep2.ok:
                raise IncompatibleFamily(
                    f"patches {a} and {b} disagree behaviorally at state {rep2.state!r} "
                    f"on word {'/'.join(rep2.word)}"
                )
    tgt = c.target
    before_block: dict[Ident, int] = {}
    for k, (p, s) in enumerate(zip(c.patches, sections)):
        for u in p.source.before:
            x = p.morphism.map_b(u)
            before_block.setdefault(x, lookup[(k, s.psi_b(u))])
    missing = [x for x in tgt.before if x not in before_block]
    if missing:
        raise CheckerError(f"covering leaves before-states unexplained: {missing!r}")
    for x in tgt.before:
        for i_raw in tgt.inputs:
            _, o = tgt.transition(x, i_raw)
            if part.out(before_block[x], j.j_i[i_raw]) != j.j_o[o]:
                raise InternalConsistencyError(
                    f"pooled class misexplains the step at ({x!r}, {i_raw!r})"
                )
    derived: dict[Ident, dict[int, tuple[Ident, Ident]]] = {}
    for s_st in tgt.before:
        for i_raw in tgt.inputs:
            x, _ = tgt.transition(s_st, i_raw)
            blk = part.succ(before_block[s_st], j.j_i[i_raw])
            derived.setdefault(x, {}).setdefault(blk, (s_st, i_raw))
    for x in sorted(derived):
        if len(derived[x]) > 1:
            (b1, via1), (b2, via2) = sorted(derived[x].items())[:2]
            word = block_distinguishing_word(part, b1, b2)
            forced = []
            for blk, via in ((b1, via1), (b2, via2)):
                mk, rep_state = part.blocks[blk][0]
                forced.append(
                    ForcedBehavior(
                        f"forced by the step at ({via[0]!r}, {via[1]!r})",
                        machines[mk],
                        rep_state,
                        machines[mk].run(rep_state, word),
                    )
                )
            return ObstructionReport(
                "behavioral-gluing",
                (x,),
                word,
                tuple(forced),
                f"after-state {x!r} is forced into two behavior classes; "
                f"they diverge on the word {'/'.join(word)}",
            )
    after_block: dict[Ident, int] = {}
    for x in tgt.after:
        if x in derived:
            after_block[x] = next(iter(derived[x]))
    for k, (p, s) in enumerate(zip(c.patches, sections)):
        for u in p.source.after:
            x = p.morphism.map_a(u)
            after_block.setdefault(x, lookup[(k, s.psi_a(u))])
    missing = [x for x in tgt.after if x not in after_block]
    if missing:
        raise CheckerError(f"covering leaves after-states unexplained: {missing!r}")
    needed = sorted(set(before_block.values()) | set(after_block.values()))
    frontier = list(needed)
    reach = set(needed)
    while frontier:
        blk = frontier.pop()
        for ch in alphabet:
            nxt = part.succ(blk, ch)
            if nxt not in reach:
                reach.add(nxt)
                frontier.append(nxt)
    ordered = sorted(reach)
    names = {blk: f"b{k}" for k, blk in enumerate(ordered)}
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for blk in ordered:
        for ch in alphabet:
            dyn[(names[blk], ch)] = (names[part.succ(blk, ch)], part.out(blk, ch))
    carrier = sorted(names.values())
    machine = make_system(carrier, carrier, alphabet, j.interp_outputs, dyn)
    psi = morphism(
        tgt,
        machine,
        {x: names[before_block[x]] for x in tgt.before},
        {x: names[after_block[x]] for x in tgt.after},
        {i: j.j_i[i] for i in tgt.inputs},
        {o: j.j_o[o] for o in tgt.outputs},
    )
    glued = Section(_identity_patch(tgt), machine, psi)
    rep3 = validate_section(j, glued)
    if not rep3.ok:
        raise InternalConsistencyError(f"glued section fails validation: {rep3.reason}")
    return glued


def _forced_blocks(
    c: Covering, sections: Sequence[Section], part: BehaviorPartition, offset: int = 0
) -> dict[Ident, int]:
    """Behavior class each target before-state must carry, read off the
    patches.  Only the before-side is constrained: behavioral identity of
    sections compares the images of before-states.  Raises
    :class:`IncompatibleFamily` when two patches force different classes on
    a shared before-state."""
    lookup: dict[tuple[int, Ident], int] = {}
    for bk, members in enumerate(part.blocks):
        for ks in members:
            lookup[ks] = bk
    req_b: dict[Ident, int] = {}
    for k, (p, s) in enumerate(zip(c.patches, sections)):
        for u in p.source.before:
            x = p.morphism.map_b(u)
            blk = lookup[(k + offset, s.psi_b(u))]
            if req_b.setdefault(x, blk) != blk:
                raise IncompatibleFamily(
                    f"patches force different behaviors on before-state {x!r}"
                )
    return req_b


def search_bounded_behavioral_glue(
    c: Covering,
    sections: Sequence[Section],
    j: Judge,
    max_states: int = 4,
    cap: int = 200_000,
) -> Section | None:
    """Exhaustive search for a global section matching the family's behavior,
    over explanatory machines with at most ``max_states`` states.

    Machines over the interpretable interface are enumerated in size order.
    For each candidate, every target state must take the behavior class its
    patches force, and the dynamics squares then propagate a concrete
    assignment; any consistent one is returned as a validated section.  If a
    machine admits an assignment, so does its quotient by behavioral
    equality of states, where class membership determines the assignment
    outright, and that quotient is enumerated no later than the machine
    itself; a None return therefore rules out every machine within the
    bound.  A size level whose table count exceeds ``cap`` raises
    :class:`ScaleExceeded` instead of being searched.
    """
    _sections_aligned(c, sections)
    alphabet = j.interp_inputs
    outs = j.interp_outputs
    for k, s in enumerate(sections):
        rep = validate_section(j, s)
        if not rep.ok:
            raise CheckerError(f"local section {k} invalid: {rep.reason}")
        if s.explanatory.inputs != alphabet:
            raise CheckerError("behavioral gluing needs full-interface local machines")
    tgt = c.target
    locals_ = [s.explanatory for s in sections]
    req0_b = _forced_blocks(c, sections, pooled_behavior(locals_, alphabet))
    miss = [x for x in tgt.before if x not in req0_b]
    if miss:
        raise CheckerError(f"covering leaves before-states unexplained: {miss!r}")
    for n in range(1, max_states + 1):
        states = tuple(f"n{q}" for q in range(n))
        cells = [(st, ch) for st in states for ch in alphabet]
        count = (n * len(outs)) ** len(cells)
        if count > cap:
            raise ScaleExceeded(f"machine enumeration at {n} states needs {count} tables")
        choices = [(st2, o) for st2 in states for o in outs]
        for table in itertools.product(choices, repeat=len(cells)):
            machine = make_system(states, states, alphabet, outs,
                                  dict(zip(cells, table)))
            glued = _assign_over_machine(c, sections, j, machine, locals_)
            if glued is not None:
                return glued
    return None


def _assign_over_machine(
    c: Covering,
    sections: Sequence[Section],
    j: Judge,
    machine: MealySystem,
    locals_: Sequence[MealySystem],
) -> Section | None:
    alphabet = j.interp_inputs
    part = pooled_behavior([machine, *locals_], alphabet)
    lookup: dict[tuple[int, Ident], int] = {}
    for bk, members in enumerate(part.blocks):
        for ks in members:
            lookup[ks] = bk
    req_b = _forced_blocks(c, sections, part, offset=1)
    tgt = c.target
    cand_b = {x: [q for q in machine.before if lookup[(0, q)] == req_b[x]]
              for x in tgt.before}
    if any(not v for v in cand_b.values()):
        return None
    psi_b = {x: cand_b[x][0] for x in tgt.before}
    psi_a: dict[Ident, Ident] = {}
    for x in tgt.before:
        for i_raw in tgt.inputs:
            x2, o = tgt.transition(x, i_raw)
            q2, oo = machine.transition(psi_b[x], j.j_i[i_raw])
            if oo != j.j_o[o]:
                return None
            if psi_a.setdefault(x2, q2) != q2:
                return None
    # After-states no transition reaches are unconstrained; park them on the
    # first machine state.
    for x in tgt.after:
        psi_a.setdefault(x, machine.before[0])
    psi = morphism(
        tgt,
        machine,
        psi_b,
        psi_a,
        {i: j.j_i[i] for i in tgt.inputs},
        {o: j.j_o[o] for o in tgt.outputs},
    )
    glued = Section(_identity_patch(tgt), machine, psi)
    if not validate_section(j, glued).ok:
        return None
    for p, s in zip(c.patches, sections):
        if not behavioral_equiv(restrict_section(glued, p), s, alphabet).ok:
            return None
    return glued


@dataclass(frozen=True)
class GlueStrictResult:
    section: Section | None
    conflict: str | None


def glue_strict(c: Covering, sections: Sequence[Section], j: Judge) -> GlueStrictResult:
    """Assemble a family into a global section, literally.

    All local machines must be one and the same machine and the maps must
    agree pointwise on overlaps; the global map is then read off pointwise.
    """
    _sections_aligned(c, sections)
    for k, s in enumerate(sections):
        rep = validate_section(j, s)
        if not rep.ok:
            raise CheckerError(f"local section {k} invalid: {rep.reason}")
    machine = sections[0].explanatory
    for k, s in enumerate(sections):
        if s.explanatory != machine:
            return GlueStrictResult(None, f"patch {k} explains with a different machine")
    tgt = c.target
    psi_b: dict[Ident, Ident] = {}
    psi_a: dict[Ident, Ident] = {}
    for k, (p, s) in enumerate(zip(c.patches, sections)):
        for u in p.source.before:
            x = p.morphism.map_b(u)
            v = s.psi_b(u)
            if psi_b.setdefault(x, v) != v:
                return GlueStrictResult(None, f"patches assign different images to state {x!r}")
        for u in p.source.after:
            x = p.morphism.map_a(u)
            v = s.psi_a(u)
            if psi_a.setdefault(x, v) != v:
                return GlueStrictResult(
                    None, f"patches assign different images to after-state {x!r}"
                )
    missing_b = [x for x in tgt.before if x not in psi_b]
    missing_a = [x for x in tgt.after if x not in psi_a]
    if missing_b or missing_a:
        raise CheckerError(f"covering leaves states unexplained: {missing_b + missing_a!r}")
    psi = morphism(
        tgt,
        machine,
        psi_b,
        psi_a,
        {i: j.j_i[i] for i in tgt.inputs},
        {o: j.j_o[o] for o in tgt.outputs},
    )
    glued = Section(_identity_patch(tgt), machine, psi)
    rep = validate_section(j, glued)
    if not rep.ok:
        raise InternalConsistencyError(f"strict glue fails validation: {rep.reason}")
    return GlueStrictResult(glued, None)


@dataclass(frozen=True)
class StatelessSectionReport:
    ok: bool
    assignment: tuple[tuple[Ident, Ident], ...] | None
    violation: tuple[Ident, Ident, Ident, Ident, Ident] | None


def stateless_ri_section(
    system: MealySystem, j: Judge, m: OpenImmersion
) -> StatelessSectionReport:
    """The unique candidate stateless explanation of a patch, if coherent.

    A single-state system is an output function ``f`` on its inputs; a
    stateless explanation over the patch's judged range exists exactly when
    ``j_O . f`` is constant on each judged-input fiber within the patch.
    On failure the violation names the fiber and two witnesses
    ``(i', i1, o1', i2, o2')``.
    """
    if len(system.before) != 1 or len(system.after) != 1 or not system.homogeneous:
        raise NotStateless("stateless sections need a single-state homogeneous system")
    if m.target != system:
        raise CheckerError("patch must map into the given system")
    s0 = m.source.before[0] if m.source.before else None
    if s0 is None:
        return StatelessSectionReport(True, (), None)
    values: dict[Ident, tuple[Ident, Ident]] = {}
    for c in m.source.inputs:
        raw = m.morphism.map_i(c)
        judged_in = j.j_i[raw]
        judged_out = j.j_o[system.transition(system.before[0], raw)[1]]
        prev = values.get(judged_in)
        if prev is not None and prev[1] != judged_out:
            first = min((prev, (raw, judged_out)), key=lambda t: t[0])
            second = max((prev, (raw, judged_out)), key=lambda t: t[0])
            return StatelessSectionReport(
                False, None, (judged_in, first[0], first[1], second[0], second[1])
            )
        if prev is None or prev[0] > raw:
            values[judged_in] = (raw, judged_out)
    assignment = tuple(sorted((k, v[1]) for k, v in values.items()))
    return StatelessSectionReport(True, assignment, None)


def _stateless_machine(j: Judge, letters: tuple[Ident, ...], out: Ident) -> MealySystem:
    dyn = {("s", c): ("s", out) for c in letters}
    return make_system(["s"], ["s"], letters, j.interp_outputs, dyn)


@dataclass(frozen=True)
class GlueStatelessResult:
    ok: bool
    assignment: tuple[tuple[Ident, Ident], ...] | None
    obstruction: ObstructionReport | None


def glue_stateless(
    system: MealySystem,
    j: Judge,
    c: Covering,
    assignments: Sequence[Mapping[Ident, Ident]],
) -> GlueStatelessResult:
    """Glue per-patch stateless assignments into one judged output function.

    Each assignment must be the coherent stateless explanation of its patch
    (checked).  Compatibility on an overlap constrains only the overlap's
    own judged range, which can be strictly smaller than the intersection
    of the patch ranges; the family glues exactly when the union of the
    assignment graphs is single-valued.
    """
    if len(assignments) != len(c.patches):
        raise CheckerError("one assignment per covering patch is required")
    if c.target != system:
        raise CheckerError("covering must cover the given system")
    for k, (p, asg) in enumerate(zip(c.patches, assignments)):
        rep = stateless_ri_section(system, j, p)
        if not rep.ok:
            raise IncompatibleFamily(
                f"patch {k} admits no stateless explanation: fiber {rep.violation[0]!r}"
            )
        if dict(rep.assignment) != dict(asg):
            raise CheckerError(f"assignment {k} is not the patch's stateless explanation")
    for a in range(len(c.patches)):
        for b in range(a + 1, len(c.patches)):
            w = overlap_patch(c.patches[a], c.patches[b])
            shared = restricted_interface(j, w)
            for i_p in shared:
                va = dict(assignments[a]).get(i_p)
                vb = dict(assignments[b]).get(i_p)
                if va is not None and vb is not None and va != vb:
                    raise IncompatibleFamily(
                        f"patches {a} and {b} disagree at judged input {i_p!r} on their overlap"
                    )
    merged: dict[Ident, Ident] = {}
    for k, asg in enumerate(assignments):
        for i_p, o_p in sorted(dict(asg).items()):
            prev = merged.get(i_p)
            if prev is not None and prev != o_p:
                forced = tuple(
                    ForcedBehavior(
                        f"assignment of a patch containing judged input {i_p!r}",
                        _stateless_machine(j, (i_p,), o_val),
                        "s",
                        (o_val,),
                    )
                    for o_val in (prev, o_p)
                )
                return GlueStatelessResult(
                    False,
                    None,
                    ObstructionReport(
                        "stateless",
                        (i_p,),
                        (i_p,),
                        forced,
                        f"judged input {i_p!r} is forced to both {prev!r} and {o_p!r} "
                        "by patches whose overlap never sees it",
                    ),
                )
            merged.setdefault(i_p, o_p)
    return GlueStatelessResult(True, tuple(sorted(merged.items())), None)


@dataclass(frozen=True)
class StatelessSheafReport:
    is_sheaf: bool
    witness_covering: Covering | None
    witness_assignments: tuple[tuple[tuple[Ident, Ident], ...], ...] | None
    obstruction: ObstructionReport | None


def discrete_stateless_sheaf_check(system: MealySystem, j: Judge) -> StatelessSheafReport:
    """Sheaf verdict for stateless explanations of a single-state system.

    Over discrete carriers every fiber of the judged input map is clopen,
    and gluing over arbitrary coverings reduces to a per-fiber condition:
    explanations glue over every covering exactly when the judged output is
    constant on every judged-input fiber.  The reduction is exercised
    against genuine covering enumeration in the test suite.  On failure the
    report carries the canonical witness: the covering that splits off each
    input as its own patch, whose forced local family is compatible (the
    overlaps see no shared judged input) yet unglueable at the named fiber.
    At most 12 inputs are accepted.
    """
    if len(system.before) != 1 or len(system.after) != 1 or not system.homogeneous:
        raise NotStateless("the discrete sheaf check needs a single-state system")
    if len(system.inputs) > 12:
        raise ScaleExceeded("the discrete sheaf check is capped at 12 inputs")
    s0 = system.before[0]
    fibers: dict[Ident, list[Ident]] = {}
    for i_raw in system.inputs:
        fibers.setdefault(j.j_i[i_raw], []).append(i_raw)
    for i_p in sorted(fibers):
        outs = {j.j_o[system.transition(s0, raw)[1]] for raw in fibers[i_p]}
        if len(outs) > 1:
            patches = [
                subsystem(system, before=[s0], after=[s0], inputs=[raw],
                          outputs=system.outputs)
                for raw in system.inputs
            ]
            cov = Covering(system, tuple(patches))
            assignments = []
            for raw in system.inputs:
                judged_out = j.j_o[system.transition(s0, raw)[1]]
                assignments.append(((j.j_i[raw], judged_out),))
            res = glue_stateless(system, j, cov, [dict(a) for a in assignments])
            if res.ok or res.obstruction is None:
                raise InternalConsistencyError("witness covering unexpectedly glues")
            return StatelessSheafReport(False, cov, tuple(assignments), res.obstruction)
    return StatelessSheafReport(True, None, None, None)
