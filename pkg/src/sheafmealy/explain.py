"""Judged sections of machine patches and their equivalence notions.

A judge translates raw inputs and outputs into an interpretable interface.
A section over a patch ``m : U -> S`` is a homogeneous machine on the
interpretable interface together with a morphism ``psi : U -> S'`` whose
interface components are forced to be the judged ones.  The before and after
components of ``psi`` are independent; nothing ties the state a trace is
explained from to the state it is explained into.

Two sections can be compared at different resolutions:

* literally (same machine, same maps),
* up to a common core (a span of interface-fixing injections through which
  both sections factor), decided here by a pair-closure algorithm,
* behaviorally (equal output sequences from corresponding before-states for
  every interpretable input word).

The closure algorithm seeds the pair relation with both the before- and the
after-images of the two sections and closes it under one-step dynamics; the
sections admit a common core exactly when the closure stays single-valued in
both directions with matching outputs.  Seeding only before-images would
accept strictly more pairs; the stronger seeding keeps restriction of
witness cores pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import CheckerError, HeterogeneousInput, InternalConsistencyError
from .systems import (
    Covering,
    Ident,
    MealySystem,
    MorphismCheck,
    OpenImmersion,
    SystemMorphism,
    check_morphism,
    compose,
    finset,
    identity_morphism,
    make_system,
    morphism,
)


@dataclass(frozen=True)
class Judge:
    """Interpretation maps for raw inputs and outputs.

    ``i_map`` and ``o_map`` are stored as sorted pair tuples so judges are
    hashable; the interpretable alphabets may be strictly larger than the
    map images.
    """

    interp_inputs: tuple[Ident, ...]
    interp_outputs: tuple[Ident, ...]
    i_map: tuple[tuple[Ident, Ident], ...]
    o_map: tuple[tuple[Ident, Ident], ...]

    @cached_property
    def j_i(self) -> dict[Ident, Ident]:
        return dict(self.i_map)

    @cached_property
    def j_o(self) -> dict[Ident, Ident]:
        return dict(self.o_map)


def judge(
    i_map: Mapping[Ident, Ident],
    o_map: Mapping[Ident, Ident],
    interp_inputs: Iterable[Ident] | None = None,
    interp_outputs: Iterable[Ident] | None = None,
) -> Judge:
    ii = finset(interp_inputs) if interp_inputs is not None else finset(set(i_map.values()))
    io = finset(interp_outputs) if interp_outputs is not None else finset(set(o_map.values()))
    for v in i_map.values():
        if v not in set(ii):
            raise CheckerError(f"judged input {v!r} outside the interpretable inputs")
    for v in o_map.values():
        if v not in set(io):
            raise CheckerError(f"judged output {v!r} outside the interpretable outputs")
    return Judge(ii, io, tuple(sorted(i_map.items())), tuple(sorted(o_map.items())))


def identity_judge(system: MealySystem) -> Judge:
    return judge({c: c for c in system.inputs}, {o: o for o in system.outputs})


def validate_judge(j: Judge, system: MealySystem) -> None:
    for c in system.inputs:
        if c not in j.j_i:
            raise CheckerError(f"judge undefined on input {c!r}")
    for o in system.outputs:
        if o not in j.j_o:
            raise CheckerError(f"judge undefined on output {o!r}")


def restricted_interface(j: Judge, m: OpenImmersion) -> tuple[Ident, ...]:
    """Interpretable inputs actually reachable through the patch: the image
    of the patch's inputs under the judge."""
    return finset({j.j_i[m.morphism.map_i(c)] for c in m.source.inputs})


@dataclass(frozen=True)
class JFullReport:
    ok: bool
    failing_patch: int | None = None
    patch_interface: tuple[Ident, ...] | None = None
    full_interface: tuple[Ident, ...] | None = None


def is_j_full(c: Covering, j: Judge) -> JFullReport:
    """Whether every patch realizes the same judged input range as the
    covered system.  Data-local patches (full on inputs) always do."""
    whole = OpenImmersion(identity_morphism(c.target))
    full = restricted_interface(j, whole)
    for k, p in enumerate(c.patches):
        got = restricted_interface(j, p)
        if got != full:
            return JFullReport(False, k, got, full)
    return JFullReport(True, None, full, full)


@dataclass(frozen=True)
class Section:
    """Explanation of a patch: homogeneous machine plus a judged morphism.

    ``patch`` is the immersion ``m : U -> S`` being explained, ``explanatory``
    the machine ``S'`` on the interpretable interface, and ``psi`` the
    morphism ``U -> S'``.  The input interface of ``S'`` is either the full
    interpretable input set or exactly the patch's judged range; both occur.
    """

    patch: OpenImmersion
    explanatory: MealySystem
    psi: SystemMorphism

    def psi_b(self, s: Ident) -> Ident:
        return self.psi.map_b(s)

    def psi_a(self, s: Ident) -> Ident:
        return self.psi.map_a(s)


def section(patch: OpenImmersion, explanatory: MealySystem, psi: SystemMorphism) -> Section:
    if psi.source != patch.source or psi.target != explanatory:
        raise CheckerError("section morphism must map the patch into the explanatory machine")
    return Section(patch, explanatory, psi)


@dataclass(frozen=True)
class SectionCheck:
    ok: bool
    reason: str | None = None
    witness: tuple[Ident, ...] | None = None
    interface_mode: str | None = None  # "full" or "restricted"


def validate_section(j: Judge, s: Section) -> SectionCheck:
    """Check the section conditions in a fixed order, reporting the first
    violation: machine shape, interface discipline, judged input and output
    components, then the dynamics square of ``psi``."""
    u = s.patch.source
    mach = s.explanatory
    if not mach.homogeneous:
        return SectionCheck(False, "explanatory machine is not homogeneous", None)
    if mach.outputs != j.interp_outputs:
        return SectionCheck(False, "explanatory outputs differ from the interpretable outputs", None)
    restricted = restricted_interface(j, s.patch)
    if mach.inputs == j.interp_inputs:
        mode = "full"
    elif mach.inputs == restricted:
        mode = "restricted"
    else:
        return SectionCheck(
            False,
            "explanatory inputs are neither the interpretable inputs nor the patch range",
            None,
        )
    for c in u.inputs:
        expect = j.j_i[s.patch.morphism.map_i(c)]
        if s.psi.map_i(c) != expect:
            return SectionCheck(False, "input component of psi is not the judged input map",
                                (c,), mode)
    for o in u.outputs:
        expect = j.j_o[s.patch.morphism.map_o(o)]
        if s.psi.map_o(o) != expect:
            return SectionCheck(False, "output component of psi is not the judged output map",
                                (o,), mode)
    chk: MorphismCheck = check_morphism(s.psi)
    if not chk.ok:
        return SectionCheck(False, "psi does not commute with the dynamics", chk.witness, mode)
    return SectionCheck(True, None, None, mode)


def restrict_section(s: Section, n: OpenImmersion) -> Section:
    """Pull a section back along a patch-of-a-patch ``n``; the explanatory
    machine is unchanged and ``psi`` is precomposed."""
    if n.target != s.patch.source:
        raise CheckerError("restriction patch must map into the section's patch")
    return Section(
        OpenImmersion(compose(n.morphism, s.patch.morphism)),
        s.explanatory,
        compose(n.morphism, s.psi),
    )


def _pair_levels(
    m1: MealySystem,
    m2: MealySystem,
    alphabet: tuple[Ident, ...],
) -> dict[tuple[Ident, Ident], int]:
    """Length of the shortest distinguishing word for every state pair; pairs
    absent from the result are behaviorally equal over ``alphabet``."""
    levels: dict[tuple[Ident, Ident], int] = {}
    for x in m1.before:
        for y in m2.before:
            if any(m1.transition(x, c)[1] != m2.transition(y, c)[1] for c in alphabet):
                levels[(x, y)] = 1
    changed = True
    k = 1
    while changed:
        changed = False
        k += 1
        for x in m1.before:
            for y in m2.before:
                if (x, y) in levels:
                    continue
                hit = any(
                    levels.get((m1.transition(x, c)[0], m2.transition(y, c)[0])) == k - 1
                    for c in alphabet
                )
                if hit:
                    levels[(x, y)] = k
                    changed = True
    return levels


def _word_from_pair(
    m1: MealySystem,
    m2: MealySystem,
    alphabet: tuple[Ident, ...],
    levels: Mapping[tuple[Ident, Ident], int],
    x: Ident,
    y: Ident,
) -> tuple[Ident, ...]:
    """Lexicographically least shortest distinguishing word from a pair."""
    k = levels[(x, y)]
    word: list[Ident] = []
    while k > 1:
        for c in alphabet:
            nxt = (m1.transition(x, c)[0], m2.transition(y, c)[0])
            if levels.get(nxt) == k - 1:
                word.append(c)
                x, y = nxt
                k -= 1
                break
        else:
            raise InternalConsistencyError("level table is not decreasing")
    for c in alphabet:
        if m1.transition(x, c)[1] != m2.transition(y, c)[1]:
            word.append(c)
            return tuple(word)
    raise InternalConsistencyError("level-one pair has no separating letter")


def distinguishing_word(
    m1: MealySystem,
    x: Ident,
    m2: MealySystem,
    y: Ident,
    alphabet: tuple[Ident, ...],
) -> tuple[Ident, ...] | None:
    """Shortest lexicographically least word over ``alphabet`` on which the
    two states emit different output sequences; None if none exists."""
    levels = _pair_levels(m1, m2, alphabet)
    if (x, y) not in levels:
        return None
    return _word_from_pair(m1, m2, alphabet, levels, x, y)


@dataclass(frozen=True)
class BehEquivReport:
    ok: bool
    state: Ident | None = None
    word: tuple[Ident, ...] | None = None


def behavioral_equiv(
    s1: Section,
    s2: Section,
    alphabet: tuple[Ident, ...] | None = None,
) -> BehEquivReport:
    """Equality of observable behavior of two sections of one patch.

    For every before-state of the patch, the images under the two sections
    must emit identical output sequences on every word over ``alphabet``.
    On failure the witness minimizes (word length, word, state).
    """
    if s1.patch.source != s2.patch.source:
        raise CheckerError("behavioral comparison needs sections of one patch")
    m1, m2 = s1.explanatory, s2.explanatory
    if alphabet is None:
        if m1.inputs != m2.inputs:
            raise CheckerError("sections: explanatory input interfaces differ; pass an alphabet")
        alphabet = m1.inputs
    for c in alphabet:
        if c not in m1.i_index or c not in m2.i_index:
            raise CheckerError(f"alphabet letter {c!r} outside an explanatory interface")
    levels = _pair_levels(m1, m2, alphabet)
    best: tuple[int, tuple[Ident, ...], Ident] | None = None
    for s in s1.patch.source.before:
        pair = (s1.psi_b(s), s2.psi_b(s))
        if pair in levels:
            word = _word_from_pair(m1, m2, alphabet, levels, *pair)
            key = (len(word), word, s)
            if best is None or key < best:
                best = key
    if best is None:
        return BehEquivReport(True)
    return BehEquivReport(False, best[2], best[1])


@dataclass(frozen=True)
class CogermWitness:
    """Common core of two sections: a span of interface-fixing injections
    ``s1.explanatory <-i1- core -i2-> s2.explanatory`` together with the
    factoring morphism ``phi`` satisfying ``i_k . phi = psi_k``."""

    core: MealySystem
    i1: SystemMorphism
    i2: SystemMorphism
    phi: SystemMorphism


def check_cogerm_witness(s1: Section, s2: Section, w: CogermWitness) -> tuple[bool, str | None]:
    if not w.core.homogeneous:
        return False, "core is not homogeneous"
    if w.i1.source != w.core or w.i2.source != w.core:
        return False, "span legs do not start at the core"
    if w.i1.target != s1.explanatory or w.i2.target != s2.explanatory:
        return False, "span legs do not reach the explanatory machines"
    for leg, label in ((w.i1, "first"), (w.i2, "second")):
        if len(set(leg.f_b)) != len(leg.f_b) or leg.f_b != leg.f_a:
            return False, f"{label} leg is not an injective state map"
        if leg.source.inputs != leg.target.inputs or leg.source.outputs != leg.target.outputs:
            return False, f"{label} leg does not fix the interface"
        chk = check_morphism(leg)
        if not chk.ok:
            return False, f"{label} leg breaks dynamics at {chk.witness!r}"
    if w.phi.source != s1.patch.source or w.phi.target != w.core:
        return False, "factoring morphism has the wrong endpoints"
    if compose(w.phi, w.i1) != s1.psi:
        return False, "factoring through the first leg does not recover psi"
    if compose(w.phi, w.i2) != s2.psi:
        return False, "factoring through the second leg does not recover psi"
    chk = check_morphism(w.phi)
    if not chk.ok:
        return False, f"factoring morphism breaks dynamics at {chk.witness!r}"
    return True, None


def cogerm_equiv(s1: Section, s2: Section) -> CogermWitness | None:
    """Decide whether two sections of one patch share a common core.

    Seeds the pair relation with corresponding before- and after-images,
    closes under dynamics on the full explanatory alphabet, and succeeds
    exactly when the closure is a partial bijection with matching outputs.
    The witness core is the closure itself with the coordinate projections.
    """
    if s1.patch.source != s2.patch.source:
        raise CheckerError("core comparison needs sections of one patch")
    m1, m2 = s1.explanatory, s2.explanatory
    if m1.inputs != m2.inputs or m1.outputs != m2.outputs:
        raise CheckerError("core comparison needs matching explanatory interfaces")
    alphabet = m1.inputs
    u = s1.patch.source
    seeds = {(s1.psi_b(s), s2.psi_b(s)) for s in u.before}
    seeds |= {(s1.psi_a(s), s2.psi_a(s)) for s in u.after}
    fwd: dict[Ident, Ident] = {}
    bwd: dict[Ident, Ident] = {}
    todo = sorted(seeds)
    pairs: set[tuple[Ident, Ident]] = set()
    while todo:
        x, y = todo.pop()
        if (x, y) in pairs:
            continue
        if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
            return None
        pairs.add((x, y))
        for c in alphabet:
            x2, o1 = m1.transition(x, c)
            y2, o2 = m2.transition(y, c)
            if o1 != o2:
                return None
            todo.append((x2, y2))
    ordered = sorted(pairs)
    names = {p: f"{p[0]}~{p[1]}" for p in ordered}
    if len(set(names.values())) != len(ordered):
        names = {p: f"r{k}" for k, p in enumerate(ordered)}
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for (x, y) in ordered:
        for c in alphabet:
            x2, o = m1.transition(x, c)
            y2 = m2.transition(y, c)[0]
            dyn[(names[(x, y)], c)] = (names[(x2, y2)], o)
    carrier = sorted(names.values())
    core = make_system(carrier, carrier, alphabet, m1.outputs, dyn)
    back = {names[p]: p for p in ordered}
    i1 = morphism(core, m1,
                  {n: back[n][0] for n in carrier}, {n: back[n][0] for n in carrier},
                  {c: c for c in alphabet}, {o: o for o in m1.outputs})
    i2 = morphism(core, m2,
                  {n: back[n][1] for n in carrier}, {n: back[n][1] for n in carrier},
                  {c: c for c in alphabet}, {o: o for o in m2.outputs})
    phi = morphism(u, core,
                   {s: names[(s1.psi_b(s), s2.psi_b(s))] for s in u.before},
                   {s: names[(s1.psi_a(s), s2.psi_a(s))] for s in u.after},
                   {c: s1.psi.map_i(c) for c in u.inputs},
                   {o: s1.psi.map_o(o) for o in u.outputs})
    return CogermWitness(core, i1, i2, phi)


@dataclass(frozen=True)
class MinimizeResult:
    machine: MealySystem
    state_map: tuple[tuple[Ident, Ident], ...]

    @cached_property
    def mapping(self) -> dict[Ident, Ident]:
        return dict(self.state_map)


def minimize(system: MealySystem, j: Judge | None = None) -> MinimizeResult:
    """Quotient of a homogeneous machine by behavioral equality of states
    over its raw input alphabet.  Blocks are named ``p0, p1, ...`` in the
    order of their smallest member.

    With a judge, outputs are judged first, so states merge exactly when
    their stepwise judged behaviors agree; the quotient keeps the raw input
    alphabet and emits judged outputs."""
    if not system.homogeneous:
        raise HeterogeneousInput("minimization is defined for homogeneous machines")
    if j is not None:
        validate_judge(j, system)
    out_of = (lambda o: j.j_o[o]) if j is not None else (lambda o: o)
    alphabet = system.inputs
    block: dict[Ident, int] = {}
    sig0 = {s: tuple(out_of(system.transition(s, c)[1]) for c in alphabet)
            for s in system.before}
    keys = sorted(set(sig0.values()))
    for s in system.before:
        block[s] = keys.index(sig0[s])
    while True:
        sig = {
            s: (block[s], tuple(block[system.transition(s, c)[0]] for c in alphabet))
            for s in system.before
        }
        keys2 = sorted(set(sig.values()))
        nxt = {s: keys2.index(sig[s]) for s in system.before}
        if len(keys2) == len(set(block.values())):
            break
        block = nxt
    order: list[int] = []
    for s in system.before:
        if block[s] not in order:
            order.append(block[s])
    rename = {b: f"p{k}" for k, b in enumerate(order)}
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for s in system.before:
        for c in alphabet:
            s2, o = system.transition(s, c)
            dyn[(rename[block[s]], c)] = (rename[block[s2]], out_of(o))
    carrier = sorted(rename.values())
    outs = system.outputs if j is None else j.interp_outputs
    machine = make_system(carrier, carrier, alphabet, outs, dyn)
    state_map = tuple((s, rename[block[s]]) for s in system.before)
    return MinimizeResult(machine, state_map)


def extend_section_alphabet(j: Judge, s: Section) -> Section:
    """Complete a section whose machine lives on the patch's judged range to
    one on the full interpretable alphabet.  Missing letters become self
    loops emitting the least interpretable output, the canonical completion;
    behavior over the original range is unchanged."""
    mach = s.explanatory
    if mach.inputs == j.interp_inputs:
        return s
    least = j.interp_outputs[0]
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for st in mach.before:
        for c in j.interp_inputs:
            if c in mach.i_index:
                dyn[(st, c)] = mach.transition(st, c)
            else:
                dyn[(st, c)] = (st, least)
    full = make_system(mach.before, mach.after, j.interp_inputs, j.interp_outputs, dyn)
    psi = morphism(
        s.patch.source,
        full,
        {st: s.psi.map_b(st) for st in s.patch.source.before},
        {st: s.psi.map_a(st) for st in s.patch.source.after},
        {c: s.psi.map_i(c) for c in s.patch.source.inputs},
        {o: s.psi.map_o(o) for o in s.patch.source.outputs},
    )
    return Section(s.patch, full, psi)


@dataclass(frozen=True)
class BehaviorPartition:
    """Joint behavior classes of the states of several machines over one
    alphabet, with per-class one-step data."""

    alphabet: tuple[Ident, ...]
    blocks: tuple[tuple[tuple[int, Ident], ...], ...]
    out_table: tuple[tuple[int, ...], ...]
    succ_table: tuple[tuple[int, ...], ...]
    outputs: tuple[Ident, ...]

    def block_of(self, machine: int, state: Ident) -> int:
        for k, members in enumerate(self.blocks):
            if (machine, state) in members:
                return k
        raise CheckerError(f"state ({machine}, {state!r}) not in the partition")

    def out(self, block: int, letter: Ident) -> Ident:
        return self.outputs[self.out_table[block][self.alphabet.index(letter)]]

    def succ(self, block: int, letter: Ident) -> int:
        return self.succ_table[block][self.alphabet.index(letter)]


def pooled_behavior(machines: Sequence[MealySystem], alphabet: tuple[Ident, ...]) -> BehaviorPartition:
    """Partition the disjoint union of the machines' states by behavioral
    equality over ``alphabet``."""
    if not machines:
        raise CheckerError("behavior pooling needs at least one machine")
    outputs = machines[0].outputs
    for m in machines:
        if m.outputs != outputs:
            raise CheckerError("pooled machines must share an output interface")
        for c in alphabet:
            if c not in m.i_index:
                raise CheckerError(f"letter {c!r} missing from a pooled machine")
    states = [(k, s) for k, m in enumerate(machines) for s in m.before]

    def tr(ks: tuple[int, Ident], c: Ident) -> tuple[tuple[int, Ident], Ident]:
        k, s = ks
        s2, o = machines[k].transition(s, c)
        return (k, s2), o

    block: dict[tuple[int, Ident], int] = {}
    sig0 = {ks: tuple(tr(ks, c)[1] for c in alphabet) for ks in states}
    keys = sorted(set(sig0.values()))
    for ks in states:
        block[ks] = keys.index(sig0[ks])
    while True:
        sig = {ks: (block[ks], tuple(block[tr(ks, c)[0]] for c in alphabet)) for ks in states}
        keys2 = sorted(set(sig.values()))
        nxt = {ks: keys2.index(sig[ks]) for ks in states}
        if len(keys2) == len(set(block.values())):
            break
        block = nxt
    n_blocks = len(set(block.values()))
    members: list[list[tuple[int, Ident]]] = [[] for _ in range(n_blocks)]
    for ks in states:
        members[block[ks]].append(ks)
    out_table: list[tuple[int, ...]] = []
    succ_table: list[tuple[int, ...]] = []
    o_ix = {o: k for k, o in enumerate(outputs)}
    for b in range(n_blocks):
        rep = members[b][0]
        outs: list[int] = []
        succs: list[int] = []
        for c in alphabet:
            nxt_ks, o = tr(rep, c)
            outs.append(o_ix[o])
            succs.append(block[nxt_ks])
        out_table.append(tuple(outs))
        succ_table.append(tuple(succs))
    return BehaviorPartition(
        tuple(alphabet),
        tuple(tuple(sorted(ms)) for ms in members),
        tuple(out_table),
        tuple(succ_table),
        outputs,
    )


def block_distinguishing_word(
    part: BehaviorPartition, b1: int, b2: int
) -> tuple[Ident, ...] | None:
    """Shortest lex-least word on which two behavior classes diverge, found
    by walking the class automaton."""
    if b1 == b2:
        return None
    seen: set[tuple[int, int]] = set()
    frontier: list[tuple[int, int, tuple[Ident, ...]]] = [(b1, b2, ())]
    while frontier:
        nxt: list[tuple[int, int, tuple[Ident, ...]]] = []
        for x, y, w in frontier:
            for c in part.alphabet:
                if part.out(x, c) != part.out(y, c):
                    return w + (c,)
            for c in part.alphabet:
                pair = (part.succ(x, c), part.succ(y, c))
                if pair[0] != pair[1] and pair not in seen:
                    seen.add(pair)
                    nxt.append((pair[0], pair[1], w + (c,)))
        frontier = nxt
    raise InternalConsistencyError("distinct behavior classes admit no separating word")
