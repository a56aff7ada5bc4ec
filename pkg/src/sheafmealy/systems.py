"""Finite Mealy machines with split state sets, morphisms, coverings, pushouts.

A machine here is a quadruple of finite carriers (before-states, after-states,
inputs, outputs) together with a total dynamics table
``step : before x inputs -> after x outputs``.  Keeping the before and after
carriers separate is what makes restriction well behaved: a patch may contain
a state whose one-step successors lie outside the patch, as long as the
successors are kept on the after side.  A machine is homogeneous when both
carriers coincide.

Carriers are sets of string identifiers, stored sorted and duplicate-free, so
structural equality of systems is plain dataclass equality.  Dynamics are
stored as dense index tables over the sorted carriers.

Top-level systems must have non-empty inputs and outputs.  Patches obtained
from pullbacks may have empty carriers or interfaces; they are legal covering
members and are checked structurally rather than through
:func:`validate_system`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    CheckerError,
    EmptyInterface,
    ForeignElement,
    InterfaceMismatch,
    InternalConsistencyError,
    PartialDynamics,
    ScaleExceeded,
)

Ident = str


def finset(elements: Iterable[Ident]) -> tuple[Ident, ...]:
    """Normalize identifiers into canonical sorted order, rejecting duplicates."""
    elems = tuple(sorted(elements))
    for x, y in zip(elems, elems[1:]):
        if x == y:
            raise CheckerError(f"duplicate identifier {x!r}")
    return elems


@dataclass(frozen=True)
class MealySystem:
    """Finite machine with separate before/after state carriers.

    ``step[b][i] = (a, o)`` gives the index of the successor state in
    ``after`` and of the emitted output in ``outputs``.
    """

    before: tuple[Ident, ...]
    after: tuple[Ident, ...]
    inputs: tuple[Ident, ...]
    outputs: tuple[Ident, ...]
    step: tuple[tuple[tuple[int, int], ...], ...]

    @cached_property
    def b_index(self) -> dict[Ident, int]:
        return {s: k for k, s in enumerate(self.before)}

    @cached_property
    def a_index(self) -> dict[Ident, int]:
        return {s: k for k, s in enumerate(self.after)}

    @cached_property
    def i_index(self) -> dict[Ident, int]:
        return {s: k for k, s in enumerate(self.inputs)}

    @cached_property
    def o_index(self) -> dict[Ident, int]:
        return {s: k for k, s in enumerate(self.outputs)}

    @property
    def homogeneous(self) -> bool:
        return self.before == self.after

    def transition(self, state: Ident, letter: Ident) -> tuple[Ident, Ident]:
        a, o = self.step[self.b_index[state]][self.i_index[letter]]
        return self.after[a], self.outputs[o]

    def run(self, state: Ident, word: Iterable[Ident]) -> tuple[Ident, ...]:
        """Emitted output sequence along ``word``; requires a homogeneous system."""
        outs: list[Ident] = []
        for letter in word:
            state, o = self.transition(state, letter)
            outs.append(o)
        return tuple(outs)


def make_system(
    before: Iterable[Ident],
    after: Iterable[Ident],
    inputs: Iterable[Ident],
    outputs: Iterable[Ident],
    dynamics: Mapping[tuple[Ident, Ident], tuple[Ident, Ident]],
) -> MealySystem:
    """Build a machine from a dynamics mapping ``(state, input) -> (state, output)``.

    Totality and carrier membership are enforced; empty interfaces are
    permitted here because pullback patches need them.
    """
    b = finset(before)
    a = finset(after)
    i = finset(inputs)
    o = finset(outputs)
    a_ix = {s: k for k, s in enumerate(a)}
    o_ix = {s: k for k, s in enumerate(o)}
    for (s, c), (s2, out) in dynamics.items():
        if s not in set(b) or c not in set(i):
            raise ForeignElement(f"dynamics defined at foreign pair ({s!r}, {c!r})")
        if s2 not in a_ix:
            raise ForeignElement(f"successor {s2!r} of ({s!r}, {c!r}) is not an after-state")
        if out not in o_ix:
            raise ForeignElement(f"output {out!r} of ({s!r}, {c!r}) is not in the output set")
    table: list[tuple[tuple[int, int], ...]] = []
    for s in b:
        row: list[tuple[int, int]] = []
        for c in i:
            if (s, c) not in dynamics:
                raise PartialDynamics(f"dynamics missing at ({s!r}, {c!r})")
            s2, out = dynamics[(s, c)]
            row.append((a_ix[s2], o_ix[out]))
        table.append(tuple(row))
    return MealySystem(b, a, i, o, tuple(table))


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


def system_violations(candidate: Mapping | MealySystem) -> list[Violation]:
    """All structural violations of a candidate system description.

    Accepts either a built :class:`MealySystem` or a mapping with keys
    ``before_states``, ``after_states``, ``inputs``, ``outputs`` and a
    ``dynamics`` list of ``{"s":..., "i":..., "s2":..., "o":...}`` entries.
    """
    out: list[Violation] = []
    if isinstance(candidate, MealySystem):
        if not candidate.inputs or not candidate.outputs:
            out.append(Violation("EmptyInterface", "inputs and outputs must be non-empty"))
        return out
    try:
        b = finset(candidate["before_states"])
        a = finset(candidate["after_states"])
        i = finset(candidate["inputs"])
        o = finset(candidate["outputs"])
    except KeyError as exc:
        return [Violation("ForeignElement", f"missing field {exc.args[0]!r}")]
    except CheckerError as exc:
        return [Violation("ForeignElement", str(exc))]
    if not i or not o:
        out.append(Violation("EmptyInterface", "inputs and outputs must be non-empty"))
    seen: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for row in candidate.get("dynamics", []):
        s, c, s2, emit = row["s"], row["i"], row["s2"], row["o"]
        if s not in b or c not in i:
            out.append(Violation("ForeignElement", f"dynamics at foreign pair ({s!r}, {c!r})"))
            continue
        if s2 not in a:
            out.append(Violation("ForeignElement", f"successor {s2!r} at ({s!r}, {c!r}) not an after-state"))
        if emit not in o:
            out.append(Violation("ForeignElement", f"output {emit!r} at ({s!r}, {c!r}) not in output set"))
        if (s, c) in seen and seen[(s, c)] != (s2, emit):
            out.append(Violation("ForeignElement", f"conflicting dynamics entries at ({s!r}, {c!r})"))
        seen[(s, c)] = (s2, emit)
    for s in b:
        for c in i:
            if (s, c) not in seen:
                out.append(Violation("PartialDynamics", f"dynamics missing at ({s!r}, {c!r})"))
    return out


_VIOLATION_ERRORS = {
    "EmptyInterface": EmptyInterface,
    "PartialDynamics": PartialDynamics,
    "ForeignElement": ForeignElement,
}


def validate_system(candidate: Mapping | MealySystem) -> MealySystem:
    """Validate a top-level system, raising the first violation found.

    Unlike :func:`make_system` this enforces non-empty inputs and outputs.
    """
    violations = system_violations(candidate)
    if violations:
        first = violations[0]
        raise _VIOLATION_ERRORS[first.kind](first.detail)
    if isinstance(candidate, MealySystem):
        return candidate
    dyn = {
        (row["s"], row["i"]): (row["s2"], row["o"])
        for row in candidate.get("dynamics", [])
    }
    return make_system(
        candidate["before_states"],
        candidate["after_states"],
        candidate["inputs"],
        candidate["outputs"],
        dyn,
    )


@dataclass(frozen=True)
class SystemMorphism:
    """Componentwise map of machines: before, after, input and output maps.

    The four components are independent; in particular the before and after
    maps of a homogeneous machine need not agree.  Stored as dense index
    tables over the source carriers.
    """

    source: MealySystem
    target: MealySystem
    f_b: tuple[int, ...]
    f_a: tuple[int, ...]
    f_i: tuple[int, ...]
    f_o: tuple[int, ...]

    def map_b(self, s: Ident) -> Ident:
        return self.target.before[self.f_b[self.source.b_index[s]]]

    def map_a(self, s: Ident) -> Ident:
        return self.target.after[self.f_a[self.source.a_index[s]]]

    def map_i(self, c: Ident) -> Ident:
        return self.target.inputs[self.f_i[self.source.i_index[c]]]

    def map_o(self, o: Ident) -> Ident:
        return self.target.outputs[self.f_o[self.source.o_index[o]]]


def _index_map(
    mapping: Mapping[Ident, Ident],
    source: tuple[Ident, ...],
    target: tuple[Ident, ...],
    label: str,
) -> tuple[int, ...]:
    t_ix = {s: k for k, s in enumerate(target)}
    out: list[int] = []
    for s in source:
        if s not in mapping:
            raise CheckerError(f"{label} map undefined at {s!r}")
        v = mapping[s]
        if v not in t_ix:
            raise CheckerError(f"{label} map sends {s!r} to foreign element {v!r}")
        out.append(t_ix[v])
    return tuple(out)


def morphism(
    source: MealySystem,
    target: MealySystem,
    f_b: Mapping[Ident, Ident],
    f_a: Mapping[Ident, Ident],
    f_i: Mapping[Ident, Ident],
    f_o: Mapping[Ident, Ident],
) -> SystemMorphism:
    """Build a morphism from identifier mappings; totality is enforced here,
    the dynamics square is checked separately by :func:`check_morphism`."""
    return SystemMorphism(
        source,
        target,
        _index_map(f_b, source.before, target.before, "before"),
        _index_map(f_a, source.after, target.after, "after"),
        _index_map(f_i, source.inputs, target.inputs, "input"),
        _index_map(f_o, source.outputs, target.outputs, "output"),
    )


def identity_morphism(system: MealySystem) -> SystemMorphism:
    return SystemMorphism(
        system,
        system,
        tuple(range(len(system.before))),
        tuple(range(len(system.after))),
        tuple(range(len(system.inputs))),
        tuple(range(len(system.outputs))),
    )


def compose(first: SystemMorphism, second: SystemMorphism) -> SystemMorphism:
    """Composite morphism, ``first`` followed by ``second``."""
    if first.target != second.source:
        raise CheckerError("composition mismatch: target of first is not source of second")
    return SystemMorphism(
        first.source,
        second.target,
        tuple(second.f_b[k] for k in first.f_b),
        tuple(second.f_a[k] for k in first.f_a),
        tuple(second.f_i[k] for k in first.f_i),
        tuple(second.f_o[k] for k in first.f_o),
    )


@dataclass(frozen=True)
class MorphismCheck:
    ok: bool
    witness: tuple[Ident, Ident] | None = None


def check_morphism(m: SystemMorphism) -> MorphismCheck:
    """Check the dynamics square; on failure, report the first (state, input)
    pair, in carrier order, where mapping-then-stepping differs from
    stepping-then-mapping."""
    src, tgt = m.source, m.target
    for b, s in enumerate(src.before):
        for i, c in enumerate(src.inputs):
            a, o = src.step[b][i]
            a2, o2 = tgt.step[m.f_b[b]][m.f_i[i]]
            if (m.f_a[a], m.f_o[o]) != (a2, o2):
                return MorphismCheck(False, (s, c))
    return MorphismCheck(True, None)


@dataclass(frozen=True)
class OpenImmersion:
    """A morphism all four components of which are injective.

    Between discrete finite carriers every injection is open, so injectivity
    is the whole invariant; the dynamics square is still a separate check.
    """

    morphism: SystemMorphism

    @property
    def source(self) -> MealySystem:
        return self.morphism.source

    @property
    def target(self) -> MealySystem:
        return self.morphism.target

    @cached_property
    def b_image(self) -> frozenset[Ident]:
        return frozenset(self.morphism.map_b(s) for s in self.source.before)

    @cached_property
    def a_image(self) -> frozenset[Ident]:
        return frozenset(self.morphism.map_a(s) for s in self.source.after)

    @cached_property
    def i_image(self) -> frozenset[Ident]:
        return frozenset(self.morphism.map_i(c) for c in self.source.inputs)

    @cached_property
    def o_image(self) -> frozenset[Ident]:
        return frozenset(self.morphism.map_o(o) for o in self.source.outputs)

    def pre_b(self, s: Ident) -> Ident:
        return self.source.before[self.morphism.f_b.index(self.target.b_index[s])]

    def pre_a(self, s: Ident) -> Ident:
        return self.source.after[self.morphism.f_a.index(self.target.a_index[s])]

    def pre_i(self, c: Ident) -> Ident:
        return self.source.inputs[self.morphism.f_i.index(self.target.i_index[c])]

    def pre_o(self, o: Ident) -> Ident:
        return self.source.outputs[self.morphism.f_o.index(self.target.o_index[o])]


def open_immersion(m: SystemMorphism) -> OpenImmersion:
    for name, comp in (("before", m.f_b), ("after", m.f_a), ("input", m.f_i), ("output", m.f_o)):
        if len(set(comp)) != len(comp):
            raise CheckerError(f"immersion {name} component is not injective")
    return OpenImmersion(m)


def subsystem(
    system: MealySystem,
    before: Iterable[Ident] | None = None,
    after: Iterable[Ident] | None = None,
    inputs: Iterable[Ident] | None = None,
    outputs: Iterable[Ident] | None = None,
) -> OpenImmersion:
    """Open immersion of the full subsystem on the given carriers.

    Requires closure: every step from the kept before-states under the kept
    inputs must land in the kept after-states with a kept output.
    """
    b = finset(before if before is not None else system.before)
    a = finset(after if after is not None else system.after)
    i = finset(inputs if inputs is not None else system.inputs)
    o = finset(outputs if outputs is not None else system.outputs)
    for s in b:
        if s not in system.b_index:
            raise ForeignElement(f"{s!r} is not a before-state")
    for s in a:
        if s not in system.a_index:
            raise ForeignElement(f"{s!r} is not an after-state")
    for c in i:
        if c not in system.i_index:
            raise ForeignElement(f"{c!r} is not an input")
    for x in o:
        if x not in system.o_index:
            raise ForeignElement(f"{x!r} is not an output")
    a_set, o_set = set(a), set(o)
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for s in b:
        for c in i:
            s2, out = system.transition(s, c)
            if s2 not in a_set or out not in o_set:
                raise CheckerError(
                    f"carriers not closed: step at ({s!r}, {c!r}) leaves the patch"
                )
            dyn[(s, c)] = (s2, out)
    sub = make_system(b, a, i, o, dyn)
    incl = morphism(sub, system, {s: s for s in b}, {s: s for s in a},
                    {c: c for c in i}, {x: x for x in o})
    return OpenImmersion(incl)


@dataclass(frozen=True)
class Covering:
    """Finite family of open immersions into one target.

    The covering condition is joint surjectivity on both products,
    before x inputs and after x outputs; it is strictly stronger than
    surjectivity factor by factor and is checked by :func:`check_covering`.
    """

    target: MealySystem
    patches: tuple[OpenImmersion, ...]


def covering(target: MealySystem, patches: Iterable[OpenImmersion]) -> Covering:
    """Normalize a patch family: duplicates collapse, order is preserved."""
    kept: list[OpenImmersion] = []
    for p in patches:
        if p.target != target:
            raise CheckerError("covering patch does not map into the stated target")
        if p not in kept:
            kept.append(p)
    if not kept:
        raise CheckerError("coverings need at least one patch")
    return Covering(target, tuple(kept))


@dataclass(frozen=True)
class CoveringCheck:
    ok: bool
    side: str | None = None
    pair: tuple[Ident, Ident] | None = None


def check_covering(c: Covering) -> CoveringCheck:
    """Joint surjectivity on before x inputs and after x outputs; on failure
    report the first uncovered pair in carrier order."""
    tgt = c.target
    cov_b: set[tuple[Ident, Ident]] = set()
    cov_a: set[tuple[Ident, Ident]] = set()
    for p in c.patches:
        m = p.morphism
        src = p.source
        cov_b.update(
            (m.map_b(s), m.map_i(ch))
            for s in src.before
            for ch in src.inputs
        )
        cov_a.update(
            (m.map_a(s), m.map_o(o))
            for s in src.after
            for o in src.outputs
        )
    for s in tgt.before:
        for ch in tgt.inputs:
            if (s, ch) not in cov_b:
                return CoveringCheck(False, "before", (s, ch))
    for s in tgt.after:
        for o in tgt.outputs:
            if (s, o) not in cov_a:
                return CoveringCheck(False, "after", (s, o))
    return CoveringCheck(True)


def overlap_patch(p: OpenImmersion, q: OpenImmersion) -> OpenImmersion:
    """Intersection of two patches of one target, as a patch of that target."""
    if p.target != q.target:
        raise CheckerError("patches of different targets have no overlap")
    return subsystem(
        p.target,
        sorted(p.b_image & q.b_image),
        sorted(p.a_image & q.a_image),
        sorted(p.i_image & q.i_image),
        sorted(p.o_image & q.o_image),
    )


def restrict_immersion(w: OpenImmersion, p: OpenImmersion) -> OpenImmersion:
    """Factor the patch ``w`` through the containing patch ``p``.

    Requires the images of ``w`` to lie inside those of ``p``; the result is
    the immersion ``w.source -> p.source`` with ``p`` after it giving ``w``.
    """
    if w.target != p.target:
        raise CheckerError("patches of different targets cannot be factored")
    if not (w.b_image <= p.b_image and w.a_image <= p.a_image
            and w.i_image <= p.i_image and w.o_image <= p.o_image):
        raise CheckerError("patch does not lie inside the containing patch")
    wm = w.morphism
    return OpenImmersion(morphism(
        w.source,
        p.source,
        {s: p.pre_b(wm.map_b(s)) for s in w.source.before},
        {s: p.pre_a(wm.map_a(s)) for s in w.source.after},
        {c: p.pre_i(wm.map_i(c)) for c in w.source.inputs},
        {o: p.pre_o(wm.map_o(o)) for o in w.source.outputs},
    ))


def pullback_covering(c: Covering, n: OpenImmersion) -> Covering:
    """Restrict a covering along a patch ``n`` of the same target.

    Each patch is intersected with ``n`` componentwise and re-expressed as a
    patch of ``n``'s source.  Patches whose before x input and after x output
    products are both empty are dropped; if everything drops (only possible
    when the source itself is fully empty) the identity patch is kept so the
    family stays non-empty.
    """
    if n.target != c.target:
        raise CheckerError("cannot pull a covering back along a patch of another target")
    src = n.source
    patches: list[OpenImmersion] = []
    for p in c.patches:
        b = sorted(n.pre_b(s) for s in (p.b_image & n.b_image))
        a = sorted(n.pre_a(s) for s in (p.a_image & n.a_image))
        i = sorted(n.pre_i(ch) for ch in (p.i_image & n.i_image))
        o = sorted(n.pre_o(x) for x in (p.o_image & n.o_image))
        if (not b or not i) and (not a or not o):
            continue
        patches.append(subsystem(src, b, a, i, o))
    if not patches:
        patches.append(subsystem(src))
    return covering(src, patches)


class _UnionFind:
    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass(frozen=True)
class Amalgam:
    """Quotient of a disjoint union of homogeneous machines by identifications."""

    system: MealySystem
    embeddings: tuple[SystemMorphism, ...]


def amalgamate(
    components: list[MealySystem],
    identifications: Iterable[tuple[int, Ident, int, Ident]],
) -> Amalgam:
    """Quotient machine of ``sum components / (k, s) ~ (l, t)``.

    All components must be homogeneous and share one interface.  The step of
    a class is taken from its members; members that disagree on the class of
    the successor or on the output make the quotient dynamics ill defined,
    which is an internal error because every caller identifies along a span
    of morphisms, and chains of such identifications preserve one-step data.
    """
    if not components:
        raise CheckerError("amalgamation needs at least one component")
    iface_i, iface_o = components[0].inputs, components[0].outputs
    for comp in components:
        if not comp.homogeneous:
            raise CheckerError("amalgamation is defined for homogeneous machines")
        if comp.inputs != iface_i or comp.outputs != iface_o:
            raise InterfaceMismatch("amalgamation components must share one interface")
    offsets: list[int] = []
    total = 0
    for comp in components:
        offsets.append(total)
        total += len(comp.before)
    uf = _UnionFind(total)
    for k, s, l, t in identifications:
        uf.union(offsets[k] + components[k].b_index[s], offsets[l] + components[l].b_index[t])
    classes: dict[int, list[tuple[int, Ident]]] = {}
    for k, comp in enumerate(components):
        for s in comp.before:
            classes.setdefault(uf.find(offsets[k] + comp.b_index[s]), []).append((k, s))
    # Deterministic readable names: member names joined, disambiguated on clash.
    roots = sorted(classes, key=lambda r: sorted(classes[r]))
    base_names = {}
    for r in roots:
        base_names[r] = "+".join(sorted({s for _, s in classes[r]}))
    counts: dict[str, int] = {}
    names: dict[int, Ident] = {}
    for r in roots:
        n = base_names[r]
        seen = counts.get(n, 0)
        counts[n] = seen + 1
        names[r] = n if sum(1 for x in roots if base_names[x] == n) == 1 else f"{n}#{seen}"
    if len(set(names.values())) != len(roots):
        # Pathological identifier clash; fall back to opaque canonical names.
        names = {r: f"q{k}" for k, r in enumerate(roots)}
    state_of: dict[tuple[int, Ident], Ident] = {}
    for r, members in classes.items():
        for member in members:
            state_of[member] = names[r]
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for k, comp in enumerate(components):
        for s in comp.before:
            for c in iface_i:
                s2, out = comp.transition(s, c)
                key = (state_of[(k, s)], c)
                val = (state_of[(k, s2)], out)
                if key in dyn and dyn[key] != val:
                    raise InternalConsistencyError(
                        f"quotient dynamics ill defined at {key!r}: {dyn[key]!r} vs {val!r}"
                    )
                dyn.setdefault(key, val)
    carrier = sorted(names[r] for r in roots)
    system = make_system(carrier, carrier, iface_i, iface_o, dyn)
    embeds = tuple(
        morphism(
            comp,
            system,
            {s: state_of[(k, s)] for s in comp.before},
            {s: state_of[(k, s)] for s in comp.after},
            {c: c for c in iface_i},
            {o: o for o in iface_o},
        )
        for k, comp in enumerate(components)
    )
    return Amalgam(system, embeds)


@dataclass(frozen=True)
class PushoutResult:
    apex: MealySystem
    can_a: SystemMorphism
    can_b: SystemMorphism


def _require_state_map(m: SystemMorphism, label: str) -> None:
    if m.source.inputs != m.target.inputs or m.source.outputs != m.target.outputs:
        raise InterfaceMismatch(f"{label} must keep the interface fixed")
    n_i, n_o = len(m.source.inputs), len(m.source.outputs)
    if m.f_i != tuple(range(n_i)) or m.f_o != tuple(range(n_o)):
        raise InterfaceMismatch(f"{label} must be the identity on inputs and outputs")
    if m.f_b != m.f_a:
        raise CheckerError(f"{label} must act the same on before- and after-states")


def pushout_along_mono(
    c: MealySystem,
    a: MealySystem,
    b: MealySystem,
    m: SystemMorphism,
    f: SystemMorphism,
) -> PushoutResult:
    """Pushout of homogeneous machines ``a <-m- c -f-> b`` with ``m`` injective.

    Computed as the quotient of the disjoint union of ``a`` and ``b`` by
    ``m(x) ~ f(x)``.  Injectivity of ``m`` guarantees the quotient dynamics
    are well defined and that the canonical map from ``b`` is injective; a
    post-hoc failure of well-definedness is therefore an internal error.
    """
    for sys_, label in ((c, "c"), (a, "a"), (b, "b")):
        if not sys_.homogeneous:
            raise CheckerError(f"pushout components must be homogeneous ({label} is not)")
    if a.inputs != b.inputs or a.outputs != b.outputs:
        raise InterfaceMismatch("pushout legs must share one interface")
    if m.source != c or m.target != a or f.source != c or f.target != b:
        raise CheckerError("pushout legs do not match the given span")
    _require_state_map(m, "the mono leg")
    _require_state_map(f, "the free leg")
    if len(set(m.f_b)) != len(m.f_b):
        raise CheckerError("the leg into the first component must be injective on states")
    for leg, label in ((m, "mono leg"), (f, "free leg")):
        chk = check_morphism(leg)
        if not chk.ok:
            raise CheckerError(f"{label} is not a morphism (square fails at {chk.witness!r})")
    amalgam = amalgamate([a, b], [(0, m.map_b(s), 1, f.map_b(s)) for s in c.before])
    return PushoutResult(amalgam.system, amalgam.embeddings[0], amalgam.embeddings[1])


def _identity_interface_pullback(
    h: SystemMorphism, g: SystemMorphism
) -> tuple[MealySystem, dict[Ident, tuple[Ident, Ident]]]:
    """State-pair pullback of two interface-fixing morphisms into one target."""
    x_sys, w_sys = h.source, g.source
    pairs = sorted(
        (x, w)
        for x in x_sys.before
        for w in w_sys.before
        if h.map_b(x) == g.map_b(w)
    )
    names: dict[tuple[Ident, Ident], Ident] = {}
    for x, w in pairs:
        if "|" in x or "|" in w:
            raise InternalConsistencyError("state names with '|' break pair naming")
        names[(x, w)] = f"{x}|{w}"
    dyn: dict[tuple[Ident, Ident], tuple[Ident, Ident]] = {}
    for x, w in pairs:
        for ch in x_sys.inputs:
            x2, o1 = x_sys.transition(x, ch)
            w2, o2 = w_sys.transition(w, ch)
            if o1 != o2 or (x2, w2) not in names:
                raise InternalConsistencyError("pullback pair dynamics left the pair set")
            dyn[(names[(x, w)], ch)] = (names[(x2, w2)], o1)
    carrier = sorted(names.values())
    system = make_system(carrier, carrier, x_sys.inputs, x_sys.outputs, dyn)
    return system, {names[p]: p for p in pairs}


@dataclass(frozen=True)
class VKReport:
    ok: bool
    reason: str | None
    pulled_sizes: tuple[int, int, int]


def verify_vk_square(
    c: MealySystem,
    a: MealySystem,
    b: MealySystem,
    m: SystemMorphism,
    f: SystemMorphism,
    g: SystemMorphism,
) -> VKReport:
    """Stability of the pushout of ``a <-m- c -f-> b`` under pulling back.

    ``g`` must be an interface-fixing morphism into the computed pushout
    apex.  The three legs are pulled back along ``g``, the pushout of the
    pulled-back span is computed, and the verdict says whether its canonical
    comparison onto ``g``'s source is an isomorphism of machines.  Component
    sizes above 5 states raise :class:`ScaleExceeded`.
    """
    for sys_, label in ((c, "c"), (a, "a"), (b, "b"), (g.source, "test source")):
        if len(sys_.before) > 5:
            raise ScaleExceeded(f"component {label} has more than 5 states")
    po = pushout_along_mono(c, a, b, m, f)
    if g.target != po.apex:
        raise CheckerError("test morphism must map into the pushout apex")
    _require_state_map(g, "the test morphism")
    gchk = check_morphism(g)
    if not gchk.ok:
        raise CheckerError(f"test morphism square fails at {gchk.witness!r}")
    w_sys = g.source

    a_pb, a_members = _identity_interface_pullback(po.can_a, g)
    b_pb, b_members = _identity_interface_pullback(po.can_b, g)
    c_pb, c_members = _identity_interface_pullback(compose(m, po.can_a), g)

    def pair_map(src: MealySystem, members: dict, tgt: MealySystem,
                 tgt_members: dict, leg: SystemMorphism) -> SystemMorphism:
        table: dict[Ident, Ident] = {}
        rev = {v: k for k, v in tgt_members.items()}
        for name in src.before:
            x, w = members[name]
            table[name] = rev[(leg.map_b(x), w)]
        return morphism(src, tgt, table, table,
                        {ch: ch for ch in src.inputs}, {o: o for o in src.outputs})

    m_pb = pair_map(c_pb, c_members, a_pb, a_members, m)
    f_pb = pair_map(c_pb, c_members, b_pb, b_members, f)
    sizes = (len(a_pb.before), len(b_pb.before), len(c_pb.before))
    top = pushout_along_mono(c_pb, a_pb, b_pb, m_pb, f_pb)

    # Canonical comparison onto g's source: a class goes to the shared second
    # coordinate of its members.
    med_table: dict[Ident, Ident] = {}
    for name in a_pb.before:
        cls = top.can_a.map_b(name)
        w = a_members[name][1]
        if med_table.setdefault(cls, w) != w:
            return VKReport(False, f"comparison map ill defined at class {cls!r}", sizes)
    for name in b_pb.before:
        cls = top.can_b.map_b(name)
        w = b_members[name][1]
        if med_table.setdefault(cls, w) != w:
            return VKReport(False, f"comparison map ill defined at class {cls!r}", sizes)
    if len(med_table) != len(top.apex.before):
        raise InternalConsistencyError("canonical maps failed to cover the apex")
    hit = set(med_table.values())
    if hit != set(w_sys.before):
        missing = sorted(set(w_sys.before) - hit)
        return VKReport(False, f"comparison map misses states {missing!r}", sizes)
    if len(hit) != len(top.apex.before):
        return VKReport(False, "comparison map identifies distinct classes", sizes)
    med = morphism(top.apex, w_sys, med_table, med_table,
                   {ch: ch for ch in w_sys.inputs}, {o: o for o in w_sys.outputs})
    chk = check_morphism(med)
    if not chk.ok:
        return VKReport(False, f"comparison map breaks dynamics at {chk.witness!r}", sizes)
    return VKReport(True, None, sizes)


def systems_isomorphic(s1: MealySystem, s2: MealySystem) -> bool:
    """State-renaming isomorphism test for homogeneous machines on one
    interface.  Backtracking over output signatures; at most 8 states."""
    if not (s1.homogeneous and s2.homogeneous):
        raise CheckerError("isomorphism test is for homogeneous machines")
    if s1.inputs != s2.inputs or s1.outputs != s2.outputs:
        return False
    if len(s1.before) != len(s2.before):
        return False
    if len(s1.before) > 8:
        raise ScaleExceeded("isomorphism test capped at 8 states")

    def signature(sys_: MealySystem, s: Ident) -> tuple[Ident, ...]:
        return tuple(sys_.transition(s, ch)[1] for ch in sys_.inputs)

    candidates = {
        s: [t for t in s2.before if signature(s2, t) == signature(s1, s)]
        for s in s1.before
    }

    def extend(assign: dict[Ident, Ident], used: set[Ident], todo: list[Ident]) -> bool:
        if not todo:
            return all(
                assign[s1.transition(s, ch)[0]] == s2.transition(assign[s], ch)[0]
                for s in s1.before
                for ch in s1.inputs
            )
        s = todo[0]
        for t in candidates[s]:
            if t in used:
                continue
            assign[s] = t
            used.add(t)
            ok = True
            for ch in s1.inputs:
                nxt1 = s1.transition(s, ch)[0]
                nxt2 = s2.transition(t, ch)[0]
                if nxt1 in assign and assign[nxt1] != nxt2:
                    ok = False
                    break
            if ok and extend(assign, used, todo[1:]):
                return True
            del assign[s]
            used.remove(t)
        return False

    return extend({}, set(), list(s1.before))


def product_pairs(system: MealySystem) -> Iterable[tuple[Ident, Ident]]:
    """Iterator over the before x input product in carrier order."""
    return itertools.product(system.before, system.inputs)
