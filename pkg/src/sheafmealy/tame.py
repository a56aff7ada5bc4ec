"""Exact fiber topology of axis-aligned rectangle unions under projection.

Domains are finite unions of open/half-open/closed axis-aligned rectangles
in the plane (or intervals on the line) with rational endpoints; the judged
input map is the projection onto one axis.  Everything here is computed in
exact rational arithmetic; there are no tolerances in this module.

Two facts, proved directly for this class of domains, drive the algorithms:

* Components by pairwise linkage.  Boxes A and B satisfy
  ``cl(A) meets B or A meets cl(B)`` exactly when their union is connected,
  and for a finite family the connected components are the classes of the
  transitive closure of this relation: any class is chainwise connected,
  and distinct classes are separated sets (neither contains a limit point
  of the other), coordinatewise because closures of products are products
  of closures.

* Candidate abscissae.  With the judged axis fixed, nothing about the band
  ``projection in (t - d, t + d)`` changes while the band avoids interval
  endpoints of the union on that axis: component structure and fiber
  membership are constant on each open gap between consecutive endpoints.
  A full sheaf verdict therefore needs only the endpoints themselves plus
  one interior point per gap; midpoints are used.

A robustly disconnected fiber at ``t0`` means: some open band around ``t0``
has its preimage split by two disjoint relatively open sets, both meeting
the fiber.  Components of the preimage are relatively open (the domains are
locally connected), so this holds exactly when the preimage of a small band
has at least two components meeting the fiber; the certificate lists all
band components with a marked rational fiber point in each one that meets
the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CheckerError, InternalConsistencyError
from .explain import Judge, judge as make_judge
from .localglobal import (
    GlueStatelessResult,
    ObstructionReport,
    glue_stateless,
    stateless_ri_section,
)
from .systems import Covering, MealySystem, covering, make_system, subsystem

Point = tuple[Fraction, ...]


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and self.lo_open:
            return False
        if x == self.hi and self.hi_open:
            return False
        return True

    def intersect(self, other: Interval) -> Interval:
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def closure(self) -> Interval:
        return Interval(self.lo, self.hi, False, False)

    def representative(self) -> Fraction:
        """A rational point inside a non-empty interval."""
        if self.empty:
            raise CheckerError("empty interval has no representative")
        if self.lo == self.hi:
            return self.lo
        return (self.lo + self.hi) / 2


def interval(lo: Fraction | int | str, hi: Fraction | int | str,
             lo_open: bool = False, hi_open: bool = False) -> Interval:
    return Interval(Fraction(lo), Fraction(hi), lo_open, hi_open)


def _linked_1d(a: Interval, b: Interval) -> bool:
    """Union of two non-empty intervals is an interval (touch needs a closed
    side on at least one of them)."""
    if a.lo > b.lo or (a.lo == b.lo and a.lo_open and not b.lo_open):
        a, b = b, a
    if a.hi > b.lo:
        return True
    if a.hi == b.lo:
        return not (a.hi_open and b.lo_open)
    return False


def merge_intervals(parts: Iterable[Interval]) -> tuple[Interval, ...]:
    """Maximal connected components of a finite union of intervals."""
    todo = sorted(p for p in parts if not p.empty)
    out: list[Interval] = []
    for iv in todo:
        if out and _linked_1d(out[-1], iv):
            last = out.pop()
            lo, lo_open = last.lo, last.lo_open
            if iv.lo < lo or (iv.lo == lo and not iv.lo_open):
                lo, lo_open = iv.lo, iv.lo_open and lo_open
            if iv.hi > last.hi or (iv.hi == last.hi and not iv.hi_open):
                hi, hi_open = iv.hi, iv.hi_open
            else:
                hi, hi_open = last.hi, last.hi_open
            out.append(Interval(lo, hi, lo_open, hi_open))
        else:
            out.append(iv)
    return tuple(out)


@dataclass(frozen=True, order=True)
class Rect:
    x: Interval
    y: Interval | None = None

    @property
    def empty(self) -> bool:
        return self.x.empty or (self.y is not None and self.y.empty)

    def axis(self, k: int) -> Interval:
        if k == 0:
            return self.x
        if k == 1 and self.y is not None:
            return self.y
        raise CheckerError(f"axis {k} out of range")

    def contains(self, p: Point) -> bool:
        if self.y is None:
            return len(p) == 1 and self.x.contains(p[0])
        return len(p) == 2 and self.x.contains(p[0]) and self.y.contains(p[1])


@dataclass(frozen=True)
class RectUnion:
    dim: int
    rects: tuple[Rect, ...]

    def contains(self, p: Point) -> bool:
        return any(r.contains(p) for r in self.rects)

    @property
    def empty(self) -> bool:
        return not self.rects


def _try_merge(a: Rect, b: Rect) -> Rect | None:
    if a.y is None:
        if _linked_1d(a.x, b.x):
            merged = merge_intervals([a.x, b.x])
            if len(merged) == 1:
                return Rect(merged[0], None)
        return None
    if a.y == b.y and _linked_1d(a.x, b.x):
        merged = merge_intervals([a.x, b.x])
        if len(merged) == 1:
            return Rect(merged[0], a.y)
    if a.x == b.x and _linked_1d(a.y, b.y):
        merged = merge_intervals([a.y, b.y])
        if len(merged) == 1:
            return Rect(a.x, merged[0])
    return None


def rect_union(dim: int, rects: Iterable[Rect]) -> RectUnion:
    """Normalize: drop empty boxes, merge aligned neighbours, sort."""
    if dim not in (1, 2):
        raise CheckerError("only dimensions 1 and 2 are supported")
    kept = [r for r in rects if not r.empty]
    for r in kept:
        if dim == 1 and r.y is not None:
            raise CheckerError("1-dimensional unions take bare intervals")
        if dim == 2 and r.y is None:
            raise CheckerError("2-dimensional unions need both axes")
    changed = True
    while changed:
        changed = False
        for i in range(len(kept)):
            for k in range(i + 1, len(kept)):
                merged = _try_merge(kept[i], kept[k])
                if merged is not None:
                    kept[k] = merged
                    del kept[i]
                    changed = True
                    break
            if changed:
                break
    return RectUnion(dim, tuple(sorted(kept)))


def _rects_linked(a: Rect, b: Rect) -> bool:
    """Whether the union of two non-empty boxes is connected."""
    if a.y is None:
        return _linked_1d(a.x, b.x)
    fwd = (
        not a.x.closure().intersect(b.x).empty
        and not a.y.closure().intersect(b.y).empty
    )
    bwd = (
        not a.x.intersect(b.x.closure()).empty
        and not a.y.intersect(b.y.closure()).empty
    )
    return fwd or bwd


def components(u: RectUnion) -> tuple[RectUnion, ...]:
    """Connected components, each as a rectangle union."""
    rects = list(u.rects)
    n = len(rects)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for k in range(i + 1, n):
            if _rects_linked(rects[i], rects[k]):
                ri, rk = find(i), find(k)
                if ri != rk:
                    parent[max(ri, rk)] = min(ri, rk)
    groups: dict[int, list[Rect]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(rects[i])
    return tuple(
        rect_union(u.dim, groups[r]) for r in sorted(groups, key=lambda r: sorted(groups[r]))
    )


@dataclass(frozen=True)
class ProjectionJudge:
    """Judged input map: projection of the domain onto one axis."""

    axis: int


def critical_values(u: RectUnion, axis: int) -> tuple[Fraction, ...]:
    """Interval endpoints of the union on the given axis, sorted."""
    vals: set[Fraction] = set()
    for r in u.rects:
        iv = r.axis(axis)
        vals.add(iv.lo)
        vals.add(iv.hi)
    return tuple(sorted(vals))


def fiber(u: RectUnion, pj: ProjectionJudge, t: Fraction) -> tuple[Interval, ...]:
    """The fiber of the projection at ``t`` as merged interval components.

    In dimension 1 the fiber is the point itself (a degenerate interval)
    when it lies in the union.
    """
    t = Fraction(t)
    if u.dim == 1:
        if pj.axis != 0:
            raise CheckerError("1-dimensional unions project on axis 0")
        return (Interval(t, t),) if u.contains((t,)) else ()
    if pj.axis not in (0, 1):
        raise CheckerError("projection axis must be 0 or 1")
    other = 1 - pj.axis
    parts = [r.axis(other) for r in u.rects if r.axis(pj.axis).contains(t)]
    return merge_intervals(parts)


def _clip_axis(r: Rect, axis: int, band: Interval) -> Rect | None:
    iv = r.axis(axis).intersect(band)
    if iv.empty:
        return None
    if r.y is None:
        return Rect(iv, None)
    return Rect(iv, r.y) if axis == 0 else Rect(r.x, iv)


def clip_band(u: RectUnion, axis: int, band: Interval) -> RectUnion:
    kept = [c for c in (_clip_axis(r, axis, band) for r in u.rects) if c is not None]
    return rect_union(u.dim, kept)


def subtract_closed_band(u: RectUnion, axis: int, lo: Fraction, hi: Fraction) -> RectUnion:
    """Remove ``axis-coordinate in [lo, hi]`` from the union; the cut edges
    of the remainder are open because the removed band is closed."""
    out: list[Rect] = []
    for r in u.rects:
        iv = r.axis(axis)
        left = iv.intersect(Interval(iv.lo, lo, iv.lo_open, True))
        right = iv.intersect(Interval(hi, iv.hi, True, iv.hi_open))
        for piece in (left, right):
            if piece.empty:
                continue
            if r.y is None:
                out.append(Rect(piece, None))
            elif axis == 0:
                out.append(Rect(piece, r.y))
            else:
                out.append(Rect(r.x, piece))
    return rect_union(u.dim, out)


@dataclass(frozen=True)
class StripComponents:
    t0: Fraction
    delta: Fraction
    strip: RectUnion
    components: tuple[RectUnion, ...]
    meets_fiber: tuple[bool, ...]


def _default_delta(u: RectUnion, pj: ProjectionJudge, t0: Fraction) -> Fraction:
    others = [v for v in critical_values(u, pj.axis) if v != t0]
    if not others:
        return Fraction(1)
    return min(abs(v - t0) for v in others) / 2


def preimage_components_near(
    u: RectUnion,
    pj: ProjectionJudge,
    t0: Fraction,
    delta: Fraction | None = None,
) -> StripComponents:
    """Components of the preimage of the open band ``(t0 - d, t0 + d)``.

    The band must avoid every interval endpoint of the union on the judged
    axis other than ``t0`` itself; the default ``d`` is half the distance to
    the nearest such endpoint.  On each open gap between endpoints the answer
    is the same for every admissible ``d``, which the test suite exercises by
    comparing two widths.
    """
    t0 = Fraction(t0)
    if delta is None:
        delta = _default_delta(u, pj, t0)
    else:
        delta = Fraction(delta)
        if delta <= 0:
            raise CheckerError("the band width must be positive")
        for v in critical_values(u, pj.axis):
            if v != t0 and abs(v - t0) <= delta:
                raise CheckerError(
                    f"band width {delta} reaches the critical abscissa {v}"
                )
    band = Interval(t0 - delta, t0 + delta, True, True)
    strip = clip_band(u, pj.axis, band)
    comps = components(strip)
    marks = tuple(bool(fiber(comp, pj, t0)) for comp in comps)
    return StripComponents(t0, delta, strip, comps, marks)


@dataclass(frozen=True)
class RobustDisconnectionCertificate:
    """Witness that the fiber at ``t0`` is robustly disconnected.

    ``components`` are all components of the preimage of the open band
    ``(n_lo, n_hi)``; ``fiber_points`` marks a rational fiber point inside
    each component that meets the fiber (None otherwise); ``v_index`` is the
    first fiber-meeting component, the remaining ones forming the other side
    of the disconnection.
    """

    t0: Fraction
    n_lo: Fraction
    n_hi: Fraction
    components: tuple[RectUnion, ...]
    fiber_points: tuple[Point | None, ...]
    v_index: int


def _fiber_point(comp: RectUnion, pj: ProjectionJudge, t0: Fraction) -> Point | None:
    pieces = fiber(comp, pj, t0)
    if not pieces:
        return None
    if comp.dim == 1:
        return (t0,)
    y = pieces[0].representative()
    return (t0, y) if pj.axis == 0 else (y, t0)


def robustly_disconnected(
    u: RectUnion,
    pj: ProjectionJudge,
    t0: Fraction,
    delta: Fraction | None = None,
) -> RobustDisconnectionCertificate | None:
    """Certificate that the fiber at ``t0`` splits across band components,
    or None when every admissible band keeps it inside one component."""
    sc = preimage_components_near(u, pj, t0, delta)
    hits = [k for k, m in enumerate(sc.meets_fiber) if m]
    if len(hits) < 2:
        return None
    points = tuple(_fiber_point(comp, pj, sc.t0) for comp in sc.components)
    return RobustDisconnectionCertificate(
        sc.t0,
        sc.t0 - sc.delta,
        sc.t0 + sc.delta,
        sc.components,
        points,
        hits[0],
    )


@dataclass(frozen=True)
class SheafVerdict:
    is_sheaf: bool
    candidates: tuple[Fraction, ...]
    certificates: tuple[RobustDisconnectionCertificate, ...]
    notes: tuple[str, ...]


def sheaf_verdict(u: RectUnion, pj: ProjectionJudge) -> SheafVerdict:
    """Decide whether stateless explanations over this domain glue globally.

    Gluing over every covering holds exactly when no fiber of the projection
    is robustly disconnected; by piecewise constancy it suffices to examine
    the interval endpoints on the judged axis and one midpoint per gap.
    """
    crit = critical_values(u, pj.axis)
    candidates: list[Fraction] = list(crit)
    for a, b in zip(crit, crit[1:]):
        candidates.append((a + b) / 2)
    candidates = sorted(set(candidates))
    certs = []
    for t in candidates:
        cert = robustly_disconnected(u, pj, t)
        if cert is not None:
            certs.append(cert)
    notes: list[str] = []
    if any(
        r.axis(k).lo_open or r.axis(k).hi_open
        for r in u.rects
        for k in range(u.dim)
    ):
        notes.append(
            "domain has open edges: the compactness hypothesis of the "
            "characterization was not verified"
        )
    notes.append(
        "output side assumed connected with at least two values; the verdict "
        "covers the topological condition only"
    )
    return SheafVerdict(not certs, tuple(candidates), tuple(certs), tuple(notes))


@dataclass(frozen=True)
class TameCounterexample:
    """Finite two-patch covering realizing a robust disconnection.

    ``system`` is a single-state machine whose inputs sample the domain:
    one marked fiber point in the first fiber-meeting band component, one in
    the second side, and one interior point per box of the off-band region.
    The judge sends each sample to its judged-axis coordinate.  The two
    patches (each side of the disconnection plus the whole off-band region)
    admit forced stateless explanations that agree on their overlap yet
    conflict at the fiber's judged value.
    """

    system: MealySystem
    judge: Judge
    covering: Covering
    assignments: tuple[tuple[tuple[str, str], ...], ...]
    samples: tuple[tuple[str, Point], ...]
    obstruction: ObstructionReport


def two_patch_counterexample(
    u: RectUnion,
    pj: ProjectionJudge,
    cert: RobustDisconnectionCertificate,
) -> TameCounterexample:
    delta = (cert.n_hi - cert.n_lo) / 2
    inner_lo = cert.t0 - delta / 2
    inner_hi = cert.t0 + delta / 2
    off_band = subtract_closed_band(u, pj.axis, inner_lo, inner_hi)
    v_point = cert.fiber_points[cert.v_index]
    w_index = next(
        k
        for k, p in enumerate(cert.fiber_points)
        if p is not None and k != cert.v_index
    )
    w_point = cert.fiber_points[w_index]
    samples: list[tuple[str, Point]] = [("v", v_point), ("w", w_point)]
    for k, r in enumerate(off_band.rects):
        x = r.x.representative()
        point: Point = (x,) if r.y is None else (x, r.y.representative())
        samples.append((f"c{k}", point))
    # Sanity: every sample lies in the domain.
    for name, p in samples:
        if not u.contains(p):
            raise InternalConsistencyError(f"sample {name} fell outside the domain")
    i_map = {name: str(p[pj.axis]) for name, p in samples}
    o_map = {"0": "0", "1": "1"}
    dyn = {
        ("s", name): ("s", "1" if name == "w" else "0")
        for name, _ in samples
    }
    system = make_system(["s"], ["s"], [name for name, _ in samples], ["0", "1"], dyn)
    jdg = make_judge(i_map, o_map)
    c_names = [name for name, _ in samples if name.startswith("c")]
    patch1 = subsystem(system, inputs=sorted(["v", *c_names]))
    patch2 = subsystem(system, inputs=sorted(["w", *c_names]))
    cov = covering(system, [patch1, patch2])
    reports = [stateless_ri_section(system, jdg, p) for p in (patch1, patch2)]
    for k, rep in enumerate(reports):
        if not rep.ok:
            raise InternalConsistencyError(f"patch {k} lost its forced explanation")
    assignments = tuple(rep.assignment for rep in reports)
    res: GlueStatelessResult = glue_stateless(
        system, jdg, cov, [dict(a) for a in assignments]
    )
    if res.ok or res.obstruction is None:
        raise InternalConsistencyError("disconnection witness unexpectedly glued")
    return TameCounterexample(
        system, jdg, cov, assignments, tuple(samples), res.obstruction
    )


def _atom_intervals(values: Sequence[Fraction]) -> list[Interval]:
    atoms: list[Interval] = []
    vals = sorted(set(values))
    for k, v in enumerate(vals):
        atoms.append(Interval(v, v))
        if k + 1 < len(vals):
            atoms.append(Interval(v, vals[k + 1], True, True))
    return atoms


def _covers_atom(iv: Interval, atom: Interval) -> bool:
    """Whether the interval contains the atom.  Gap atoms are open intervals
    between consecutive grid values, and the interval's endpoints lie on the
    grid, so containment is a plain endpoint comparison."""
    if atom.lo == atom.hi:
        return iv.contains(atom.lo)
    return not iv.empty and iv.lo <= atom.lo and iv.hi >= atom.hi


def regions_equal(u1: RectUnion, u2: RectUnion) -> bool:
    """Exact set equality of two rectangle unions via a shared atom grid."""
    if u1.dim != u2.dim:
        return False
    xs = list(critical_values(u1, 0)) + list(critical_values(u2, 0))
    if not xs:
        return u1.empty and u2.empty
    atoms_x = _atom_intervals(xs)
    if u1.dim == 1:
        for atom in atoms_x:
            in1 = any(_covers_atom(r.x, atom) for r in u1.rects)
            in2 = any(_covers_atom(r.x, atom) for r in u2.rects)
            if in1 != in2:
                return False
        return True
    for atom in atoms_x:
        ys1 = merge_intervals([r.y for r in u1.rects if _covers_atom(r.x, atom)])
        ys2 = merge_intervals([r.y for r in u2.rects if _covers_atom(r.x, atom)])
        if ys1 != ys2:
            return False
    return True


def disjoint(u1: RectUnion, u2: RectUnion) -> bool:
    """Whether two rectangle unions share no point."""
    for a in u1.rects:
        for b in u2.rects:
            if a.y is None:
                if not a.x.intersect(b.x).empty:
                    return False
            else:
                if not a.x.intersect(b.x).empty and not a.y.intersect(b.y).empty:
                    return False
    return True


def parse_fraction(text: str | int) -> Fraction:
    return Fraction(text)


def union_from_payload(payload: Mapping) -> tuple[RectUnion, ProjectionJudge]:
    """Build a domain and projection from the JSON shape used by fixtures:
    ``{"dim": 2, "axis": 0, "rects": [{"x": ["0","1"], "y": ["0","1/2"],
    "open": [left, right, bottom, top]}, ...]}``."""
    dim = int(payload["dim"])
    rects = []
    for row in payload["rects"]:
        ox = row.get("open", [False] * (2 * dim))
        x = Interval(Fraction(row["x"][0]), Fraction(row["x"][1]), bool(ox[0]), bool(ox[1]))
        if dim == 1:
            rects.append(Rect(x, None))
        else:
            y = Interval(Fraction(row["y"][0]), Fraction(row["y"][1]), bool(ox[2]), bool(ox[3]))
            rects.append(Rect(x, y))
    return rect_union(dim, rects), ProjectionJudge(int(payload.get("axis", 0)))
