"""Approximate stateless explanations: targets, feasibility, obstruction depth.

A stateless system with judged outputs in a metric space admits an
``eps``-explanation over a patch when some assignment of judged inputs to
output points stays within ``eps`` of every judged sample the patch sees.
For one judged input this is a smallest-enclosing-ball question: the
feasible set is the intersection of ``eps``-balls around the sample points,
non-empty exactly when the minimax radius is at most ``eps``.

Domains: all of Euclidean space, an axis-aligned box, or the probability
simplex.  On the unconstrained domain the minimax radius is the minimum
enclosing ball radius (computed exactly up to 1e-12 relative tolerance);
constrained domains run projected subgradient descent (500 iterations, step
``r0 / sqrt(t)`` from the projected unconstrained center) and certify the
best iterate against ``eps`` with tolerance 1e-9.  Results within 1e-9 of
``eps`` are flagged marginal rather than silently classified.

Because ``eps``-balls are convex, a family of patches over a common judged
input obeys the Helly bound: in dimension ``d``, if every ``d+1`` of them
are jointly feasible then all of them are.  ``obstruction_depth`` searches
for the smallest jointly infeasible subfamily; under the discrete metric
(exact-match explanations) the corresponding bound is 2.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CheckerError,
    EmptyInput,
    Infeasible,
    NegativeEpsilon,
    ScaleExceeded,
)

COMPARISON_TOL = 1e-9
MEB_REL_TOL = 1e-12
SUBGRADIENT_ITERS = 500

Vector = tuple[float, ...]


@dataclass(frozen=True)
class EpsilonInstance:
    """Judged samples of a stateless system with metric outputs.

    ``values`` maps each raw input to its judged output point (the judge is
    already applied); ``i_map`` maps raw inputs to judged inputs.  ``domain``
    is ``euclidean``, ``box`` (with per-axis bounds), or ``simplex`` (the
    probability simplex in ``dim`` coordinates).
    """

    dim: int
    domain: str
    values: tuple[tuple[str, Vector], ...]
    i_map: tuple[tuple[str, str], ...]
    interp_inputs: tuple[str, ...]
    box: tuple[tuple[float, float], ...] | None = None

    def value_of(self, raw: str) -> Vector:
        for k, v in self.values:
            if k == raw:
                return v
        raise CheckerError(f"unknown raw input {raw!r}")

    def judged(self, raw: str) -> str:
        for k, v in self.i_map:
            if k == raw:
                return v
        raise CheckerError(f"raw input {raw!r} has no judged value")

    @property
    def raw_inputs(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.values)


def _on_simplex(p: Vector, tol: float = COMPARISON_TOL) -> bool:
    return all(x >= -tol for x in p) and abs(sum(p) - 1.0) <= tol


def epsilon_instance(
    dim: int,
    domain: str,
    values: Mapping[str, Sequence[float]],
    i_map: Mapping[str, str],
    interp_inputs: Iterable[str] | None = None,
    box: Sequence[Sequence[float]] | None = None,
) -> EpsilonInstance:
    if domain not in ("euclidean", "box", "simplex"):
        raise CheckerError(f"unknown domain {domain!r}")
    if dim < 1:
        raise CheckerError("dimension must be positive")
    vals: list[tuple[str, Vector]] = []
    for raw in sorted(values):
        p = tuple(float(x) for x in values[raw])
        if len(p) != dim:
            raise CheckerError(f"value of {raw!r} has wrong dimension")
        if not all(math.isfinite(x) for x in p):
            raise CheckerError(f"value of {raw!r} is not finite")
        vals.append((raw, p))
    for raw in values:
        if raw not in i_map:
            raise CheckerError(f"raw input {raw!r} has no judged value")
    interp = tuple(sorted(set(interp_inputs) if interp_inputs is not None else set(i_map.values())))
    for v in i_map.values():
        if v not in interp:
            raise CheckerError(f"judged input {v!r} outside the interpretable inputs")
    bx: tuple[tuple[float, float], ...] | None = None
    if domain == "box":
        if box is None or len(box) != dim:
            raise CheckerError("box domains need per-axis bounds")
        bx = tuple((float(lo), float(hi)) for lo, hi in box)
        for lo, hi in bx:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise CheckerError("box bounds must be finite and ordered")
        for raw, p in vals:
            if not all(lo - COMPARISON_TOL <= x <= hi + COMPARISON_TOL
                       for x, (lo, hi) in zip(p, bx)):
                raise CheckerError(f"value of {raw!r} lies outside the box")
    if domain == "simplex":
        for raw, p in vals:
            if not _on_simplex(p):
                raise CheckerError(f"value of {raw!r} is not a probability vector")
    return EpsilonInstance(dim, domain, tuple(vals),
                           tuple(sorted(i_map.items())), interp, bx)


@dataclass(frozen=True)
class TargetSet:
    """Judged sample points a patch forces for one judged input.  Empty when
    the patch never sees the judged input; such targets constrain nothing."""

    i_prime: str
    points: tuple[Vector, ...]

    @property
    def empty(self) -> bool:
        return not self.points


def target_set(inst: EpsilonInstance, i_prime: str, patch: Iterable[str]) -> TargetSet:
    pts: set[Vector] = set()
    for raw in patch:
        if inst.judged(raw) == i_prime:
            pts.add(inst.value_of(raw))
    return TargetSet(i_prime, tuple(sorted(pts)))


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def _solve(matrix: list[list[float]], rhs: list[float]) -> list[float] | None:
    """Gaussian elimination with partial pivoting; None when singular."""
    n = len(matrix)
    a = [row[:] + [rhs[k]] for k, row in enumerate(matrix)]
    scale = max((abs(x) for row in matrix for x in row), default=0.0)
    if scale == 0.0:
        return None
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) <= 1e-13 * scale:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            for cc in range(col, n + 1):
                a[r][cc] -= factor * a[col][cc]
    out = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = a[r][n] - sum(a[r][cc] * out[cc] for cc in range(r + 1, n))
        out[r] = s / a[r][r]
    return out


def _circumball(boundary: Sequence[Vector]) -> tuple[Vector, float] | None:
    """Smallest ball with all the given affinely independent points on its
    boundary; None when they are affinely dependent."""
    p0 = boundary[0]
    if len(boundary) == 1:
        return p0, 0.0
    vs = [tuple(x - y for x, y in zip(p, p0)) for p in boundary[1:]]
    gram = [[2.0 * _dot(vk, vl) for vl in vs] for vk in vs]
    rhs = [_dot(vk, vk) for vk in vs]
    lam = _solve(gram, rhs)
    if lam is None:
        return None
    center = tuple(
        x0 + sum(l * v[k] for l, v in zip(lam, vs))
        for k, x0 in enumerate(p0)
    )
    return center, math.dist(center, p0)


def _ball_contains(ball: tuple[Vector, float] | None, p: Vector) -> bool:
    if ball is None:
        return False
    center, r = ball
    return math.dist(center, p) <= r * (1.0 + MEB_REL_TOL) + 1e-14


@dataclass(frozen=True)
class Ball:
    center: Vector
    radius: float


def min_enclosing_ball(points: Sequence[Sequence[float]], seed: int | None = None) -> Ball:
    """Minimum enclosing ball in up to 8 dimensions.

    Randomized incremental computation over a deterministic shuffle of the
    deduplicated points; the result is exact up to 1e-12 relative tolerance
    and independent of the seed, which only permutes the recursion order.
    """
    pts = [tuple(float(x) for x in p) for p in points]
    if not pts:
        raise EmptyInput("a ball needs at least one point")
    d = len(pts[0])
    if d > 8:
        raise ScaleExceeded("enclosing balls are capped at 8 dimensions")
    for p in pts:
        if len(p) != d:
            raise CheckerError("points of mixed dimension")
        if not all(math.isfinite(x) for x in p):
            raise CheckerError("points must be finite")
    uniq = sorted(set(pts))
    rng = random.Random(20250817 if seed is None else seed)
    rng.shuffle(uniq)

    def welzl(idx: int, boundary: list[Vector]) -> tuple[Vector, float] | None:
        if idx == len(uniq) or len(boundary) == d + 1:
            if not boundary:
                return None
            ball = _circumball(boundary)
            if ball is None:
                # Affinely dependent boundary: the last point is inside the
                # ball of the others whenever the set was reachable.
                ball = _circumball(boundary[:-1])
            return ball
        ball = welzl(idx + 1, boundary)
        p = uniq[idx]
        if ball is not None and _ball_contains(ball, p):
            return ball
        return welzl(idx + 1, boundary + [p])

    ball = welzl(0, [])
    if ball is None:
        raise CheckerError("ball computation failed")
    return Ball(ball[0], ball[1])


def canonical_point(inst: EpsilonInstance) -> Vector:
    if inst.domain == "euclidean":
        return tuple(0.0 for _ in range(inst.dim))
    if inst.domain == "box":
        return tuple((lo + hi) / 2.0 for lo, hi in inst.box)
    return tuple(1.0 / inst.dim for _ in range(inst.dim))


def project_box(p: Sequence[float], box: Sequence[tuple[float, float]]) -> Vector:
    return tuple(min(max(x, lo), hi) for x, (lo, hi) in zip(p, box))


def project_simplex(p: Sequence[float]) -> Vector:
    """Euclidean projection onto the probability simplex (sort-based, exact
    up to floating point)."""
    y = np.asarray(p, dtype=float)
    n = y.shape[0]
    u = -np.sort(-y)
    css = np.cumsum(u)
    ks = np.arange(1, n + 1)
    cond = u + (1.0 - css) / ks > 0.0
    k = int(np.nonzero(cond)[0][-1]) + 1
    tau = (css[k - 1] - 1.0) / k
    out = np.maximum(y - tau, 0.0)
    return tuple(float(x) for x in out)


def _project(inst: EpsilonInstance, p: Sequence[float]) -> Vector:
    if inst.domain == "euclidean":
        return tuple(float(x) for x in p)
    if inst.domain == "box":
        return project_box(p, inst.box)
    return project_simplex(p)


def _max_dist(y: Vector, pts: Sequence[Vector]) -> float:
    return max(math.dist(y, p) for p in pts)


def _constrained_minimax(inst: EpsilonInstance, pts: Sequence[Vector],
                         seed: int | None) -> tuple[Vector, float]:
    """Best center inside the domain by projected subgradient descent.

    Deterministic schedule: start at the projection of the unconstrained
    center, step ``r0 / sqrt(t)`` for 500 iterations toward the farthest
    point (least index on ties), track the best iterate.
    """
    meb = min_enclosing_ball(pts, seed)
    start = _project(inst, meb.center)
    if math.dist(start, meb.center) <= MEB_REL_TOL * (1.0 + meb.radius):
        return start, _max_dist(start, pts)
    y = np.asarray(start, dtype=float)
    best_y, best_r = tuple(float(x) for x in y), _max_dist(start, pts)
    r0 = best_r + 1.0
    for t in range(1, SUBGRADIENT_ITERS + 1):
        dists = [math.dist(tuple(y), p) for p in pts]
        far = max(range(len(pts)), key=lambda k: (dists[k], -k))
        if dists[far] > 0.0:
            g = (y - np.asarray(pts[far])) / dists[far]
            y = np.asarray(_project(inst, tuple(y - (r0 / math.sqrt(t)) * g)))
        cur = _max_dist(tuple(float(x) for x in y), pts)
        if cur < best_r:
            best_r = cur
            best_y = tuple(float(x) for x in y)
    return best_y, best_r


@dataclass(frozen=True)
class FeasibilityResult:
    """Minimax verdict for one judged input against a tolerance.

    ``radius`` is the best achieved maximum distance from ``center`` to the
    target points; ``feasible`` compares it against ``epsilon`` with the
    documented tolerance and ``marginal`` flags results within it.
    """

    domain: str
    epsilon: float
    center: Vector
    radius: float
    feasible: bool
    marginal: bool
    unconstrained: bool

    def feasible_at(self, eps: float) -> bool:
        if eps < 0:
            raise NegativeEpsilon("tolerances must be non-negative")
        return self.radius <= eps + COMPARISON_TOL


def feasibility(
    inst: EpsilonInstance,
    points: Sequence[Sequence[float]],
    eps: float,
    seed: int | None = None,
) -> FeasibilityResult:
    """Whether some domain point is within ``eps`` of every target point."""
    if eps < 0:
        raise NegativeEpsilon("tolerances must be non-negative")
    pts = [tuple(float(x) for x in p) for p in points]
    if not pts:
        center = canonical_point(inst)
        return FeasibilityResult(inst.domain, eps, center, 0.0, True, False, True)
    if inst.domain == "euclidean":
        meb = min_enclosing_ball(pts, seed)
        center, radius = meb.center, meb.radius
    else:
        center, radius = _constrained_minimax(inst, pts, seed)
    marginal = abs(radius - eps) <= COMPARISON_TOL
    return FeasibilityResult(
        inst.domain, eps, center, radius, radius <= eps + COMPARISON_TOL, marginal, False
    )


def _union_points(inst: EpsilonInstance, patches: Sequence[Sequence[str]],
                  subset: Sequence[int], i_prime: str) -> tuple[Vector, ...]:
    pts: set[Vector] = set()
    for k in subset:
        pts.update(target_set(inst, i_prime, patches[k]).points)
    return tuple(sorted(pts))


@dataclass(frozen=True)
class DepthReport:
    feasible: bool
    depth: int | None
    subfamily: tuple[int, ...] | None
    i_prime: str | None
    marginal: bool


def obstruction_depth(
    inst: EpsilonInstance,
    patches: Sequence[Sequence[str]],
    eps: float,
    seed: int | None = None,
) -> DepthReport:
    """Size of the smallest jointly infeasible subfamily, judged input by
    judged input; None when the whole family is feasible.  The full family
    is checked first, then subfamilies in increasing size, index order."""
    if eps < 0:
        raise NegativeEpsilon("tolerances must be non-negative")
    if len(patches) > 20:
        raise ScaleExceeded("obstruction search is capped at 20 patches")
    marginal = False
    full = range(len(patches))
    full_bad = None
    for i_prime in inst.interp_inputs:
        pts = _union_points(inst, patches, list(full), i_prime)
        if not pts:
            continue
        res = feasibility(inst, pts, eps, seed)
        marginal = marginal or res.marginal
        if not res.feasible:
            full_bad = i_prime
            break
    if full_bad is None:
        return DepthReport(True, None, None, None, marginal)
    for size in range(1, len(patches) + 1):
        for combo in itertools.combinations(range(len(patches)), size):
            for i_prime in inst.interp_inputs:
                pts = _union_points(inst, patches, combo, i_prime)
                if not pts:
                    continue
                res = feasibility(inst, pts, eps, seed)
                marginal = marginal or res.marginal
                if not res.feasible:
                    return DepthReport(False, size, combo, i_prime, marginal)
    return DepthReport(False, None, None, full_bad, marginal)


@dataclass(frozen=True)
class EpsGlueResult:
    assignment: tuple[tuple[str, Vector], ...]
    radii: tuple[tuple[str, float], ...]
    unconstrained: tuple[str, ...]
    marginal: tuple[str, ...]


def eps_glue(
    inst: EpsilonInstance,
    patches: Sequence[Sequence[str]],
    eps: float,
    seed: int | None = None,
) -> EpsGlueResult:
    """Glue per-patch approximate explanations into one global assignment.

    For each judged input the feasible sets of the patches intersect in the
    feasible set of the union of their targets, so the glued value is any
    point feasible for the union; the minimax center is chosen.  A judged
    input no patch constrains gets the domain's canonical point, flagged.
    Raises :class:`Infeasible` naming the first judged input whose union
    target is infeasible.
    """
    if eps < 0:
        raise NegativeEpsilon("tolerances must be non-negative")
    assignment: list[tuple[str, Vector]] = []
    radii: list[tuple[str, float]] = []
    unconstrained: list[str] = []
    marginal: list[str] = []
    for i_prime in inst.interp_inputs:
        pts = _union_points(inst, patches, list(range(len(patches))), i_prime)
        res = feasibility(inst, pts, eps, seed)
        if not res.feasible:
            err = Infeasible(
                f"no point is within {eps} of every target for judged input {i_prime!r}"
            )
            err.i_prime = i_prime
            raise err
        if res.unconstrained:
            unconstrained.append(i_prime)
        if res.marginal:
            marginal.append(i_prime)
        assignment.append((i_prime, res.center))
        radii.append((i_prime, res.radius))
    return EpsGlueResult(
        tuple(assignment), tuple(radii), tuple(unconstrained), tuple(marginal)
    )


def discrete_feasible(points: Sequence[Sequence[float]], eps: float) -> bool:
    """Feasibility under the discrete metric: some value is within ``eps``
    of every target exactly when the targets agree or ``eps`` allows a full
    mismatch (distance 1)."""
    if eps < 0:
        raise NegativeEpsilon("tolerances must be non-negative")
    pts = {tuple(float(x) for x in p) for p in points}
    return len(pts) <= 1 or eps >= 1.0


def discrete_obstruction_depth(
    patch_points: Sequence[Sequence[Sequence[float]]], eps: float
) -> int | None:
    """Smallest jointly infeasible subfamily under the discrete metric; the
    bound here is 2: any infeasible family contains an infeasible pair
    (two patches forcing different exact values)."""
    if len(patch_points) > 20:
        raise ScaleExceeded("obstruction search is capped at 20 patches")
    union = [p for pts in patch_points for p in pts]
    if discrete_feasible(union, eps):
        return None
    for size in range(1, len(patch_points) + 1):
        for combo in itertools.combinations(range(len(patch_points)), size):
            pts = [p for k in combo for p in patch_points[k]]
            if pts and not discrete_feasible(pts, eps):
                return size
    return None
