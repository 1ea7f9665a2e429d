"""Paths and geodesics in diagram space built from matchings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .diagram import Diagram
from .errors import CapabilityError, ValidationError
from .matching import (Matching, enumerate_matchings, pair_cost, parse_p, solver_p,
                       wasserstein)
from .spaces import INF, A, MetricPair, Point, pnorm


@dataclass(frozen=True)
class Track:
    """``mult`` copies of a point moving from ``start`` to ``end`` during ``[t0, t1]``."""

    start: Point
    end: Point
    mult: int = 1
    t0: float = 0.0
    t1: float = 1.0


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must lie in [0, 1], got {t}")
    return t


class MatchedPath:
    """A path in diagram space whose points move along geodesics of ``X``."""

    def __init__(self, space: MetricPair, p: float, tracks: Sequence[Track],
                 alpha: Diagram, beta: Diagram, matching: Matching | None = None):
        self.space = space
        self.p = p
        self.tracks = tuple(tracks)
        self.alpha = alpha
        self.beta = beta
        self.matching = matching

    def eval(self, t: float) -> Diagram:
        t = _check_t(t)
        if t == 0.0:
            return self.alpha
        if t == 1.0:
            return self.beta
        sp = self.space
        entries = []
        for tr in self.tracks:
            if t <= tr.t0:
                x = tr.start
            elif t >= tr.t1:
                x = tr.end
            else:
                x = sp.geodesic_point(tr.start, tr.end, (t - tr.t0) / (tr.t1 - tr.t0))
            if not sp.in_A(x):
                entries.append((x, tr.mult))
        return Diagram(sp, tuple(entries))

    __call__ = eval

    def max_cardinality(self, samples: int = 64) -> int:
        return max(len(self.eval(k / samples)) for k in range(samples + 1))


class GeodesicPath(MatchedPath):
    """All matched pairs move simultaneously at constant speed."""


class ConcatenatedPath:
    """Legs traversed one after another, each over an equal share of ``[0, 1]``."""

    def __init__(self, legs: Sequence, p: float | None = None):
        if not legs:
            raise ValidationError("need at least one leg")
        self.legs = list(legs)
        self.p = p if p is not None else self.legs[0].p

    def eval(self, t: float) -> Diagram:
        t = _check_t(t)
        k = len(self.legs)
        i = min(int(t * k), k - 1)
        return self.legs[i].eval(min(1.0, t * k - i))

    __call__ = eval


def _require_geodesic(space: MetricPair) -> None:
    if not space.geodesic:
        raise CapabilityError(f"{space.name} is not a geodesic space")
    if not space.distance_minimizing:
        raise CapabilityError(f"A is not distance minimizing in {space.name}")


def _endpoints(space: MetricPair, a, b) -> tuple[Point, Point]:
    if a is A:
        return space.nearest_in_A(b), b
    if b is A:
        return a, space.nearest_in_A(a)
    return a, b


def path_from_matching(sigma: Matching, p) -> GeodesicPath:
    sp = sigma.space
    tracks = [Track(*_endpoints(sp, a, b), m) for (a, b), m in sigma.pairs]
    return GeodesicPath(sp, parse_p(p), tracks, sigma.alpha, sigma.beta, sigma)


def geodesic(alpha: Diagram, beta: Diagram, p) -> GeodesicPath:
    """Constant-speed geodesic from ``alpha`` to ``beta`` along an optimal matching."""
    _require_geodesic(alpha.space)
    p = solver_p(p)
    res = wasserstein(alpha, beta, p)
    if res.value == INF:
        raise ValidationError("diagrams are infinitely far apart")
    return path_from_matching(res.matching, p)


def path_length(path, N: int, p=None) -> float:
    """Sum of ``W_p`` between consecutive samples on the uniform ``N``-partition."""
    if int(N) != N or N < 1:
        raise ValidationError("N must be a positive integer")
    p = solver_p(p if p is not None else path.p)
    samples = [path.eval(k / N) for k in range(N + 1)]
    return sum(wasserstein(a, b, p).value for a, b in zip(samples, samples[1:]))


def sequential_path(alpha: Diagram, beta: Diagram, p=1.0) -> ConcatenatedPath:
    """Move matched pairs one at a time along a ``W_1``-optimal matching.

    Each leg moves a single point. Removals go first, then moves, then
    births, so the path never holds
    more than ``max(|alpha|, |beta|)`` points. Its ``W_1`` length equals
    ``W_1(alpha, beta)``; for ``p > 1`` it is generally longer than ``W_p``.
    """
    _require_geodesic(alpha.space)
    sp = alpha.space
    sigma = wasserstein(alpha, beta, 1.0).matching
    order = sorted(sigma.pairs, key=lambda e: 0 if e[0][1] is A else 2 if e[0][0] is A else 1)
    legs = []
    current = alpha
    for (a, b), m in order:
        start, end = _endpoints(sp, a, b)
        for _ in range(m):
            rest = dict(current.entries)
            if a is not A:
                rest[a] -= 1
            fixed = [Track(pt, pt, k) for pt, k in rest.items() if k]
            nxt = Diagram(sp, tuple((pt, k) for pt, k in rest.items() if k)
                          + (((end, 1),) if b is not A else ()))
            legs.append(MatchedPath(sp, parse_p(p), fixed + [Track(start, end, 1)], current, nxt))
            current = nxt
    if not legs:
        legs.append(MatchedPath(sp, parse_p(p), [Track(x, x, m) for x, m in alpha.entries], alpha, alpha))
    return ConcatenatedPath(legs, parse_p(p))


def distinct_geodesics(alpha: Diagram, beta: Diagram, p, k: int = 2,
                       max_points: int = 10) -> list[GeodesicPath]:
    """Up to ``k`` geodesics, one per distinct optimal matching (exhaustive search)."""
    _require_geodesic(alpha.space)
    p = solver_p(p)
    sp = alpha.space
    scored = []
    for pairs in enumerate_matchings(alpha, beta, max_points):
        scored.append((pnorm([pair_cost(sp, a, b) for a, b in pairs], p), pairs))
    best = min(v for v, _ in scored)
    tol = 1e-12 * max(1.0, best)
    seen, out = set(), []
    for v, pairs in scored:
        if v - best > tol:
            continue
        sigma = Matching(sp, tuple((ab, 1) for ab in pairs), alpha, beta)
        if sigma.pairs in seen:
            continue
        seen.add(sigma.pairs)
        out.append(path_from_matching(sigma, p))
        if len(out) >= k:
            break
    return out


def alexandrov_residual(alpha: Diagram, beta: Diagram, xi: Diagram, t: float, p=2) -> float:
    """Slack in the non-negative curvature comparison for ``W_2`` at ``gamma(t)``.

    Returns ``W(xi, g)^2 - [t W(xi, beta)^2 + (1-t) W(xi, alpha)^2
    - t(1-t) W(alpha, beta)^2]`` with ``g`` the geodesic point at time ``t``.
    """
    if parse_p(p) != 2.0:
        raise ValidationError("the comparison inequality is checked for W_2 only")
    sp = alpha.space
    _require_geodesic(sp)
    if not sp.nonneg_curved:
        raise CapabilityError(f"{sp.name} is not flagged as non-negatively curved")
    t = _check_t(t)
    g = geodesic(alpha, beta, 2).eval(t)
    W = lambda a, b: wasserstein(a, b, 2).value  # noqa: E731
    return W(xi, g) ** 2 - (t * W(xi, beta) ** 2 + (1 - t) * W(xi, alpha) ** 2
                            - t * (1 - t) * W(alpha, beta) ** 2)


def straight_line_contraction(space: MetricPair) -> Callable[[Point, float], Point]:
    """``H(x, t)``: move ``x`` along the geodesic to the base point."""
    if space.base_point is None:
        raise CapabilityError(f"{space.name} is not a pointed space")
    if not space.geodesic:
        raise CapabilityError(f"{space.name} has no geodesics to contract along")
    base = space.base_point
    return lambda x, t: space.geodesic_point(x, base, t)


def retract_diagram(H: Callable[[Point, float], Point] | None, alpha: Diagram, t: float) -> Diagram:
    """Apply a deformation retraction to every point; points reaching the base vanish."""
    sp = alpha.space
    if sp.base_point is None:
        raise CapabilityError(f"{sp.name} is not a pointed space")
    t = _check_t(t)
    if H is None:
        H = straight_line_contraction(sp)
    entries = []
    for x, m in alpha.entries:
        y = sp.validate(H(x, t))
        if not sp.in_A(y):
            entries.append((y, m))
    return Diagram(sp, tuple(entries))
