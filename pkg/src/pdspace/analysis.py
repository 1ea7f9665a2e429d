"""Compactness diagnostics, the symmetric-product embedding, and gallery constructions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .diagram import Diagram, TruncatedDiagram, lower_part, persistence_norm, upper_part
from .errors import CapabilityError, SpaceMismatchError, ValidationError
from .geodesic import geodesic, path_length, sequential_path
from .matching import card_mismatch_lower_bound, solve_transport, solver_p, wasserstein
from .spaces import INF, MetricPair, Point, make_space, parse_p, pnorm, quotient_dist

# --------------------------------------------------------------------------
# compactness diagnostics
# --------------------------------------------------------------------------


@dataclass
class ScaleReport:
    eps: float
    upper_count: int                 # M_eps
    upper_count_certified: bool
    net_radius: float
    net_centers: list[Point]
    net_covering_radius: float       # max distance of u_eps(S) to the net
    net_certified: bool
    delta: float | None              # uniform p-vanishing witness, None if not found
    lower_norm_bound: float | None   # max over S of the bound at that delta

    @property
    def all_witnessed(self) -> bool:
        return self.upper_count_certified and self.net_certified and self.delta is not None


@dataclass
class DiagnosticsReport:
    space: str
    p: float
    eps_schedule: list[float]
    scales: list[ScaleReport] = field(default_factory=list)
    space_complete: bool = False

    @property
    def totally_bounded_at_scales(self) -> bool:
        return all(s.all_witnessed for s in self.scales)

    @property
    def relatively_compact_at_scales(self) -> bool:
        return self.totally_bounded_at_scales and self.space_complete

    def to_json(self, space: MetricPair) -> dict:
        out = {
            "space": self.space,
            "p": "inf" if self.p == INF else self.p,
            "eps_schedule": self.eps_schedule,
            "space_complete": self.space_complete,
            "scales": [],
            "verdict": {
                "uniformly_upper_finite": all(s.upper_count_certified for s in self.scales),
                "upper_totally_bounded": all(s.net_certified for s in self.scales),
                "uniformly_p_vanishing": all(s.delta is not None for s in self.scales),
                "totally_bounded_at_scales": self.totally_bounded_at_scales,
                "relatively_compact_at_scales": self.relatively_compact_at_scales,
            },
        }
        for s in self.scales:
            d = asdict(s)
            d["net_centers"] = [space.to_json(c) for c in s.net_centers]
            out["scales"].append(d)
        return out


def _greedy_net(space: MetricPair, points: list[Point], radius: float) -> tuple[list[Point], float]:
    """Farthest-point net seeded at the smallest point; stops once every point is within ``radius``."""
    if not points:
        return [], 0.0
    points = sorted(points)
    centers = [points[0]]
    near = [space.dist(points[0], x) for x in points]
    while True:
        i = max(range(len(points)), key=lambda k: (near[k], -k))
        if near[i] <= radius:
            return centers, near[i]
        c = points[i]
        centers.append(c)
        near = [min(d, space.dist(c, x)) for d, x in zip(near, points)]


def diagnose_set(family: Sequence[Diagram | TruncatedDiagram], p, eps_schedule: Sequence[float],
                 net_factor: float = 1.0, delta_steps: int = 40) -> DiagnosticsReport:
    """Witnesses for the three total-boundedness conditions at each sampled scale.

    For each ``eps``: the largest ``|u_eps(alpha)|`` over the family, a greedy
    ``eps * net_factor``-net of the union of the upper parts, and the largest
    ``delta`` on the grid ``eps / 2**k`` (plus one value below every distance
    in the family) with ``W_p(l_delta(alpha), 0) < eps`` for all members.
    Truncated members contribute their tail bound: a tail with ``W_p <= tau``
    has at most ``(tau/eps)**p`` points in its ``eps``-upper part, none if
    ``tau < eps``.
    """
    p = parse_p(p)
    members = [m if isinstance(m, TruncatedDiagram) else TruncatedDiagram.exact(m, p) for m in family]
    if not eps_schedule:
        raise ValidationError("empty eps schedule")
    eps_schedule = [float(e) for e in eps_schedule]
    if any(e <= 0 for e in eps_schedule) or any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValidationError("eps schedule must be strictly decreasing and positive")
    if not net_factor > 0:
        raise ValidationError("net factor must be positive")
    spaces = {m.space for m in members}
    if len(spaces) > 1:
        raise SpaceMismatchError("family mixes spaces")
    space = spaces.pop() if spaces else None
    for m in members:
        if m.tail_bound > 0 and m.tail_exponent > p:
            raise ValidationError("tail bound exponent exceeds p")

    dists = [d for m in members for d, _ in m.head.dists_to_A()]
    floor = min([d for d in dists if d > 0], default=1.0) / 2
    report = DiagnosticsReport(
        space=space.name if space else "",
        p=p,
        eps_schedule=eps_schedule,
        space_complete=bool(space and space.complete),
    )
    for eps in eps_schedule:
        count, count_ok = 0, True
        upper_pts: set = set()
        for m in members:
            u = upper_part(m.head, eps)
            extra = 0
            if m.tail_bound >= eps:
                if p == INF:
                    count_ok = False
                else:
                    extra = math.floor((m.tail_bound / eps) ** p)
            count = max(count, len(u) + extra)
            upper_pts.update(u.support)
        net_ok = count_ok and all(m.tail_bound < eps for m in members)
        radius = eps * net_factor
        centers, cover = _greedy_net(space, list(upper_pts), radius) if space else ([], 0.0)

        grid = [eps / 2**k for k in range(delta_steps + 1)]
        if floor < grid[-1]:
            grid.append(floor)
        delta = bound = None
        for dl in grid:
            worst = max((pnorm([persistence_norm(lower_part(m.head, dl), p), m.tail_bound], p)
                         for m in members), default=0.0)
            if worst < eps:
                delta, bound = dl, worst
                break
        report.scales.append(ScaleReport(
            eps=eps, upper_count=count, upper_count_certified=count_ok,
            net_radius=radius, net_centers=centers, net_covering_radius=cover,
            net_certified=net_ok and cover <= radius,
            delta=delta, lower_norm_bound=bound,
        ))
    return report


# --------------------------------------------------------------------------
# symmetric products
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricTuple:
    space: MetricPair
    n: int
    slots: tuple[Point, ...]


def embed_symmetric(alpha: Diagram, n: int) -> SymmetricTuple:
    """Pad ``alpha`` with base points to ``2n`` slots."""
    sp = alpha.space
    if sp.base_point is None:
        raise CapabilityError(f"{sp.name} is not a pointed space")
    if int(n) != n or n < 1:
        raise ValidationError("n must be a positive integer")
    if len(alpha) > n:
        raise ValidationError(f"|alpha| = {len(alpha)} exceeds n = {n}")
    slots = tuple(alpha) + (sp.base_point,) * (2 * int(n) - len(alpha))
    return SymmetricTuple(sp, int(n), slots)


def symmetric_dist(u: SymmetricTuple, v: SymmetricTuple, p) -> float:
    """Quotient metric on ``X^{2n} / S_{2n}``: the best slot permutation under the p-product metric."""
    if u.space != v.space or len(u.slots) != len(v.slots):
        raise ValidationError("tuples from different spaces or sizes")
    p = solver_p(p)
    sp = u.space
    D = np.array([[sp.dist(x, y) for y in v.slots] for x in u.slots])
    ones = np.ones(len(u.slots), dtype=np.int64)
    flow, ok = solve_transport(D, ones, ones, p)
    rows, cols = np.nonzero(flow)
    return pnorm([sp.dist(u.slots[i], v.slots[j]) for i, j in zip(rows, cols)], p)


# --------------------------------------------------------------------------
# local non-compactness
# --------------------------------------------------------------------------


@dataclass
class NoncompactnessWitness:
    betas: list[Diagram]
    approach_points: list[Point]
    exponents: list[int]            # beta_n = alpha + 2**m_n x_n  (p < inf)
    radius_bound: float             # max_n W_p(beta_n, alpha), certified < eps
    separation_bound: float         # certified lower bound on pairwise W_p


def local_noncompactness_witnesses(alpha: Diagram, eps: float, p, count: int) -> list[Diagram]:
    """Diagrams inside the ``eps``-ball around ``alpha`` that stay uniformly apart."""
    return noncompactness_family(alpha, eps, p, count).betas


def noncompactness_family(alpha: Diagram, eps: float, p, count: int) -> NoncompactnessWitness:
    """Build and certify the separated family.

    ``p = inf``: ``beta_n = alpha + n x`` with ``d(x, A) = 0.6 eps``.
    ``p < inf``: ``beta_n = alpha + 2**m_n x_n`` where ``d(x_n, A)`` shrinks
    by a factor a little below ``2**(-1/p)`` per step and ``m_n`` is the
    integer with ``eps 2**(-(m_n+1)/p) <= d(x_n, A) < eps 2**(-m_n/p)``.
    Distances to ``alpha`` come from the solver; separation comes from
    :func:`card_mismatch_lower_bound`.
    """
    p = solver_p(p)
    sp = alpha.space
    eps = float(eps)
    if int(count) != count or count < 1:
        raise ValidationError("count must be a positive integer")
    floor = min((d for d, _ in alpha.dists_to_A()), default=INF)
    if not 0 < eps < floor:
        raise ValidationError("need 0 < eps < min distance of alpha's points to A")

    if p == INF:
        x = sp.validate(sp.approach_point(0.6 * eps))
        r = sp.dist_to_A(x)
        if not 0 < r < eps:
            raise CapabilityError("approach point does not land inside the eps-offset")
        betas = [alpha + Diagram(sp, ((x, n),)) for n in range(1, int(count) + 1)]
        pts, exps = [x] * len(betas), list(range(1, len(betas) + 1))
        sep = r
    else:
        pts, exps, betas = [], [], []
        prev = None
        for n in range(1, int(count) + 1):
            x = sp.validate(sp.approach_point(eps * 2.0 ** (-(n + 0.5 + 0.01 * n) / p)))
            r = sp.dist_to_A(x)
            limit = eps / 2 ** (1 / p) if prev is None else prev / 2 ** (1 / p)
            if not 0 < r < limit:
                raise CapabilityError("approach sequence does not shrink fast enough")
            m = max(1, math.floor(p * math.log2(eps / r)))
            while r >= eps * 2.0 ** (-m / p):
                m += 1
            while m > 1 and r < eps * 2.0 ** (-(m + 1) / p):
                m -= 1
            pts.append(x)
            exps.append(m)
            betas.append(alpha + Diagram(sp, ((x, 2**m),)))
            prev = r
        sep = eps / 4

    radius = max(wasserstein(b, alpha, p).value for b in betas)
    if not radius < eps:
        raise AssertionError(f"witness escaped the eps-ball: {radius} >= {eps}")
    lower = INF
    for i in range(len(betas)):
        for k in range(i):
            lower = min(lower, card_mismatch_lower_bound(betas[i], betas[k], p))
    if len(betas) > 1 and lower < sep * (1 - 1e-12):
        raise AssertionError(f"witnesses not separated: {lower} < {sep}")
    return NoncompactnessWitness(betas, pts, exps, radius, lower if len(betas) > 1 else sep)


# --------------------------------------------------------------------------
# gallery
# --------------------------------------------------------------------------


def circles_partial(N: int, p=1.0) -> tuple[float, float]:
    """Partial persistence norm ``sum_{n<=N} pi/n^2`` and the tail bound ``pi/N``.

    Only ``p = 1`` is supported: the closed form ``pi^3/6`` of the full norm
    is ``pi * zeta(2)``, which is the 1-norm.
    """
    if parse_p(p) != 1.0:
        raise ValidationError("circles series is supported for p = 1 only")
    if int(N) != N or N < 1:
        raise ValidationError("N must be a positive integer")
    return math.fsum(math.pi / n**2 for n in range(1, int(N) + 1)), math.pi / N


CIRCLES_LIMIT = math.pi**3 / 6


def circles_point(n: int) -> Point:
    return (n, math.pi / n**3)


def circles_truncation(N: int) -> TruncatedDiagram:
    """``x_1 + ... + x_N`` on ``wedge_circles`` with the certified ``W_1`` tail bound ``pi/N``."""
    sp = make_space("wedge_circles")
    head = Diagram(sp, tuple((circles_point(n), 1) for n in range(1, int(N) + 1)))
    return TruncatedDiagram(head, math.pi / N, 1.0)


def non_length_space(n: int, p) -> dict[str, Any]:
    """Numbers for ``alpha = (0,1) + (n-1)(0,10)``, ``beta = (10,11) + (n-1)(0,11)`` on ``halfplane:l1``.

    ``W_p = (n+1)^{1/p}`` is realized by the simultaneous geodesic, which
    passes through ``n + 1`` points; the removals-first sequential path
    stays within ``n`` points.
    """
    p = solver_p(p)
    if int(n) != n or n < 1:
        raise ValidationError("n must be a positive integer")
    sp = make_space("halfplane:l1")
    alpha = Diagram(sp, (((0.0, 1.0), 1),) + ((((0.0, 10.0), n - 1),) if n > 1 else ()))
    beta = Diagram(sp, (((10.0, 11.0), 1),) + ((((0.0, 11.0), n - 1),) if n > 1 else ()))
    w = wasserstein(alpha, beta, p).value
    geo = geodesic(alpha, beta, p)
    seq = sequential_path(alpha, beta, p)
    return {
        "n": n,
        "p": "inf" if p == INF else p,
        "d_p": quotient_dist(sp, p, (0.0, 1.0), (10.0, 11.0)),
        "wasserstein": w,
        "expected": (n + 1) ** (1 / p) if p != INF else 1.0,
        "geodesic_length": path_length(geo, 8),
        "geodesic_max_points": geo.max_cardinality(8),
        "sequential_length": path_length(seq, 8 * len(seq.legs)),
        "sequential_max_points": max(len(seq.eval(k / (8 * len(seq.legs))))
                                     for k in range(8 * len(seq.legs) + 1)),
    }
