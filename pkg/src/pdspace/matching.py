"""Matchings, p-costs, exact optimal matchings and Wasserstein distances.

The solver works on the compressed augmented instance: one row per distinct
point of ``alpha`` (supply = multiplicity) plus one row standing for ``A``
(supply ``|beta|``), one column per distinct point of ``beta`` plus one
column for ``A`` (demand ``|alpha|``). A point paired with the ``A`` slot
costs its distance to ``A``; the ``A``-``A`` cell costs 0. With unit
multiplicities this is the ``(m + n) x (n + m)`` assignment problem over
points and their projections onto ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Iterator, Sequence

import numpy as np

from . import kernels
from .diagram import Diagram, TruncatedDiagram, _check_same, persistence_norm
from .errors import SpaceMismatchError, ValidationError
from .spaces import INF, MAX_FINITE_P, A, MetricPair, make_space, parse_p, pnorm


def solver_p(p: Any) -> float:
    """Parse an exponent for the exact solvers; finite ``p > 64`` is rejected."""
    p = parse_p(p)
    if p != INF and p > MAX_FINITE_P:
        raise ValidationError(f"finite exponents above {MAX_FINITE_P:g} are not supported")
    return p


def _side_key(v):
    return (1,) if v is A else (0, v)


@dataclass(frozen=True)
class Matching:
    """A multiset of pairs whose off-``A`` marginals are ``alpha`` and ``beta``.

    The symbol :data:`~pdspace.spaces.A` on either side of a pair stands for
    a nearest point of ``A`` (or, when none exists, the infimum over ``A``).
    ``A``-``A`` pairs are never stored.
    """

    space: MetricPair
    pairs: tuple[tuple[tuple[Any, Any], int], ...]
    alpha: Diagram
    beta: Diagram

    def __post_init__(self):
        merged: dict = {}
        for (a, b), m in self.pairs:
            merged[(a, b)] = merged.get((a, b), 0) + int(m)
        pairs = sorted(merged.items(), key=lambda e: (_side_key(e[0][0]), _side_key(e[0][1])))
        object.__setattr__(self, "pairs", tuple(pairs))

    def validate(self) -> "Matching":
        sp = self.space
        if self.alpha.space != sp or self.beta.space != sp:
            raise SpaceMismatchError("matching and marginals live in different spaces")
        left: dict = {}
        right: dict = {}
        for (a, b), m in self.pairs:
            if m < 1:
                raise ValidationError("pair multiplicities must be positive")
            if a is A and b is A:
                raise ValidationError("A-A pairs are not stored in normal form")
            for side, acc in ((a, left), (b, right)):
                if side is not A:
                    if sp.in_A(side):
                        raise ValidationError(f"{side} lies in A; write it as A")
                    acc[side] = acc.get(side, 0) + m
        if left != dict(self.alpha.entries) or right != dict(self.beta.entries):
            raise ValidationError("matching marginals do not reproduce the diagrams")
        return self

    def __len__(self) -> int:
        return sum(m for _, m in self.pairs)

    def transpose(self) -> "Matching":
        return Matching(self.space, tuple(((b, a), m) for (a, b), m in self.pairs), self.beta, self.alpha)

    def pair_costs(self) -> list[tuple[float, int]]:
        return [(pair_cost(self.space, a, b), m) for (a, b), m in self.pairs]


def pair_cost(space: MetricPair, a, b) -> float:
    if a is A:
        return space.dist_to_A(b)
    if b is A:
        return space.dist_to_A(a)
    return space.dist(a, b)


def cost_p(sigma: Matching, p) -> float:
    """``||(d(x_i, y_i))_i||_p`` over the pairs of a valid matching."""
    sigma.validate()
    return pnorm(sigma.pair_costs(), parse_p(p))


@dataclass(frozen=True)
class WassersteinResult:
    value: float
    matching: Matching | None
    error_bound: float = 0.0
    optimal: bool = True

    def __float__(self) -> float:
        return self.value


def identity_matching(alpha: Diagram) -> Matching:
    return Matching(alpha.space, tuple(((pt, pt), m) for pt, m in alpha.entries), alpha, alpha)


# --------------------------------------------------------------------------
# solvers
# --------------------------------------------------------------------------


def augmented_instance(alpha: Diagram, beta: Diagram):
    """Distance matrix and integer marginals of the compressed augmented instance."""
    sp = alpha.space
    xs, ys = alpha.support, beta.support
    D = np.zeros((len(xs) + 1, len(ys) + 1))
    if xs and ys:
        D[:-1, :-1] = sp.pairwise(xs, ys)
    D[:-1, -1] = [sp.dist_to_A(x) for x in xs]
    D[-1, :-1] = [sp.dist_to_A(y) for y in ys]
    supply = np.array([m for _, m in alpha.entries] + [len(beta)], dtype=np.int64)
    demand = np.array([m for _, m in beta.entries] + [len(alpha)], dtype=np.int64)
    return D, supply, demand


def solve_transport(D: np.ndarray, supply, demand, p: float) -> tuple[np.ndarray, bool]:
    """Optimal integer flow for the p-cost on distance matrix ``D``.

    Finite ``p`` minimizes ``sum flow * D**p``; ``p = inf`` minimizes the
    largest used distance by binary search over the sorted distinct finite
    entries with zero-cost feasibility tests, then minimizes the sum of
    distances among the cells below the bottleneck. Returns ``(flow, False)``
    with a witness flow that uses as few infinite cells as possible when no
    finite-cost flow exists.
    """
    transport = kernels.transport
    D = np.asarray(D, dtype=float)
    finite = np.isfinite(D)
    if p == INF:
        values = np.unique(D[finite])
        if values.size == 0 or not transport(np.where(finite, 0.0, INF), supply, demand)[1]:
            flow, _ = transport(np.where(finite, 0.0, 1.0), supply, demand)
            return flow, False
        lo, hi = 0, values.size - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if transport(np.where(D <= values[mid], 0.0, INF), supply, demand)[1]:
                hi = mid
            else:
                lo = mid + 1
        flow, ok = transport(np.where(D <= values[lo], D, INF), supply, demand)
        assert ok
        return flow, True
    top = D[finite].max() if finite.any() else 0.0
    costs = (D / top) ** p if top > 0 else np.where(finite, 0.0, INF)
    flow, ok = transport(costs, supply, demand)
    if not ok:
        flow, _ = transport(np.where(finite, 0.0, 1.0), supply, demand)
    return flow, ok


def _attained(space: MetricPair, sigma: Matching) -> bool:
    if space.distance_minimizing:
        return True
    for (a, b), _ in sigma.pairs:
        x = b if a is A else a if b is A else None
        if x is not None and space.nearest_in_A(x) is None:
            return False
    return True


def wasserstein(alpha: Diagram, beta: Diagram, p) -> WassersteinResult:
    """``W_p(alpha, beta)`` with an optimal matching.

    If ``A`` is not distance minimizing a pair sent to ``A`` may have no
    nearest point; the value is then the infimum and ``optimal`` is False.
    An infinite value comes with a witness matching of infinite cost.
    """
    p = solver_p(p)
    _check_same(alpha, beta)
    # fixed orientation makes W(a, b) and W(b, a) the same computation
    if beta.entries < alpha.entries:
        res = _wasserstein(beta, alpha, p)
        return replace(res, matching=res.matching.transpose())
    return _wasserstein(alpha, beta, p)


def _wasserstein(alpha: Diagram, beta: Diagram, p: float) -> WassersteinResult:
    sp = alpha.space
    if alpha == beta:
        return WassersteinResult(0.0, identity_matching(alpha))
    D, supply, demand = augmented_instance(alpha, beta)
    flow, ok = solve_transport(D, supply, demand, p)
    xs, ys = alpha.support, beta.support
    pairs = []
    for i, j in zip(*np.nonzero(flow)):
        a = xs[i] if i < len(xs) else A
        b = ys[j] if j < len(ys) else A
        if a is A and b is A:
            continue
        pairs.append(((a, b), int(flow[i, j])))
    sigma = Matching(sp, tuple(pairs), alpha, beta)
    value = cost_p(sigma, p)
    return WassersteinResult(value, sigma, 0.0, (not ok) or _attained(sp, sigma))


def enumerate_matchings(alpha: Diagram, beta: Diagram, max_points: int = 10) -> Iterator[list[tuple[Any, Any]]]:
    """Every normal-form matching of ``alpha`` and ``beta``, expanded pair by pair.

    Each point of ``alpha`` goes either to ``A`` or to a distinct point of
    ``beta``; points of ``beta`` left over go to ``A``. These are all
    permutations of the augmented instance up to reordering the ``A`` slots.
    """
    _check_same(alpha, beta)
    xs, ys = list(alpha), list(beta)
    if len(xs) + len(ys) > max_points:
        raise ValidationError(f"brute force is capped at {max_points} points, got {len(xs) + len(ys)}")
    used = [False] * len(ys)
    chosen: list = []

    def rec(i):
        if i == len(xs):
            yield chosen + [(A, ys[j]) for j in range(len(ys)) if not used[j]]
            return
        chosen.append((xs[i], A))
        yield from rec(i + 1)
        chosen.pop()
        for j in range(len(ys)):
            if not used[j]:
                used[j] = True
                chosen.append((xs[i], ys[j]))
                yield from rec(i + 1)
                chosen.pop()
                used[j] = False

    yield from rec(0)


def wasserstein_bruteforce(alpha: Diagram, beta: Diagram, p, max_points: int = 10) -> WassersteinResult:
    """Exhaustive minimum over all matchings; an oracle for small instances."""
    p = parse_p(p)
    sp = alpha.space
    best, best_pairs = INF, None
    for pairs in enumerate_matchings(alpha, beta, max_points):
        v = pnorm([pair_cost(sp, a, b) for a, b in pairs], p)
        if best_pairs is None or v < best:
            best, best_pairs = v, list(pairs)
    sigma = Matching(sp, tuple((ab, 1) for ab in best_pairs), alpha, beta)
    return WassersteinResult(best, sigma, 0.0, best == INF or _attained(sp, sigma))


def _as_truncated(x) -> TruncatedDiagram:
    return x if isinstance(x, TruncatedDiagram) else TruncatedDiagram.exact(x)


def wasserstein_truncated(alpha, beta, p) -> WassersteinResult:
    """Distance between the heads, bracketed by the sum of the tail bounds.

    A tail bound measured with exponent ``q <= p`` is also a ``W_p`` bound;
    a nonzero tail measured with ``q > p`` is rejected.
    """
    p = solver_p(p)
    a, b = _as_truncated(alpha), _as_truncated(beta)
    for t in (a, b):
        if t.tail_bound > 0 and t.tail_exponent > p:
            raise ValidationError(
                f"tail bound is for exponent {t.tail_exponent}, cannot bound W_{p}")
    res = wasserstein(a.head, b.head, p)
    return replace(res, error_bound=a.tail_bound + b.tail_bound)


def card_mismatch_lower_bound(alpha: Diagram, beta: Diagram, p) -> float:
    """Persistence norm of the ``|alpha| - |beta|`` points of ``alpha`` nearest ``A``.

    Any matching must send at least that many points of ``alpha`` to ``A``,
    so this never exceeds ``W_p(alpha, beta)``.
    """
    p = parse_p(p)
    _check_same(alpha, beta)
    excess = len(alpha) - len(beta)
    if excess <= 0:
        raise ValidationError("needs |beta| < |alpha|")
    tail = []
    for d, m in sorted(alpha.dists_to_A()):
        take = min(m, excess)
        tail.append((d, take))
        excess -= take
        if not excess:
            break
    return pnorm(tail, p)


def infimum_gap_demo(K: int) -> list[tuple[int, float]]:
    """Costs ``1 + 1/k`` of matching the wedge point of ``wedge_intervals`` to ``a_k``."""
    if int(K) != K or K < 1:
        raise ValidationError("K must be a positive integer")
    sp = make_space("wedge_intervals")
    x = sp.validate((1, 0.0))
    return [(k, sp.dist(x, sp.a_point(k))) for k in range(1, int(K) + 1)]


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def matching_to_json(sigma: Matching) -> list[dict]:
    sp = sigma.space
    side = lambda v: "A" if v is A else sp.to_json(v)  # noqa: E731
    return [{"a": side(a), "b": side(b), "mult": m} for (a, b), m in sigma.pairs]


def matching_from_json(obj: Sequence[dict], space, alpha: Diagram | None = None,
                       beta: Diagram | None = None) -> Matching:
    """Parse matching JSON; missing marginals are read off the pairs."""
    sp = make_space(space)
    if isinstance(obj, dict):
        obj = obj.get("matching", obj.get("pairs"))
    if not isinstance(obj, list):
        raise ValidationError("matching JSON must be a list of pairs")
    pairs = []
    for item in obj:
        try:
            a, b, m = item["a"], item["b"], item.get("mult", 1)
        except (TypeError, KeyError):
            raise ValidationError(f"bad matching entry {item!r}") from None
        a = A if a == "A" else sp.from_json(a)
        b = A if b == "A" else sp.from_json(b)
        pairs.append(((a, b), m))
    if alpha is None:
        alpha = Diagram(sp, tuple((a, m) for (a, _), m in pairs if a is not A))
    if beta is None:
        beta = Diagram(sp, tuple((b, m) for (_, b), m in pairs if b is not A))
    return Matching(sp, tuple(pairs), alpha, beta).validate()


def result_to_json(res: WassersteinResult, with_matching: bool = True) -> dict:
    out: dict[str, Any] = {"value": res.value, "error_bound": res.error_bound, "optimal": res.optimal}
    if with_matching and res.matching is not None:
        out["matching"] = matching_to_json(res.matching)
    return out


__all__ = [
    "Matching", "WassersteinResult", "cost_p", "wasserstein", "wasserstein_bruteforce",
    "wasserstein_truncated", "card_mismatch_lower_bound", "infimum_gap_demo",
    "enumerate_matchings", "solve_transport", "augmented_instance", "persistence_norm",
]
