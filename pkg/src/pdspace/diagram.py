"""Finite persistence diagrams as canonical multisets over ``X \\ A``."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Sequence

from .errors import SpaceMismatchError, ValidationError
from .spaces import INF, MetricPair, Point, make_space, parse_p, pnorm


@dataclass(frozen=True)
class Diagram:
    """A formal sum of points of ``X`` off ``A`` with positive multiplicities.

    Entries are kept sorted by payload with duplicates merged, so two equal
    multisets compare equal. Points in ``A`` are rejected.
    """

    space: MetricPair
    entries: tuple[tuple[Point, int], ...] = ()

    def __post_init__(self):
        space = make_space(self.space)
        counts: Counter = Counter()
        for pt, mult in self.entries:
            if isinstance(mult, bool) or int(mult) != mult or mult < 1:
                raise ValidationError(f"multiplicity must be a positive integer, got {mult!r}")
            pt = space.validate(pt)
            if space.in_A(pt):
                raise ValidationError(f"{pt} lies in A; diagrams live on X \\ A")
            counts[pt] += int(mult)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "entries", tuple(sorted(counts.items())))

    @classmethod
    def from_points(cls, space, points: Iterable[Any], mults: Sequence[int] | None = None) -> "Diagram":
        points = list(points)
        if mults is None:
            mults = [1] * len(points)
        if len(mults) != len(points):
            raise ValidationError("points and multiplicities differ in length")
        return cls(space, tuple(zip(points, mults)))

    @classmethod
    def empty(cls, space) -> "Diagram":
        return cls(space, ())

    # -- multiset views ---------------------------------------------------
    def __len__(self) -> int:
        return sum(m for _, m in self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __iter__(self) -> Iterator[Point]:
        for pt, m in self.entries:
            for _ in range(m):
                yield pt

    @property
    def cardinality(self) -> int:
        return len(self)

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(pt for pt, _ in self.entries)

    def multiplicity(self, pt: Point) -> int:
        return dict(self.entries).get(pt, 0)

    def __add__(self, other: "Diagram") -> "Diagram":
        return add(self, other)

    def __rmul__(self, k: int) -> "Diagram":
        if int(k) != k or k < 0:
            raise ValidationError("diagrams scale by non-negative integers only")
        return Diagram(self.space, tuple((pt, m * int(k)) for pt, m in self.entries if k))

    def __repr__(self) -> str:
        body = ", ".join(pt.__repr__() + (f"x{m}" if m > 1 else "") for pt, m in self.entries)
        return f"Diagram[{self.space.name}]{{{body}}}"

    def on(self, space) -> "Diagram":
        """The same formal sum read in another space with compatible payloads."""
        return Diagram(space, self.entries)

    def dists_to_A(self) -> list[tuple[float, int]]:
        return [(self.space.dist_to_A(pt), m) for pt, m in self.entries]


def _check_same(a: Diagram, b: Diagram) -> None:
    if a.space != b.space:
        raise SpaceMismatchError(f"diagrams live in different spaces: {a.space.name} vs {b.space.name}")


def add(alpha: Diagram, beta: Diagram) -> Diagram:
    _check_same(alpha, beta)
    return Diagram(alpha.space, alpha.entries + beta.entries)


def upper_part(alpha: Diagram, delta: float) -> Diagram:
    """Entries at distance ``>= delta`` from ``A``."""
    if not delta > 0:
        raise ValidationError("delta must be positive")
    sp = alpha.space
    return Diagram(sp, tuple(e for e in alpha.entries if sp.dist_to_A(e[0]) >= delta))


def lower_part(alpha: Diagram, delta: float) -> Diagram:
    """Entries at distance ``< delta`` from ``A``."""
    if not delta > 0:
        raise ValidationError("delta must be positive")
    sp = alpha.space
    return Diagram(sp, tuple(e for e in alpha.entries if sp.dist_to_A(e[0]) < delta))


def persistence_norm(alpha: Diagram, p) -> float:
    """``||(d(x_i, A))_i||_p`` counted with multiplicity, i.e. ``W_p(alpha, 0)``."""
    return pnorm(alpha.dists_to_A(), parse_p(p))


@dataclass(frozen=True)
class TruncatedDiagram:
    """A countable diagram known through a finite head and a tail bound.

    Represents some diagram whose difference from ``head`` has
    ``W_p(tail, 0) <= tail_bound`` with ``p = tail_exponent``.
    """

    head: Diagram
    tail_bound: float = 0.0
    tail_exponent: float = 1.0

    def __post_init__(self):
        tb = float(self.tail_bound)
        if math.isnan(tb) or tb < 0:
            raise ValidationError("tail bound must be >= 0")
        object.__setattr__(self, "tail_bound", tb)
        object.__setattr__(self, "tail_exponent", parse_p(self.tail_exponent))

    @property
    def space(self) -> MetricPair:
        return self.head.space

    @classmethod
    def exact(cls, head: Diagram, p=1.0) -> "TruncatedDiagram":
        return cls(head, 0.0, p)


@dataclass
class EssentialWitness:
    eps: float
    upper_count: int
    lower_norm_bound: float


def check_essentially_p_finite(alpha: TruncatedDiagram, eps_schedule: Sequence[float]) -> list[EssentialWitness]:
    """Per ``eps``: ``|u_eps(head)|`` and a bound on ``W_p(l_eps(alpha), 0)``.

    The lower-part bound combines the head's lower part with the tail bound
    by the ``p``-norm (their supports are disjoint). Both numbers are finite
    for every truncated diagram; the report documents the witness.
    """
    p = alpha.tail_exponent
    out = []
    for eps in eps_schedule:
        if not eps > 0:
            raise ValidationError("schedule entries must be positive")
        lower = persistence_norm(lower_part(alpha.head, eps), p)
        out.append(EssentialWitness(
            eps=float(eps),
            upper_count=len(upper_part(alpha.head, eps)),
            lower_norm_bound=pnorm([lower, alpha.tail_bound], p),
        ))
    return out


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def diagram_to_json(alpha: Diagram | TruncatedDiagram) -> dict:
    head = alpha.head if isinstance(alpha, TruncatedDiagram) else alpha
    out: dict[str, Any] = {
        "space": head.space.name,
        "points": [{"pt": head.space.to_json(pt), "mult": m} for pt, m in head.entries],
    }
    if isinstance(alpha, TruncatedDiagram) and (alpha.tail_bound or alpha.tail_exponent != 1.0):
        p = alpha.tail_exponent
        out["tail"] = {"p": "inf" if p == INF else p, "bound": alpha.tail_bound}
    return out


def diagram_from_json(obj: Any, space=None) -> Diagram | TruncatedDiagram:
    """Parse the diagram JSON object; returns a TruncatedDiagram iff a tail is present.

    A bare list is read as the ``points`` array. ``space`` overrides or
    supplies the space; a conflicting ``"space"`` field is an error.
    """
    if isinstance(obj, list):
        obj = {"points": obj}
    if not isinstance(obj, dict):
        raise ValidationError("diagram JSON must be an object or a list of points")
    named = obj.get("space")
    if space is None and named is None:
        raise ValidationError("diagram JSON names no space and none was given")
    sp = make_space(space if space is not None else named)
    if named is not None and make_space(named) != sp:
        raise SpaceMismatchError(f"diagram is on {named!r} but {sp.name!r} was requested")
    entries = []
    for item in obj.get("points", []):
        if isinstance(item, dict) and "pt" in item:
            entries.append((sp.from_json(item["pt"]), item.get("mult", 1)))
        else:
            entries.append((sp.from_json(item), 1))
    head = Diagram(sp, tuple(entries))
    tail = obj.get("tail")
    if tail is None:
        return head
    return TruncatedDiagram(head, tail.get("bound", 0.0), tail.get("p", 1.0))
