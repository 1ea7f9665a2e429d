"""Metric pairs ``(X, d, A)``: built-in spaces, a registry, and quotient metrics.

Distances are plain floats. ``math.inf`` is the one and only infinite
value; it is never replaced by a large finite stand-in.

Points are hashable, orderable tuples whose layout depends on the space:

=================  ==========================================
space              payload
=================  ==========================================
halfplane:lq       ``(birth, death)`` with ``birth <= death``
pointed_euclidean  ``(x_1, ..., x_k)``
ray                ``(x,)`` with ``x >= 0``
wedge_circles      ``(arc, theta)``, ``pi/arc**3 <= theta <= 2pi``
wedge_intervals    ``(arc, s)``, ``0 <= s <= 1 + 1/arc``
=================  ==========================================
"""

from __future__ import annotations

import math
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import CapabilityError, ValidationError

Point = tuple
INF = math.inf
TWO_PI = 2.0 * math.pi


class _CollapsedA:
    """The class of ``A`` in ``X/A``; also the A-side of a matched pair."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "A"

    def __reduce__(self):
        return (_CollapsedA, ())


A = _CollapsedA()


# --------------------------------------------------------------------------
# extended reals and p-norms
# --------------------------------------------------------------------------

MAX_FINITE_P = 64.0


def parse_p(p: Any) -> float:
    """Parse an exponent in ``[1, inf]``; accepts the string ``"inf"``."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "+inf"):
            return INF
        try:
            p = float(s)
        except ValueError:
            raise ValidationError(f"bad exponent {p!r}") from None
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise ValidationError(f"bad exponent {p!r}") from None
    if math.isnan(p) or p < 1.0:
        raise ValidationError(f"exponent must lie in [1, inf], got {p}")
    return p


def pnorm(values: Iterable[tuple[float, int]] | Iterable[float], p: float) -> float:
    """``p``-norm of a vector given as ``(value, multiplicity)`` pairs or bare values.

    Infinite entries make the norm infinite. Finite ``p`` is evaluated as
    ``M * (sum m (v/M)**p) ** (1/p)`` with ``M`` the largest entry, and the
    sum uses :func:`math.fsum`, so the result does not depend on the order of
    the terms.
    """
    items = [v if isinstance(v, tuple) else (v, 1) for v in values]
    items = [(float(v), int(m)) for v, m in items if m]
    if not items:
        return 0.0
    top = max(v for v, _ in items)
    if p == INF or top == INF or top == 0.0:
        return top
    if p == 1.0:
        return math.fsum(m * v for v, m in items)
    s = math.fsum(m * (v / top) ** p for v, m in items)
    if p == 2.0:
        return top * math.sqrt(s)
    return top * s ** (1.0 / p)


def _coord_gap(a: float, b: float) -> float:
    return 0.0 if a == b else abs(a - b)


def _as_float(v: Any, what: str = "coordinate") -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "-inf"):
        return -INF if v.strip().startswith("-") else INF
    try:
        f = float(v)
    except (TypeError, ValueError):
        raise ValidationError(f"bad {what} {v!r}") from None
    if math.isnan(f):
        raise ValidationError(f"NaN {what}")
    return f


def _json_float(v: float) -> Any:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return v


# --------------------------------------------------------------------------
# the metric-pair protocol
# --------------------------------------------------------------------------


class MetricPair:
    """A space ``X`` with an extended pseudometric and a closed subset ``A``.

    Subclasses override :meth:`validate`, :meth:`dist`, :meth:`dist_to_A`,
    :meth:`in_A` and, when available, :meth:`nearest_in_A`,
    :meth:`geodesic_point` and :meth:`approach_point`.
    """

    name: str = "abstract"
    distance_minimizing: bool = False
    geodesic: bool = False
    length_space: bool = False
    nonneg_curved: bool = False
    complete: bool = False
    base_point: Point | None = None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MetricPair) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return f"<MetricPair {self.name}>"

    @property
    def capabilities(self) -> dict[str, bool]:
        return {
            "distance_minimizing": self.distance_minimizing,
            "geodesic": self.geodesic,
            "length_space": self.length_space,
            "nonneg_curved": self.nonneg_curved,
            "complete": self.complete,
            "pointed": self.base_point is not None,
        }

    # -- required --------------------------------------------------------
    def validate(self, x: Any) -> Point:
        raise NotImplementedError

    def dist(self, x: Point, y: Point) -> float:
        raise NotImplementedError

    def dist_to_A(self, x: Point) -> float:
        raise NotImplementedError

    def in_A(self, x: Point) -> bool:
        raise NotImplementedError

    # -- optional --------------------------------------------------------
    def nearest_in_A(self, x: Point) -> Point | None:
        """A point of ``A`` realizing ``dist_to_A(x)``, or None if not attained."""
        return None

    def geodesic_point(self, x: Point, y: Point, t: float) -> Point:
        raise CapabilityError(f"{self.name} has no geodesics")

    def approach_point(self, r: float) -> Point:
        """A point at distance (approximately) ``r`` from ``A``."""
        raise CapabilityError(f"{self.name} exposes no sequence approaching A")

    def pairwise(self, xs: Sequence[Point], ys: Sequence[Point]) -> np.ndarray:
        out = np.empty((len(xs), len(ys)))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                out[i, j] = self.dist(x, y)
        return out

    # -- serialization ----------------------------------------------------
    def to_json(self, x: Point) -> Any:
        return [_json_float(v) for v in x]

    def from_json(self, obj: Any) -> Point:
        return self.validate(obj)


# --------------------------------------------------------------------------
# built-in spaces
# --------------------------------------------------------------------------


class HalfPlane(MetricPair):
    """``({b <= d}, l_q, diagonal)``; coordinates may be infinite."""

    distance_minimizing = True
    geodesic = True
    length_space = True
    complete = True

    def __init__(self, q: float):
        if q not in (1.0, 2.0, INF):
            raise ValidationError(f"halfplane ground norm must be 1, 2 or inf, got {q}")
        self.q = q
        self.name = "halfplane:" + {1.0: "l1", 2.0: "l2", INF: "linf"}[q]
        # only the Euclidean half-plane is a convex subset of a flat space
        self.nonneg_curved = q == 2.0

    def validate(self, x: Any) -> Point:
        if isinstance(x, dict) or not hasattr(x, "__len__") or len(x) != 2:
            raise ValidationError(f"{self.name} point must be [birth, death], got {x!r}")
        b, d = _as_float(x[0]), _as_float(x[1])
        if b > d:
            raise ValidationError(f"{self.name} point {x!r} has birth > death")
        if b == INF or d == -INF:
            if b != d:
                raise ValidationError(f"bad point {x!r}")
        return (b, d)

    def dist(self, x: Point, y: Point) -> float:
        if x == y:
            return 0.0
        g0, g1 = _coord_gap(x[0], y[0]), _coord_gap(x[1], y[1])
        if self.q == INF:
            return max(g0, g1)
        if not all(map(math.isfinite, (*x, *y))):
            return INF
        if self.q == 1.0:
            return g0 + g1
        return math.hypot(g0, g1)

    def in_A(self, x: Point) -> bool:
        return x[0] == x[1]

    def nearest_in_A(self, x: Point) -> Point | None:
        b, d = x
        if not (math.isfinite(b) and math.isfinite(d)):
            return None
        if self.q == 1.0:
            # every (t, t) with b <= t <= d is nearest; take the smallest
            return (b, b)
        m = 0.5 * (b + d)
        return (m, m)

    def dist_to_A(self, x: Point) -> float:
        if self.in_A(x):
            return 0.0
        a = self.nearest_in_A(x)
        return INF if a is None else self.dist(x, a)

    def geodesic_point(self, x: Point, y: Point, t: float) -> Point:
        return (_lerp(x[0], y[0], t), _lerp(x[1], y[1], t))

    def approach_point(self, r: float) -> Point:
        scale = {1.0: 1.0, 2.0: math.sqrt(2.0), INF: 2.0}[self.q]
        return (0.0, scale * r)

    def pairwise(self, xs, ys):
        X = np.asarray(xs, dtype=float).reshape(-1, 2)
        Y = np.asarray(ys, dtype=float).reshape(-1, 2)
        if not (np.isfinite(X).all() and np.isfinite(Y).all()):
            return super().pairwise(xs, ys)
        diff = np.abs(X[:, None, :] - Y[None, :, :])
        if self.q == 1.0:
            return diff[..., 0] + diff[..., 1]
        if self.q == 2.0:
            return np.hypot(diff[..., 0], diff[..., 1])
        return diff.max(axis=-1)

    def to_json(self, x):
        return [_json_float(x[0]), _json_float(x[1])]


def _lerp(a: float, b: float, t: float) -> float:
    if a == b:
        return a
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    return (1.0 - t) * a + t * b


class PointedEuclidean(MetricPair):
    """``(R^k, l_2, {base})``."""

    distance_minimizing = True
    geodesic = True
    length_space = True
    nonneg_curved = True
    complete = True

    def __init__(self, k: int, base: Sequence[float] | None = None):
        if int(k) != k or k <= 0:
            raise ValidationError(f"dimension must be a positive integer, got {k}")
        self.k = int(k)
        base = tuple(float(v) for v in base) if base is not None else (0.0,) * self.k
        if len(base) != self.k or not all(map(math.isfinite, base)):
            raise ValidationError(f"base point {base} does not fit dimension {k}")
        self.base_point = base
        self.name = f"pointed_euclidean:{self.k}"
        if any(base):
            self.name += ":" + ",".join(repr(v) for v in base)

    def validate(self, x: Any) -> Point:
        if isinstance(x, (int, float)) and self.k == 1:
            x = [x]
        if isinstance(x, dict) or not hasattr(x, "__len__") or len(x) != self.k:
            raise ValidationError(f"{self.name} point must have {self.k} coordinates, got {x!r}")
        pt = tuple(_as_float(v) for v in x)
        if not all(map(math.isfinite, pt)):
            raise ValidationError(f"{self.name} coordinates must be finite")
        return pt

    def dist(self, x, y):
        return 0.0 if x == y else math.dist(x, y)

    def in_A(self, x):
        return x == self.base_point

    def nearest_in_A(self, x):
        return self.base_point

    def dist_to_A(self, x):
        return self.dist(x, self.base_point)

    def geodesic_point(self, x, y, t):
        return tuple(_lerp(a, b, t) for a, b in zip(x, y))

    def approach_point(self, r):
        return (self.base_point[0] + r,) + self.base_point[1:]

    def pairwise(self, xs, ys):
        X = np.asarray(xs, dtype=float).reshape(-1, self.k)
        Y = np.asarray(ys, dtype=float).reshape(-1, self.k)
        return np.sqrt(((X[:, None, :] - Y[None, :, :]) ** 2).sum(axis=-1))


class Ray(MetricPair):
    """``([0, inf), |.|, {0})``."""

    name = "ray"
    distance_minimizing = True
    geodesic = True
    length_space = True
    nonneg_curved = True
    complete = True
    base_point = (0.0,)

    def validate(self, x):
        if hasattr(x, "__len__") and not isinstance(x, (str, dict)):
            if len(x) != 1:
                raise ValidationError(f"ray point must be a single number, got {x!r}")
            x = x[0]
        v = _as_float(x)
        if v < 0 or v == INF:
            raise ValidationError(f"ray point must be finite and >= 0, got {x!r}")
        return (v + 0.0,)

    def dist(self, x, y):
        return abs(x[0] - y[0])

    def in_A(self, x):
        return x[0] == 0.0

    def nearest_in_A(self, x):
        return (0.0,)

    def dist_to_A(self, x):
        return x[0]

    def geodesic_point(self, x, y, t):
        return (_lerp(x[0], y[0], t),)

    def approach_point(self, r):
        return (float(r),)


class _Wedge(MetricPair):
    def validate(self, x):
        if isinstance(x, dict):
            try:
                arc, theta = x["arc"], x["theta"]
            except KeyError:
                raise ValidationError(f"wedge point needs 'arc' and 'theta': {x!r}") from None
        elif hasattr(x, "__len__") and len(x) == 2:
            arc, theta = x
        else:
            raise ValidationError(f"bad wedge point {x!r}")
        if isinstance(arc, bool) or int(arc) != arc or arc < 1:
            raise ValidationError(f"arc index must be a positive integer, got {arc!r}")
        return self._canonical(int(arc), _as_float(theta, "angle"))

    def to_json(self, x):
        return {"arc": x[0], "theta": x[1]}


class WedgeCircles(_Wedge):
    """Circles of radius ``n`` with a gap near angle 0, wedged at angle ``2pi``.

    Arc ``n`` keeps angles ``pi/n**3 <= theta <= 2pi``; distances are the
    chordless two-case formula (restricted arc length on one circle, sum
    through the wedge point otherwise). The metric is not intrinsic: the
    short way across the gap is measured but cannot be walked, so the space
    is path connected without being geodesic.
    """

    name = "wedge_circles"
    distance_minimizing = True
    complete = True
    base_point = (1, TWO_PI)

    def _canonical(self, n, theta):
        if not (math.pi / n**3 <= theta <= TWO_PI):
            raise ValidationError(f"angle {theta} outside arc {n}")
        return self.base_point if theta == TWO_PI else (n, theta)

    @staticmethod
    def _to_base(n, theta):
        return min(n * theta, n * (TWO_PI - theta))

    def dist(self, x, y):
        if x == y:
            return 0.0
        (n, a), (m, b) = x, y
        if n == m:
            g = abs(a - b)
            return min(n * g, n * (TWO_PI - g))
        return self._to_base(n, a) + self._to_base(m, b)

    def in_A(self, x):
        return x[1] == TWO_PI

    def nearest_in_A(self, x):
        return self.base_point

    def dist_to_A(self, x):
        return self.dist(x, self.base_point)

    def approach_point(self, r):
        if not 0 < r <= math.pi:
            raise ValidationError("approach radius must lie in (0, pi]")
        return (1, TWO_PI - r)

    def pairwise(self, xs, ys):
        if not xs or not ys:
            return np.empty((len(xs), len(ys)))
        X = np.asarray(xs, dtype=float)
        Y = np.asarray(ys, dtype=float)
        nx, ax = X[:, 0][:, None], X[:, 1][:, None]
        ny, ay = Y[:, 0][None, :], Y[:, 1][None, :]
        g = np.abs(ax - ay)
        same = np.minimum(nx * g, nx * (TWO_PI - g))
        cross = np.minimum(nx * ax, nx * (TWO_PI - ax)) + np.minimum(ny * ay, ny * (TWO_PI - ay))
        out = np.where(nx == ny, same, cross)
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                if x == y:
                    out[i, j] = 0.0
        return out


class WedgeIntervals(_Wedge):
    """Intervals ``[0, 1 + 1/k]`` glued at 0, with ``A`` the far endpoints.

    The wedge point is at distance exactly 1 from ``A`` but every endpoint is
    strictly farther, so ``A`` is closed yet not distance minimizing.
    """

    name = "wedge_intervals"
    geodesic = True
    length_space = True
    complete = True

    @staticmethod
    def _end(k):
        return 1.0 + 1.0 / k

    def _canonical(self, k, s):
        if not 0.0 <= s <= self._end(k):
            raise ValidationError(f"position {s} outside interval {k}")
        return (1, 0.0) if s == 0.0 else (k, s)

    def dist(self, x, y):
        (k, s), (j, t) = x, y
        if k == j:
            return abs(s - t)
        return s + t

    def in_A(self, x):
        return x[1] == self._end(x[0])

    def dist_to_A(self, x):
        k, s = x
        if s == 0.0:
            # inf_k (1 + 1/k), never attained
            return 1.0
        return min(self._end(k) - s, s + 1.0)

    def nearest_in_A(self, x):
        k, s = x
        if s > 0.0 and self._end(k) - s <= s + 1.0:
            return (k, self._end(k))
        return None

    def geodesic_point(self, x, y, t):
        if t == 0.0:
            return x
        if t == 1.0:
            return y
        (k, s), (j, u) = x, y
        if k == j or s == 0.0 or u == 0.0:
            # one segment; the wedge point lies on every arc
            return self._canonical(j if s == 0.0 else k, _lerp(s, u, t))
        pos = t * (s + u)
        if pos <= s:
            return self._canonical(k, s - pos)
        return self._canonical(j, min(pos - s, u))

    def approach_point(self, r):
        if not 0 < r <= 1.5:
            raise ValidationError("approach radius must lie in (0, 1.5]")
        return (1, 2.0 - r)

    def a_point(self, k: int) -> Point:
        return (k, self._end(k))


class CustomMetricPair(MetricPair):
    """A metric pair assembled from user callables.

    Closedness of ``A`` is an unchecked contract of the caller.
    """

    def __init__(
        self,
        name: str,
        dist: Callable[[Point, Point], float],
        dist_to_A: Callable[[Point], float],
        in_A: Callable[[Point], bool],
        *,
        validate: Callable[[Any], Point] | None = None,
        nearest_in_A: Callable[[Point], Point | None] | None = None,
        geodesic_point: Callable[[Point, Point, float], Point] | None = None,
        approach_point: Callable[[float], Point] | None = None,
        base_point: Point | None = None,
        distance_minimizing: bool = False,
        length_space: bool = False,
        nonneg_curved: bool = False,
        complete: bool = False,
    ):
        self.name = name
        self._dist, self._dist_to_A, self._in_A = dist, dist_to_A, in_A
        self._validate = validate or (lambda x: tuple(x) if hasattr(x, "__iter__") else (x,))
        self._nearest = nearest_in_A
        self._geo = geodesic_point
        self._approach = approach_point
        self.base_point = base_point
        self.distance_minimizing = distance_minimizing and nearest_in_A is not None
        self.geodesic = geodesic_point is not None
        self.length_space = length_space or self.geodesic
        self.nonneg_curved = nonneg_curved
        self.complete = complete

    def validate(self, x):
        return self._validate(x)

    def dist(self, x, y):
        return 0.0 if x == y else float(self._dist(x, y))

    def dist_to_A(self, x):
        return float(self._dist_to_A(x))

    def in_A(self, x):
        return bool(self._in_A(x))

    def nearest_in_A(self, x):
        return self._nearest(x) if self._nearest else None

    def geodesic_point(self, x, y, t):
        if self._geo is None:
            return super().geodesic_point(x, y, t)
        return self._geo(x, y, t)

    def approach_point(self, r):
        if self._approach is None:
            return super().approach_point(r)
        return self._approach(r)


class QuotientGround(MetricPair):
    """``(X, d_q, A)``: the same points and ``A`` under the quotient metric ``d_q``."""

    def __init__(self, base: MetricPair, q: float):
        self.base = base
        self.q = parse_p(q)
        self.name = f"{base.name}|d_{'inf' if self.q == INF else repr(self.q)}"
        self.distance_minimizing = base.distance_minimizing
        self.complete = False
        self.base_point = base.base_point

    def validate(self, x):
        return self.base.validate(x)

    def dist(self, x, y):
        return quotient_dist(self.base, self.q, x, y)

    def dist_to_A(self, x):
        return self.base.dist_to_A(x)

    def in_A(self, x):
        return self.base.in_A(x)

    def nearest_in_A(self, x):
        return self.base.nearest_in_A(x)

    def to_json(self, x):
        return self.base.to_json(x)


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

_REGISTRY: dict[str, Callable[[list[str]], MetricPair]] = {}
_CACHE: dict[str, MetricPair] = {}


def register_space(name: str, factory: Callable[[list[str]], MetricPair] | MetricPair) -> None:
    """Register a user space under ``name``.

    ``factory`` is either a ready :class:`MetricPair` or a callable taking the
    colon-separated parameters that follow the name in a spec string.
    """
    if ":" in name:
        raise ValidationError("space names may not contain ':'")
    if isinstance(factory, MetricPair):
        space = factory
        factory = lambda params: space  # noqa: E731
    _REGISTRY[name] = factory
    for key in [k for k in _CACHE if k.split(":")[0] == name]:
        del _CACHE[key]


def _halfplane(params):
    if len(params) != 1:
        raise ValidationError("halfplane needs exactly one ground norm: l1, l2 or linf")
    tok = params[0].lower().removeprefix("l")
    try:
        q = parse_p(tok)
    except ValidationError:
        raise ValidationError(f"unknown halfplane ground norm {params[0]!r}") from None
    return HalfPlane(q)


def _pointed(params):
    if not params or len(params) > 2:
        raise ValidationError("pointed_euclidean:<k>[:<b1>,<b2>,...]")
    try:
        k = int(params[0])
    except ValueError:
        raise ValidationError(f"bad dimension {params[0]!r}") from None
    base = None
    if len(params) == 2:
        base = [_as_float(v) for v in params[1].split(",")]
    return PointedEuclidean(k, base)


def _noparams(cls):
    def factory(params):
        if params:
            raise ValidationError(f"{cls.name} takes no parameters")
        return cls()

    return factory


_REGISTRY.update(
    halfplane=_halfplane,
    pointed_euclidean=_pointed,
    ray=_noparams(Ray),
    wedge_circles=_noparams(WedgeCircles),
    wedge_intervals=_noparams(WedgeIntervals),
)


def make_space(spec: str | MetricPair) -> MetricPair:
    """Build a metric pair from a spec string such as ``"halfplane:linf"``."""
    if isinstance(spec, MetricPair):
        return spec
    if not isinstance(spec, str) or not spec.strip():
        raise ValidationError(f"bad space spec {spec!r}")
    spec = spec.strip()
    if spec in _CACHE:
        return _CACHE[spec]
    name, *params = spec.split(":")
    if name not in _REGISTRY:
        raise ValidationError(f"unknown space {name!r}; known: {sorted(_REGISTRY)}")
    space = _REGISTRY[name](params)
    _CACHE[spec] = space
    return space


# --------------------------------------------------------------------------
# module-level operations
# --------------------------------------------------------------------------


def dist_to_A(space: MetricPair, x: Any) -> float:
    return space.dist_to_A(space.validate(x))


def project_to_A(space: MetricPair, x: Any) -> tuple[Point, float]:
    """Nearest point of ``A`` and its distance.

    Raises :class:`CapabilityError` if ``A`` is not distance minimizing (then
    optimal matchings need not exist) and :class:`ValidationError` if ``x`` is
    infinitely far from ``A``.
    """
    if not space.distance_minimizing:
        raise CapabilityError(f"A is not distance minimizing in {space.name}")
    x = space.validate(x)
    if space.in_A(x):
        return x, 0.0
    a = space.nearest_in_A(x)
    if a is None:
        raise ValidationError(f"{x} is infinitely far from A")
    return a, space.dist(x, a)


def quotient_dist(space: MetricPair, p: Any, x: Any, y: Any) -> float:
    """``d_p(x, y) = min(d(x, y), ||(d(x, A), d(y, A))||_p)``; ``x`` or ``y`` may be :data:`A`."""
    p = parse_p(p)
    dx = 0.0 if x is A else space.dist_to_A(space.validate(x))
    dy = 0.0 if y is A else space.dist_to_A(space.validate(y))
    through_a = pnorm([dx, dy], p)
    if x is A or y is A:
        return through_a
    return min(space.dist(space.validate(x), space.validate(y)), through_a)


def in_offset(space: MetricPair, delta: float, x: Any) -> bool:
    """Membership in the open offset ``{x : d(x, A) < delta}``."""
    if not delta > 0:
        raise ValidationError("offset radius must be positive")
    return space.dist_to_A(space.validate(x)) < delta
