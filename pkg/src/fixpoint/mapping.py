"""Declarative self-maps of a box and the averaged transform ``T_lam``.

A mapping is one of four immutable variants sharing a ``domain``:

* :class:`Builtin` - named catalog maps (``flip``, ``step_half``, ``affine(c)``)
* :class:`Affine` - ``x -> A x + offset``
* :class:`Expression` - a 1-D map written in the :mod:`fixpoint.expr` language
* :class:`PiecewiseMap` - ordered ``(guard, map)`` cases, first match wins

:func:`average` wraps any of them as ``(1 - lam) x + lam T x``.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import expr
from .errors import DomainError, EvaluationError, InvalidInputError
from .space import UNIT_INTERVAL, BoxDomain, Point, contains, convex_combine

# slack for points that sit on the box boundary up to rounding
DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class Affine:
    matrix: tuple[tuple[float, ...], ...]
    offset: Point
    domain: BoxDomain

    def __post_init__(self):
        matrix = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", matrix)
        if not isinstance(self.offset, Point):
            object.__setattr__(self, "offset", Point(self.offset))
        n = self.domain.dim
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise InvalidInputError(f"affine matrix must be {n}x{n} to match the domain")
        if self.offset.dim != n:
            raise InvalidInputError(f"affine offset must have dimension {n}")
        if not all(math.isfinite(v) for row in matrix for v in row):
            raise InvalidInputError("affine matrix has non-finite entries")

    def _apply(self, x: Point) -> Point:
        xs = x.coords
        return Point(
            b + sum(a * v for a, v in zip(row, xs)) for row, b in zip(self.matrix, self.offset.coords)
        )


@dataclass(frozen=True)
class Expression:
    src: str
    domain: BoxDomain = UNIT_INTERVAL
    ast: expr.Node = field(init=False, repr=False, compare=False)
    fn: Callable[[float], float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.domain.dim != 1:
            raise InvalidInputError("expression maps are one-dimensional")
        object.__setattr__(self, "ast", expr.parse_expression(self.src))
        object.__setattr__(self, "fn", expr.compile_ast(self.ast))
        _validate_on_domain(self, self.domain)

    def _apply(self, x: Point) -> Point:
        try:
            value = self.fn(x.coords[0])
        except OverflowError as exc:
            raise EvaluationError(f"overflow at x={x.coords[0]!r}") from exc
        return _finite_point(value, x)


@dataclass(frozen=True)
class PiecewiseMap:
    cases: tuple[tuple[str, MappingSpec], ...]
    domain: BoxDomain = UNIT_INTERVAL
    guards: tuple[expr.Compare, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.domain.dim != 1:
            raise InvalidInputError("piecewise guards are predicates on a scalar x")
        cases = tuple((str(g), m) for g, m in self.cases)
        if not cases:
            raise InvalidInputError("piecewise map needs at least one case")
        object.__setattr__(self, "cases", cases)
        object.__setattr__(self, "guards", tuple(expr.parse_condition(g) for g, _ in cases))

    def _apply(self, x: Point) -> Point:
        for guard, (_, branch) in zip(self.guards, self.cases):
            if expr.holds(guard, x.coords[0]):
                return branch._apply(x)
        raise EvaluationError(f"no piecewise guard matches x={x.coords[0]!r}")


_AFFINE_NAME = re.compile(r"^affine\(\s*([-+0-9.eE]+)\s*\)$")


@dataclass(frozen=True)
class Builtin:
    """Catalog map resolved by name; ``affine(c)`` is ``x -> c x``."""

    name: str
    domain: BoxDomain = UNIT_INTERVAL
    impl: MappingSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.name == "flip":
            impl = Expression("1 - x", self.domain)
        elif self.name == "step_half":
            impl = Expression("piecewise(x < 1, 0, 0.5)", self.domain)
        elif m := _AFFINE_NAME.match(self.name):
            c = float(m.group(1))
            n = self.domain.dim
            matrix = tuple(tuple(c if i == j else 0.0 for j in range(n)) for i in range(n))
            impl = Affine(matrix, Point([0.0] * n), self.domain)
        else:
            raise InvalidInputError(f"unknown builtin mapping {self.name!r}")
        object.__setattr__(self, "impl", impl)

    def _apply(self, x: Point) -> Point:
        return self.impl._apply(x)

    def fixed_point(self) -> Point | None:
        """The analytically known fixed point, when unique."""
        if self.name == "flip":
            return Point([0.5])
        if self.name == "step_half":
            return Point([0.0])
        c = float(_AFFINE_NAME.match(self.name).group(1))
        return None if c == 1.0 else Point([0.0] * self.domain.dim)


MappingSpec = Union[Builtin, Affine, Expression, PiecewiseMap]


@dataclass(frozen=True)
class AveragedSpec:
    base: MappingSpec
    lam: float

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise InvalidInputError(f"averaging weight {self.lam} outside (0, 1]")

    @property
    def domain(self) -> BoxDomain:
        return self.base.domain

    def _apply(self, x: Point) -> Point:
        if self.lam == 1.0:
            return self.base._apply(x)
        return convex_combine(self.lam, x, self.base._apply(x))


def _finite_point(value: float, x: Point) -> Point:
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite image {value!r} at x={x.coords[0]!r}")
    return Point._trusted((float(value),))


def _validate_on_domain(spec, domain: BoxDomain, n: int = 101) -> None:
    # catches zero denominators that a grid can see; continuity is not assumed
    for v in np.linspace(domain.lower[0], domain.upper[0], n):
        spec._apply(Point._trusted((float(v),)))


def evaluate(spec: MappingSpec | AveragedSpec, x: Point) -> Point:
    if not contains(spec.domain, x, DOMAIN_TOL):
        raise DomainError(f"{x} is outside the domain {spec.domain.to_json()}")
    return spec._apply(x)


def average(spec: MappingSpec, lam: float) -> AveragedSpec:
    return AveragedSpec(spec, float(lam))


def lambda_from_k(k: float) -> float:
    if not k >= 0.0 or not math.isfinite(k):
        raise InvalidInputError(f"enrichment parameter k={k} must be a finite number >= 0")
    return 1.0 / (k + 1.0)


def known_fixed_point(spec) -> Point | None:
    if isinstance(spec, Builtin):
        return spec.fixed_point()
    return None


# ---------------------------------------------------------------- sampling


def sample_points(domain: BoxDomain, n: int, seed: int) -> list[Point]:
    """About half grid (corners included), the rest seeded uniform draws."""
    dim = domain.dim
    n_grid = max(1, math.ceil(n / 2))
    per_axis = max(2, round(n_grid ** (1.0 / dim)))
    pts = grid_points(domain, per_axis)
    n_random = max(0, n - len(pts))
    lo, hi = domain.lower.to_array(), domain.upper.to_array()
    draws = np.random.default_rng(seed).random((n_random, dim))
    pts.extend(Point(lo + u * (hi - lo)) for u in draws)
    return pts


def grid_points(domain: BoxDomain, per_axis: int) -> list[Point]:
    """Tensor grid with ``per_axis`` points per axis; box corners come first."""
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(domain.lower, domain.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=1)
    pts = domain.corners() + [Point(row) for row in flat]
    return list(dict.fromkeys(pts))


@dataclass(frozen=True)
class SelfMapVerdict:
    ok: bool
    n_checked: int
    worst_point: Point | None = None
    worst_image: Point | None = None
    violation: float = 0.0
    reason: str = ""


def check_self_map(spec, seed: int = 0, n_samples: int = 100) -> SelfMapVerdict:
    """Sample the domain and report the image that lands furthest outside it."""
    if n_samples < 1:
        raise InvalidInputError("n_samples must be >= 1")
    worst = SelfMapVerdict(True, 0)
    pts = sample_points(spec.domain, n_samples, seed)
    for p in pts:
        try:
            img = spec._apply(p)
        except (EvaluationError, InvalidInputError) as exc:
            return SelfMapVerdict(False, len(pts), p, None, math.inf, str(exc))
        excess = spec.domain.excess(img)
        if excess > worst.violation:
            worst = SelfMapVerdict(False, 0, p, img, excess)
    ok = worst.violation <= DOMAIN_TOL
    return SelfMapVerdict(ok, len(pts), worst.worst_point, worst.worst_image, worst.violation,
                          "" if ok else "image outside the domain")


@functools.lru_cache(maxsize=256)
def self_map_ok(spec) -> SelfMapVerdict:
    return check_self_map(spec)


# ---------------------------------------------------------------- JSON


def spec_from_json(data: dict, domain: BoxDomain | None = None) -> MappingSpec:
    if not isinstance(data, dict):
        raise InvalidInputError("mapping must be a JSON object")
    if "domain" in data:
        domain = BoxDomain.from_json(data["domain"])
    kind = data.get("kind")
    try:
        if kind == "builtin":
            return Builtin(data["name"], domain or UNIT_INTERVAL)
        if kind == "expr":
            return Expression(data["src"], domain or UNIT_INTERVAL)
        if kind == "affine":
            matrix = data["matrix"]
            if domain is None:
                n = len(matrix)
                domain = BoxDomain(Point([0.0] * n), Point([1.0] * n))
            return Affine(matrix, Point(data["offset"]), domain)
        if kind == "piecewise":
            domain = domain or UNIT_INTERVAL
            cases = tuple((c["guard"], spec_from_json(c["map"], domain)) for c in data["cases"])
            return PiecewiseMap(cases, domain)
    except KeyError as exc:
        raise InvalidInputError(f"mapping of kind {kind!r} is missing field {exc}") from None
    except TypeError as exc:
        raise InvalidInputError(f"malformed mapping {data!r}: {exc}") from None
    raise InvalidInputError(f"unknown mapping kind {kind!r}")


def spec_to_json(spec: MappingSpec) -> dict:
    if isinstance(spec, Builtin):
        out = {"kind": "builtin", "name": spec.name}
    elif isinstance(spec, Expression):
        out = {"kind": "expr", "src": spec.src}
    elif isinstance(spec, Affine):
        out = {"kind": "affine", "matrix": [list(r) for r in spec.matrix], "offset": list(spec.offset)}
    elif isinstance(spec, PiecewiseMap):
        out = {"kind": "piecewise", "cases": [{"guard": g, "map": spec_to_json(m)} for g, m in spec.cases]}
    else:
        raise InvalidInputError(f"cannot serialise {spec!r}")
    out["domain"] = spec.domain.to_json()
    return out
