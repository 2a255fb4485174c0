"""Finite-dimensional normed-space primitives: points, norms, boxes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

# absolute tolerance for algebraic identities that are exact in real arithmetic
IDENTITY_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class Point:
    """An immutable point of R^n with finite coordinates."""

    coords: tuple[float, ...]

    def __init__(self, coords: Iterable[float] | float):
        if isinstance(coords, (int, float, np.floating, np.integer)):
            coords = (coords,)
        values = tuple(float(c) for c in coords)
        if not values:
            raise InvalidInputError("a point needs at least one coordinate")
        for c in values:
            if not math.isfinite(c):
                raise InvalidInputError(f"non-finite coordinate in {values}")
        object.__setattr__(self, "coords", values)

    @classmethod
    def _trusted(cls, values: tuple[float, ...]) -> Point:
        # skips validation; callers guarantee a non-empty tuple of finite floats
        p = object.__new__(cls)
        object.__setattr__(p, "coords", values)
        return p

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __repr__(self) -> str:
        return f"Point({list(self.coords)})"


class NormKind(enum.Enum):
    L1 = "L1"
    L2 = "L2"
    LINF = "LINF"

    @classmethod
    def parse(cls, name: str | NormKind) -> NormKind:
        if isinstance(name, NormKind):
            return name
        try:
            return cls[name.upper().replace("INFINITY", "INF")]
        except KeyError:
            raise InvalidInputError(f"unknown norm {name!r}; expected L1, L2 or LINF") from None


def _norm_tuple(values: Sequence[float], kind: NormKind) -> float:
    if kind is NormKind.L2:
        return math.hypot(*values)
    if kind is NormKind.L1:
        return math.fsum([abs(v) for v in values])
    return max([abs(v) for v in values])


def norm_of(p: Point, kind: NormKind = NormKind.L2) -> float:
    if p.dim == 0:
        raise InvalidInputError("norm of a zero-dimensional point")
    return _norm_tuple(p.coords, kind)


def _check_dims(x: Point, y: Point) -> None:
    if len(x.coords) != len(y.coords):
        raise InvalidInputError(f"dimension mismatch: {x.dim} vs {y.dim}")


def distance(x: Point, y: Point, kind: NormKind = NormKind.L2) -> float:
    _check_dims(x, y)
    if len(x.coords) == 1:
        return abs(x.coords[0] - y.coords[0])
    return _norm_tuple([a - b for a, b in zip(x.coords, y.coords)], kind)


def convex_combine(a: float, x: Point, y: Point) -> Point:
    """Return ``(1 - a) * x + a * y`` coordinatewise."""
    if not 0.0 <= a <= 1.0:
        raise InvalidInputError(f"convex weight {a} outside [0, 1]")
    _check_dims(x, y)
    s = 1.0 - a
    return Point._trusted(tuple([s * u + a * v for u, v in zip(x.coords, y.coords)]))


def norms(vectors: np.ndarray, kind: NormKind) -> np.ndarray:
    """Row-wise norms of a ``(m, dim)`` array."""
    if kind is NormKind.L2:
        return np.sqrt(np.einsum("ij,ij->i", vectors, vectors))
    if kind is NormKind.L1:
        return np.abs(vectors).sum(axis=1)
    return np.abs(vectors).max(axis=1)


@dataclass(frozen=True)
class BoxDomain:
    """Closed axis-aligned box ``lower <= p <= upper``."""

    lower: Point
    upper: Point

    def __post_init__(self):
        if not isinstance(self.lower, Point):
            object.__setattr__(self, "lower", Point(self.lower))
        if not isinstance(self.upper, Point):
            object.__setattr__(self, "upper", Point(self.upper))
        if self.lower.dim != self.upper.dim:
            raise InvalidInputError("box bounds have different dimensions")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise InvalidInputError(f"empty box: lower {self.lower} exceeds upper {self.upper}")

    @classmethod
    def interval(cls, lo: float = 0.0, hi: float = 1.0) -> BoxDomain:
        return cls(Point((lo,)), Point((hi,)))

    @property
    def dim(self) -> int:
        return self.lower.dim

    def corners(self) -> list[Point]:
        """All 2^dim vertices, lower corner first, in binary counting order."""
        out = []
        for mask in range(2 ** self.dim):
            out.append(Point(
                self.upper[i] if mask >> (self.dim - 1 - i) & 1 else self.lower[i]
                for i in range(self.dim)
            ))
        # degenerate axes produce repeats
        return list(dict.fromkeys(out))

    def excess(self, p: Point) -> float:
        """L-infinity distance from ``p`` to the box (0 inside)."""
        return max(
            max(lo - c, c - hi, 0.0) for c, lo, hi in zip(p.coords, self.lower.coords, self.upper.coords)
        )

    def to_json(self) -> dict:
        return {"lower": list(self.lower.coords), "upper": list(self.upper.coords)}

    @classmethod
    def from_json(cls, data: dict) -> BoxDomain:
        try:
            return cls(Point(data["lower"]), Point(data["upper"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"domain needs 'lower' and 'upper' lists: {exc}") from None


UNIT_INTERVAL = BoxDomain.interval(0.0, 1.0)


def contains(d: BoxDomain, p: Point, tol: float = 0.0) -> bool:
    if len(d.lower.coords) != len(p.coords):
        raise InvalidInputError(f"dimension mismatch: domain {d.dim}, point {p.dim}")
    for c, lo, hi in zip(p.coords, d.lower.coords, d.upper.coords):
        if not lo - tol <= c <= hi + tol:
            return False
    return True
