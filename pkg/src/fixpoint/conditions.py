"""Contractive-condition catalog and a sampling certifier.

Every condition has the shape ``lhs(x, y) <= rhs(x, y)`` where, for all kinds
except Zamfirescu, ``rhs = constant * denominator``.  The certifier scans a
deterministic set of pairs and either

* checks a given constant (``params``): infeasible on any pair with
  ``lhs > rhs + FEASIBILITY_TOL``, or
* estimates the smallest admissible constant as ``sup lhs / denominator``.

Sampling can only falsify a condition or bound its constant from below; it
never proves a ``for all x, y`` statement over the continuum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError, PreconditionError
from .mapping import DOMAIN_TOL, average, evaluate, grid_points
from .space import NormKind, Point, distance, norm_of, norms

FEASIBILITY_TOL = 1e-12
ZERO_TOL = 1e-15
_CHUNK = 250_000


class ConditionKind(enum.Enum):
    BANACH = "banach"
    KANNAN = "kannan"
    CHATTERJEA = "chatterjea"
    CHATTERJEA_TYPE = "chatterjea-type"
    CIRIC_MAX5 = "ciric"
    ZAMFIRESCU = "zamfirescu"
    ENRICHED_CHATTERJEA = "enriched-chatterjea"
    ENRICHED_CHATTERJEA_TYPE = "enriched-chatterjea-type"

    @classmethod
    def parse(cls, name: str | ConditionKind) -> ConditionKind:
        if isinstance(name, ConditionKind):
            return name
        key = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise InvalidInputError(f"unknown condition kind {name!r}")

    @property
    def enriched(self) -> bool:
        return self in (ConditionKind.ENRICHED_CHATTERJEA, ConditionKind.ENRICHED_CHATTERJEA_TYPE)

    @property
    def constant(self) -> str | None:
        """Name of the single free constant, None for Zamfirescu."""
        return _CONSTANT.get(self)

    @property
    def bound(self) -> float:
        """Exclusive upper bound of the free constant."""
        return _RANGES[self][self.constant][1]


_HALF = (0.0, 0.5)
_UNIT = (0.0, 1.0)
_RANGES: dict[ConditionKind, dict[str, tuple[float, float]]] = {
    ConditionKind.BANACH: {"c": _UNIT},
    ConditionKind.KANNAN: {"a": _HALF},
    ConditionKind.CHATTERJEA: {"b": _HALF},
    ConditionKind.CHATTERJEA_TYPE: {"h": _UNIT},
    ConditionKind.CIRIC_MAX5: {"h": _UNIT},
    # a: Banach clause, b: Kannan clause, c: Chatterjea clause; zero admitted
    ConditionKind.ZAMFIRESCU: {"a": _UNIT, "b": _HALF, "c": _HALF},
    ConditionKind.ENRICHED_CHATTERJEA: {"k": (0.0, math.inf), "b": _HALF},
    ConditionKind.ENRICHED_CHATTERJEA_TYPE: {"k": (0.0, math.inf), "h": _UNIT},
}
_CONSTANT = {
    ConditionKind.BANACH: "c",
    ConditionKind.KANNAN: "a",
    ConditionKind.CHATTERJEA: "b",
    ConditionKind.CHATTERJEA_TYPE: "h",
    ConditionKind.CIRIC_MAX5: "h",
    ConditionKind.ENRICHED_CHATTERJEA: "b",
    ConditionKind.ENRICHED_CHATTERJEA_TYPE: "h",
}


@dataclass(frozen=True)
class ConditionParams:
    kind: ConditionKind
    values: tuple[tuple[str, float], ...]

    def __post_init__(self):
        ranges = _RANGES[self.kind]
        given = dict(self.values)
        if set(given) != set(ranges):
            raise InvalidInputError(
                f"{self.kind.value} takes parameters {sorted(ranges)}, got {sorted(given)}"
            )
        for name, (lo, hi) in ranges.items():
            v = float(given[name])
            if not lo <= v < hi:
                raise InvalidInputError(f"{self.kind.value}: {name}={v} outside [{lo}, {hi})")
        object.__setattr__(self, "values", tuple((n, float(given[n])) for n in ranges))

    @classmethod
    def of(cls, kind: ConditionKind | str, **values: float) -> ConditionParams:
        return cls(ConditionKind.parse(kind), tuple(values.items()))

    def __getitem__(self, name: str) -> float:
        return dict(self.values)[name]

    def get(self, name: str, default=None):
        return dict(self.values).get(name, default)

    def as_dict(self) -> dict[str, float]:
        return dict(self.values)


@dataclass(frozen=True)
class DisplacementTuple:
    d_TxTy: float
    d_xy: float
    d_xTx: float
    d_yTy: float
    d_xTy: float
    d_yTx: float

    def astuple(self) -> tuple[float, ...]:
        return (self.d_TxTy, self.d_xy, self.d_xTx, self.d_yTy, self.d_xTy, self.d_yTx)


def displacements(T, x: Point, y: Point, norm: NormKind = NormKind.L2) -> DisplacementTuple:
    tx, ty = evaluate(T, x), evaluate(T, y)
    return DisplacementTuple(
        distance(tx, ty, norm), distance(x, y, norm), distance(x, tx, norm),
        distance(y, ty, norm), distance(x, ty, norm), distance(y, tx, norm),
    )


# ---------------------------------------------------------------- scalar path


def _lin(*terms: tuple[float, Point]) -> Point:
    dim = terms[0][1].dim
    return Point(sum(c * p[i] for c, p in terms) for i in range(dim))


def _enriched_terms(T, k: float, x: Point, y: Point, norm: NormKind) -> tuple[float, float, float]:
    tx, ty = evaluate(T, x), evaluate(T, y)
    lhs = norm_of(_lin((k, x), (-k, y), (1.0, tx), (-1.0, ty)), norm)
    u = norm_of(_lin((k + 1, x), (-(k + 1), y), (1.0, y), (-1.0, ty)), norm)
    v = norm_of(_lin((k + 1, y), (-(k + 1), x), (1.0, x), (-1.0, tx)), norm)
    return lhs, u, v


def lhs_rhs(kind: ConditionKind | str, params: ConditionParams, T, x: Point, y: Point,
            norm: NormKind = NormKind.L2) -> tuple[float, float]:
    """Both sides of the condition at one pair, constants included.

    For Zamfirescu the pair passes iff ``lhs`` is below at least one clause,
    so ``rhs`` is the largest of the three clause bounds.
    """
    kind = ConditionKind.parse(kind)
    if params.kind is not kind:
        raise InvalidInputError(f"parameters for {params.kind.value} given to {kind.value}")
    p = params.as_dict()
    if kind.enriched:
        lhs, u, v = _enriched_terms(T, p["k"], x, y, norm)
        den = u + v if kind is ConditionKind.ENRICHED_CHATTERJEA else max(u, v)
        return lhs, p[kind.constant] * den
    d = displacements(T, x, y, norm)
    if kind is ConditionKind.ZAMFIRESCU:
        return d.d_TxTy, max(p["a"] * d.d_xy, p["b"] * (d.d_xTx + d.d_yTy), p["c"] * (d.d_xTy + d.d_yTx))
    den = {
        ConditionKind.BANACH: d.d_xy,
        ConditionKind.KANNAN: d.d_xTx + d.d_yTy,
        ConditionKind.CHATTERJEA: d.d_xTy + d.d_yTx,
        ConditionKind.CHATTERJEA_TYPE: max(d.d_xTy, d.d_yTx),
        ConditionKind.CIRIC_MAX5: max(d.d_xy, d.d_xTx, d.d_yTy, d.d_xTy, d.d_yTx),
    }[kind]
    return d.d_TxTy, p[kind.constant] * den


# ---------------------------------------------------------------- pair sampling


@dataclass(frozen=True)
class PairSampler:
    """All grid pairs (corners first) followed by seeded uniform random pairs."""

    seed: int = 0
    n_random: int = 1000
    grid_per_axis: int = 51
    exclude_diagonal: bool = True

    def __post_init__(self):
        if self.n_random < 0:
            raise InvalidInputError("n_random must be >= 0")
        if self.grid_per_axis < 2:
            raise InvalidInputError("grid_per_axis must be >= 2 so that corners are sampled")

    def to_json(self) -> dict:
        return {"seed": self.seed, "grid": self.grid_per_axis, "random": self.n_random,
                "exclude_diagonal": self.exclude_diagonal}


@dataclass
class PairBatch:
    """Sample points and their images; pairs are index pairs plus random extras."""

    points: np.ndarray
    images: np.ndarray
    i: np.ndarray
    j: np.ndarray
    rx: np.ndarray
    ry: np.ndarray
    trx: np.ndarray
    try_: np.ndarray

    def __len__(self) -> int:
        return len(self.i) + len(self.rx)

    def chunks(self) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
        for s in range(0, len(self.i), _CHUNK):
            i, j = self.i[s:s + _CHUNK], self.j[s:s + _CHUNK]
            yield self.points[i], self.points[j], self.images[i], self.images[j]
        if len(self.rx):
            yield self.rx, self.ry, self.trx, self.try_

    def pair(self, idx: int) -> tuple[Point, Point]:
        n = len(self.i)
        if idx < n:
            return Point(self.points[self.i[idx]]), Point(self.points[self.j[idx]])
        return Point(self.rx[idx - n]), Point(self.ry[idx - n])


def _images(T, pts: np.ndarray) -> np.ndarray:
    out = np.empty_like(pts)
    for r, row in enumerate(pts):
        out[r] = T._apply(Point(row)).coords
    return out


def _lex_greater(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise ``A > B`` in lexicographic order."""
    out = np.zeros(len(A), dtype=bool)
    decided = np.zeros(len(A), dtype=bool)
    for col in range(A.shape[1] if A.ndim == 2 else 0):
        a, b = A[:, col], B[:, col]
        out |= ~decided & (a > b)
        decided |= a != b
    return out


def sample_pairs(T, sampler: PairSampler) -> PairBatch:
    """Evaluate ``T`` on the sampler's points; refuse maps that leave the domain."""
    domain = T.domain
    pts = np.array([p.coords for p in grid_points(domain, sampler.grid_per_axis)], dtype=float)
    i, j = np.triu_indices(len(pts), k=1 if sampler.exclude_diagonal else 0)
    # every condition is symmetric in (x, y): store each pair with x <= y lexicographically
    swap = _lex_greater(pts[i], pts[j])
    i, j = np.where(swap, j, i), np.where(swap, i, j)
    lo, hi = domain.lower.to_array(), domain.upper.to_array()
    draws = np.random.default_rng(sampler.seed).random((sampler.n_random, 2, domain.dim))
    rx, ry = lo + draws[:, 0] * (hi - lo), lo + draws[:, 1] * (hi - lo)
    if sampler.exclude_diagonal:
        keep = np.any(rx != ry, axis=1)
        rx, ry = rx[keep], ry[keep]
    swap = _lex_greater(rx, ry)[:, None]
    rx, ry = np.where(swap, ry, rx), np.where(swap, rx, ry)
    batch = PairBatch(pts, _images(T, pts), i, j, rx, ry, _images(T, rx), _images(T, ry))
    for src, img in ((batch.points, batch.images), (rx, batch.trx), (ry, batch.try_)):
        excess = np.maximum(np.maximum(lo - img, img - hi), 0.0).max(axis=1) if len(img) else np.zeros(0)
        if len(excess) and excess.max() > DOMAIN_TOL:
            r = int(excess.argmax())
            raise PreconditionError(
                f"mapping is not a self-map: T({list(src[r])}) = {list(img[r])} lies outside the domain"
            )
    return batch


# ---------------------------------------------------------------- vector kernels


def _sides(kind: ConditionKind, X, Y, TX, TY, norm: NormKind, k: float = 0.0):
    """Return ``(lhs, den)`` arrays; for Zamfirescu ``den`` is the 3-column clause matrix."""
    if kind.enriched:
        D = X - Y
        lhs = norms(k * D + TX - TY, norm)
        u = norms((k + 1) * D + Y - TY, norm)
        v = norms(-(k + 1) * D + X - TX, norm)
        return lhs, (u + v if kind is ConditionKind.ENRICHED_CHATTERJEA else np.maximum(u, v))
    lhs = norms(TX - TY, norm)
    d_xy = norms(X - Y, norm)
    d_xTx, d_yTy = norms(X - TX, norm), norms(Y - TY, norm)
    d_xTy, d_yTx = norms(X - TY, norm), norms(Y - TX, norm)
    if kind is ConditionKind.BANACH:
        return lhs, d_xy
    if kind is ConditionKind.KANNAN:
        return lhs, d_xTx + d_yTy
    if kind is ConditionKind.CHATTERJEA:
        return lhs, d_xTy + d_yTx
    if kind is ConditionKind.CHATTERJEA_TYPE:
        return lhs, np.maximum(d_xTy, d_yTx)
    if kind is ConditionKind.CIRIC_MAX5:
        return lhs, np.max(np.stack([d_xy, d_xTx, d_yTy, d_xTy, d_yTx]), axis=0)
    return lhs, np.stack([d_xy, d_xTx + d_yTy, d_xTy + d_yTx], axis=1)


def _all_sides(kind, batch: PairBatch, norm, k=0.0):
    parts = [_sides(kind, *c, norm, k) for c in batch.chunks()]
    if not parts:
        return np.zeros(0), np.zeros(0)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def ratios(lhs: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Pairwise ``lhs/den``; 0/0 pairs become -inf (skipped), x/0 becomes +inf."""
    zero = den < ZERO_TOL
    out = np.full(lhs.shape, -np.inf)
    ok = ~zero
    out[ok] = lhs[ok] / den[ok]
    out[zero & (lhs >= ZERO_TOL)] = np.inf
    return out


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Witness:
    x: Point
    y: Point
    lhs: float
    rhs: float

    def to_json(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "lhs": self.lhs, "rhs": self.rhs}


@dataclass(frozen=True)
class CertificateReport:
    kind: ConditionKind
    verdict: str  # feasible | infeasible | feasible-at
    params: ConditionParams | None
    min_constant_estimate: float | None
    witness: Witness | None
    n_pairs_checked: int
    margin: float
    sampler: PairSampler
    norm: NormKind
    details: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.verdict != "infeasible"

    @property
    def argmax_pair(self) -> tuple[Point, Point] | None:
        return None if self.witness is None else (self.witness.x, self.witness.y)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "verdict": self.verdict,
            "params": None if self.params is None else self.params.as_dict(),
            "min_constant": self.min_constant_estimate,
            "witness": None if self.witness is None else self.witness.to_json(),
            "pairs_checked": self.n_pairs_checked,
            "margin": self.margin,
            "norm": self.norm.value,
            "sampler": self.sampler.to_json(),
            "details": self.details,
        }


def _estimate(kind, batch, norm, k=0.0) -> tuple[float, int | None, np.ndarray, np.ndarray]:
    lhs, den = _all_sides(kind, batch, norm, k)
    r = ratios(lhs, den)
    if len(r) == 0 or np.all(r == -np.inf):
        return 0.0, None, lhs, den
    idx = int(np.argmax(r))
    return float(r[idx]), idx, lhs, den


def certify(kind: ConditionKind | str, T, sampler: PairSampler | None = None,
            norm: NormKind = NormKind.L2, params: ConditionParams | None = None,
            k: float | None = None, batch: PairBatch | None = None) -> CertificateReport:
    """Check ``params`` on sampled pairs, or estimate the minimal constant.

    Enriched kinds need ``k`` when ``params`` is omitted.  Raises
    :class:`PreconditionError` when a sampled image leaves the domain.
    """
    kind = ConditionKind.parse(kind)
    sampler = sampler or PairSampler()
    if batch is None:
        batch = sample_pairs(T, sampler)
    if params is not None:
        if params.kind is not kind:
            raise InvalidInputError(f"parameters for {params.kind.value} given to {kind.value}")
        return _check_params(kind, T, batch, sampler, norm, params)
    if kind is ConditionKind.ZAMFIRESCU:
        raise InvalidInputError("zamfirescu has three constants; pass params")
    if kind.enriched:
        if k is None:
            raise InvalidInputError(f"{kind.value} needs k to estimate its constant")
        lambda_k = float(k)
        ConditionParams.of(kind, k=lambda_k, **{kind.constant: 0.0})  # range check on k
    else:
        lambda_k = 0.0
    est, idx, lhs, den = _estimate(kind, batch, norm, lambda_k)
    feasible = est < kind.bound
    witness = None
    if idx is not None:
        x, y = batch.pair(idx)
        scale = est if feasible else kind.bound
        witness = Witness(x, y, float(lhs[idx]), float(scale * den[idx]))
    if feasible:
        values = {kind.constant: est}
        if kind.enriched:
            values["k"] = lambda_k
        found = ConditionParams.of(kind, **values)
    else:
        found = None
    return CertificateReport(
        kind, "feasible-at" if feasible else "infeasible", found, est, witness, len(batch),
        kind.bound - est, sampler, norm, {"k": lambda_k} if kind.enriched else {},
    )


def _check_params(kind, T, batch, sampler, norm, params) -> CertificateReport:
    p = params.as_dict()
    lhs, den = _all_sides(kind, batch, norm, p.get("k", 0.0))
    details: dict = {}
    if kind is ConditionKind.ZAMFIRESCU:
        clauses = den * np.array([p["a"], p["b"], p["c"]])
        rhs = clauses.max(axis=1) if len(lhs) else np.zeros(0)
        passing = lhs[:, None] <= clauses + FEASIBILITY_TOL
        details["clause_pairs"] = {f"z{n + 1}": int(passing[:, n].sum()) for n in range(3)}
        first = np.where(passing.any(axis=1), passing.argmax(axis=1) + 1, 0)
        details["first_clause_pairs"] = {f"z{n}": int((first == n).sum()) for n in range(1, 4)}
        estimate = None
    else:
        rhs = p[kind.constant] * den
        r = ratios(lhs, den)
        estimate = float(r.max()) if len(r) and np.any(r > -np.inf) else 0.0
    if len(lhs) == 0:
        return CertificateReport(kind, "feasible", params, estimate, None, 0, math.inf, sampler, norm, details)
    excess = lhs - rhs
    idx = int(np.argmax(excess))
    x, y = batch.pair(idx)
    feasible = excess[idx] <= FEASIBILITY_TOL
    return CertificateReport(
        kind, "feasible" if feasible else "infeasible", params, estimate,
        Witness(x, y, float(lhs[idx]), float(rhs[idx])), len(batch), float(-excess[idx]),
        sampler, norm, details,
    )


def zamfirescu_check(T, a: float, b: float, c: float, sampler: PairSampler | None = None,
                     norm: NormKind = NormKind.L2) -> CertificateReport:
    params = ConditionParams.of(ConditionKind.ZAMFIRESCU, a=a, b=b, c=c)
    return certify(ConditionKind.ZAMFIRESCU, T, sampler, norm, params)


# ---------------------------------------------------------------- k scan


@dataclass(frozen=True)
class ScanEntry:
    k: float
    estimate: float
    feasible: bool


@dataclass(frozen=True)
class FeasibilityCurve:
    kind: ConditionKind
    entries: tuple[ScanEntry, ...]
    best: tuple[float, float]
    refined: tuple[float, float] | None = None

    @property
    def best_feasible(self) -> bool:
        return self.best[1] < self.kind.bound

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "entries": [{"k": e.k, "min_constant": e.estimate, "feasible": e.feasible} for e in self.entries],
            "best": {"k": self.best[0], "min_constant": self.best[1], "feasible": self.best_feasible},
            "refined": None if self.refined is None else {"k": self.refined[0], "min_constant": self.refined[1]},
        }


def scan_k(kind: ConditionKind | str, T, k_grid: Sequence[float], sampler: PairSampler | None = None,
           norm: NormKind = NormKind.L2, refine: bool = True) -> FeasibilityCurve:
    """Estimate the minimal constant for each k and locate the best k."""
    kind = ConditionKind.parse(kind)
    if not kind.enriched:
        raise InvalidInputError("scan_k applies to the enriched kinds only")
    ks = sorted(float(k) for k in k_grid)
    if not ks:
        raise InvalidInputError("k_grid is empty")
    if ks[0] < 0 or not all(math.isfinite(k) for k in ks):
        raise InvalidInputError("k_grid values must be finite and >= 0")
    batch = sample_pairs(T, sampler or PairSampler())

    def objective(k: float) -> float:
        return _estimate(kind, batch, norm, k)[0]

    entries = tuple(ScanEntry(k, est, est < kind.bound) for k, est in ((k, objective(k)) for k in ks))
    # first minimum on ties keeps the result independent of refinement
    best_i = min(range(len(entries)), key=lambda n: entries[n].estimate)
    best = (entries[best_i].k, entries[best_i].estimate)
    refined = None
    if refine and len(ks) > 1 and math.isfinite(best[1]):
        lo, hi = ks[max(best_i - 1, 0)], ks[min(best_i + 1, len(ks) - 1)]
        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-4})
        refined = (float(res.x), float(res.fun))
    return FeasibilityCurve(kind, entries, best, refined)


# ---------------------------------------------------------------- identities


def enriched_reduction_residual(T, lam: float, x: Point, y: Point, norm: NormKind = NormKind.L2) -> float:
    """Largest mismatch in the rescaling that turns the enriched condition into
    a plain one for ``T_lam`` (``k = (1 - lam) / lam``). Zero in exact arithmetic."""
    if not 0.0 < lam < 1.0:
        raise InvalidInputError(f"lambda={lam} must lie in (0, 1)")
    k = (1.0 - lam) / lam
    lhs, u, v = _enriched_terms(T, k, x, y, norm)
    Tl = average(T, lam)
    tlx, tly = evaluate(Tl, x), evaluate(Tl, y)
    return max(
        abs(lam * lhs - distance(tlx, tly, norm)),
        abs(lam * u - distance(x, tly, norm)),
        abs(lam * v - distance(y, tlx, norm)),
    )


@dataclass(frozen=True)
class ImplicationResult:
    target: ConditionParams
    margin: float
    report: CertificateReport


def implication_margin(source: ConditionParams, target_kind: ConditionKind | str, T,
                       sampler: PairSampler | None = None, norm: NormKind = NormKind.L2) -> ImplicationResult:
    """Certify ``target_kind`` with the constant implied by ``source``.

    Supported: Banach(c < 1/3) -> Chatterjea(c/(1-c)), Kannan(a < 1/4) ->
    Chatterjea(a/(1-2a)), EnrichedChatterjea(k, b) -> EnrichedChatterjeaType(k, 2b).
    """
    target_kind = ConditionKind.parse(target_kind)
    s = source.as_dict()
    pair = (source.kind, target_kind)
    if pair == (ConditionKind.BANACH, ConditionKind.CHATTERJEA):
        if not s["c"] < 1 / 3:
            raise InvalidInputError("Banach -> Chatterjea needs c < 1/3")
        target = ConditionParams.of(target_kind, b=s["c"] / (1 - s["c"]))
    elif pair == (ConditionKind.KANNAN, ConditionKind.CHATTERJEA):
        if not s["a"] < 0.25:
            raise InvalidInputError("Kannan -> Chatterjea needs a < 1/4")
        target = ConditionParams.of(target_kind, b=s["a"] / (1 - 2 * s["a"]))
    elif pair == (ConditionKind.ENRICHED_CHATTERJEA, ConditionKind.ENRICHED_CHATTERJEA_TYPE):
        target = ConditionParams.of(target_kind, k=s["k"], h=2 * s["b"])
    else:
        raise InvalidInputError(f"no implication {source.kind.value} -> {target_kind.value}")
    sampler = sampler or PairSampler()
    batch = sample_pairs(T, sampler)
    src_report = certify(source.kind, T, sampler, norm, source, batch=batch)
    if not src_report.feasible:
        raise PreconditionError(
            f"mapping does not satisfy {source.kind.value} {s} on the sample "
            f"(witness {src_report.witness})"
        )
    report = certify(target_kind, T, sampler, norm, target, batch=batch)
    return ImplicationResult(target, report.margin, report)
