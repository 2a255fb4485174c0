"""Krasnoselskij iteration ``x_{n+1} = (1 - lam) x_n + lam T x_n`` and its error budget."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .conditions import CertificateReport, ConditionKind
from .errors import ConvergenceError, DomainError, InvalidInputError, PreconditionError
from .mapping import DOMAIN_TOL, average, check_self_map, known_fixed_point, lambda_from_k, self_map_ok
from .space import NormKind, Point, contains, distance

A_POSTERIORI = "a_posteriori"
STEP_NORM = "step_norm"
MAX_ITER_ONLY = "max_iter_only"
STOP_RULES = (A_POSTERIORI, STEP_NORM, MAX_ITER_ONLY)

DIVERGENCE_WINDOW = 50
BOUND_ATOL = 1e-12
BOUND_RTOL = 1e-12


def delta_from_b(b: float) -> float:
    if not 0.0 <= b < 0.5:
        raise InvalidInputError(f"b={b} outside [0, 1/2)")
    return b / (1.0 - b)


@dataclass(frozen=True)
class IterationConfig:
    lam: float
    x0: Point
    max_iter: int = 10_000
    epsilon: float = 1e-10
    stop_rule: str = A_POSTERIORI
    delta: float | None = None

    def __post_init__(self):
        if not isinstance(self.x0, Point):
            object.__setattr__(self, "x0", Point(self.x0))
        if not 0.0 < self.lam <= 1.0:
            raise InvalidInputError(f"lambda={self.lam} outside (0, 1]")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be >= 1")
        if not self.epsilon > 0:
            raise InvalidInputError("epsilon must be > 0")
        if self.stop_rule not in STOP_RULES:
            raise InvalidInputError(f"unknown stop rule {self.stop_rule!r}; expected one of {STOP_RULES}")
        if self.stop_rule == A_POSTERIORI and (self.delta is None or not 0.0 <= self.delta < 1.0):
            raise InvalidInputError("the a posteriori rule needs delta in [0, 1)")


@dataclass(frozen=True)
class IterationTrace:
    """Orbit ``x_0 .. x_N``; ``step_norms[n - 1]`` is ``||x_n - x_{n-1}||``."""

    points: tuple[Point, ...]
    step_norms: tuple[float, ...]
    converged: bool
    lam: float
    norm: NormKind = NormKind.L2
    diagnostic: str = ""

    @property
    def final(self) -> Point:
        return self.points[-1]

    @property
    def iterations_used(self) -> int:
        return len(self.points) - 1

    def step(self, n: int) -> float:
        """``Delta_n`` for ``n >= 1``."""
        return self.step_norms[n - 1]


def _stop_bound(cfg: IterationConfig, step: float) -> float | None:
    if cfg.stop_rule == A_POSTERIORI:
        return cfg.delta / (1.0 - cfg.delta) * step
    if cfg.stop_rule == STEP_NORM:
        return step
    return None


def krasnoselskij(T, cfg: IterationConfig, norm: NormKind = NormKind.L2,
                  check_domain: bool = True) -> IterationTrace:
    """Iterate ``T_lam`` from ``cfg.x0`` until the stop rule fires or ``max_iter``.

    An orbit whose step fails to shrink over ``DIVERGENCE_WINDOW`` steps is cut
    short with ``converged=False`` and a diagnostic (stop rules other than
    ``max_iter_only``).
    """
    if check_domain:
        verdict = self_map_ok(T)
        if not verdict.ok:
            raise PreconditionError(
                f"mapping fails the self-map check at {verdict.worst_point} ({verdict.reason})"
            )
    Tl = average(T, cfg.lam)
    domain = T.domain
    x = cfg.x0
    if not contains(domain, x, DOMAIN_TOL):
        raise DomainError(f"x0={x} is outside the domain", index=0)
    points = [x]
    steps: list[float] = []
    converged = False
    diagnostic = ""
    for n in range(1, cfg.max_iter + 1):
        nxt = Tl._apply(x)
        if not contains(domain, nxt, DOMAIN_TOL):
            raise DomainError(f"iterate {n} = {nxt} escaped the domain", index=n)
        step = distance(nxt, x, norm)
        points.append(nxt)
        steps.append(step)
        x = nxt
        bound = _stop_bound(cfg, step)
        if bound is not None:
            if bound <= cfg.epsilon:
                converged = True
                break
            if n > DIVERGENCE_WINDOW and step >= steps[n - 1 - DIVERGENCE_WINDOW]:
                diagnostic = (
                    f"step norm did not decrease over {DIVERGENCE_WINDOW} iterations "
                    f"(Delta_{n - DIVERGENCE_WINDOW}={steps[n - 1 - DIVERGENCE_WINDOW]:.6g}, Delta_{n}={step:.6g})"
                )
                break
    else:
        if cfg.stop_rule == MAX_ITER_ONLY:
            converged = steps[-1] <= cfg.epsilon
        else:
            diagnostic = f"max_iter={cfg.max_iter} reached before the stop rule fired"
    return IterationTrace(tuple(points), tuple(steps), converged, cfg.lam, norm, diagnostic)


def picard(T, x0: Point, n_iter: int) -> list[Point]:
    """Plain ``x_{n+1} = T x_n``; reference loop for the lambda = 1 case."""
    pts = [x0]
    for _ in range(n_iter):
        pts.append(T._apply(pts[-1]))
    return pts


@dataclass
class ErrorBudget:
    delta: float
    a_priori: list[float] = field(default_factory=list)
    a_posteriori: list[float] = field(default_factory=list)
    unified: list[tuple[int, int, float]] = field(default_factory=list)
    ratio_violations: list[int] = field(default_factory=list)
    a_priori_violations: list[int] = field(default_factory=list)
    a_posteriori_violations: list[int] = field(default_factory=list)
    unified_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def n_violations(self) -> int:
        return (len(self.ratio_violations) + len(self.a_priori_violations)
                + len(self.a_posteriori_violations) + len(self.unified_violations))

    @property
    def ok(self) -> bool:
        return self.n_violations == 0

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "a_priori": self.a_priori,
            "a_posteriori": self.a_posteriori,
            "unified": [{"i": i, "n": n, "bound": b} for i, n, b in self.unified],
            "ratio_violations": self.ratio_violations,
            "a_priori_violations": self.a_priori_violations,
            "a_posteriori_violations": self.a_posteriori_violations,
            "unified_violations": [list(v) for v in self.unified_violations],
            "n_violations": self.n_violations,
        }


def verify_error_budget(trace: IterationTrace, b: float, p: Point, i_max: int = 5,
                        n_max: int | None = None, atol: float = BOUND_ATOL,
                        rtol: float = BOUND_RTOL) -> ErrorBudget:
    """Check step contraction and the a priori / a posteriori / unified bounds.

    Bounds are indexed from ``n = 1`` since ``Delta_0`` does not exist. The
    unified bound is ``||x_{n+i-1} - p|| <= delta^i / (1 - delta) * Delta_n``.
    """
    if not trace.points:
        raise InvalidInputError("empty trace")
    delta = delta_from_b(b)
    norm = trace.norm
    N = trace.iterations_used if n_max is None else min(n_max, trace.iterations_used)
    err = [distance(q, p, norm) for q in trace.points]
    budget = ErrorBudget(delta)
    if N == 0:
        return budget

    def over(actual: float, bound: float) -> bool:
        return actual > bound + atol + rtol * abs(bound)

    first = trace.step(1)
    scale = 1.0 / (1.0 - delta)
    for n in range(1, N + 1):
        step = trace.step(n)
        if n < trace.iterations_used and over(trace.step(n + 1), delta * step):
            budget.ratio_violations.append(n)
        prior = delta ** n * scale * first
        post = delta * scale * step
        budget.a_priori.append(prior)
        budget.a_posteriori.append(post)
        if over(err[n], prior):
            budget.a_priori_violations.append(n)
        if over(err[n], post):
            budget.a_posteriori_violations.append(n)
        for i in range(1, i_max + 1):
            m = n + i - 1
            if m > trace.iterations_used:
                break
            bound = delta ** i * scale * step
            budget.unified.append((i, n, bound))
            if over(err[m], bound):
                budget.unified_violations.append((i, n))
    return budget


# ---------------------------------------------------------------- solve


@dataclass(frozen=True)
class SolveResult:
    p: Point
    trace: IterationTrace
    budget: ErrorBudget | None
    k: float
    constant: float
    reference: Point | None = None


def _cert_constants(cert: CertificateReport) -> tuple[float, float]:
    if cert.kind not in (ConditionKind.ENRICHED_CHATTERJEA, ConditionKind.ENRICHED_CHATTERJEA_TYPE):
        raise InvalidInputError(f"solve needs an enriched certificate, got {cert.kind.value}")
    if not cert.feasible or cert.params is None:
        raise PreconditionError(f"certificate verdict is {cert.verdict}; nothing to solve with")
    return cert.params["k"], cert.params[cert.kind.constant]


def solve(T, cert: CertificateReport, x0: Point, epsilon: float = 1e-10, max_iter: int = 10_000,
          norm: NormKind | None = None, lam: float | None = None, p_ref: Point | None = None) -> SolveResult:
    """Approximate the fixed point with ``lam = 1/(k+1)`` from a feasible certificate.

    Chatterjea certificates stop on the a posteriori bound and come back with an
    error budget checked against ``p_ref`` (the known fixed point for catalog
    maps, else a run at ``epsilon/10``). Type certificates stop on the step
    norm and carry no budget. ``lam`` overrides the derived weight.
    """
    k, constant = _cert_constants(cert)
    norm = norm or cert.norm
    verdict = check_self_map(T)
    if not verdict.ok:
        raise PreconditionError(f"mapping fails the self-map check at {verdict.worst_point} ({verdict.reason})")
    lam = lambda_from_k(k) if lam is None else lam
    x0 = x0 if isinstance(x0, Point) else Point(x0)
    chatterjea = cert.kind is ConditionKind.ENRICHED_CHATTERJEA
    if chatterjea:
        delta = delta_from_b(constant)
        cfg = IterationConfig(lam, x0, max_iter, epsilon, A_POSTERIORI, delta)
    else:
        cfg = IterationConfig(lam, x0, max_iter, epsilon, STEP_NORM)
    trace = krasnoselskij(T, cfg, norm, check_domain=False)
    if not trace.converged:
        raise ConvergenceError(trace.diagnostic or "iteration did not converge", trace)
    budget = None
    reference = None
    if chatterjea:
        reference = p_ref or known_fixed_point(T)
        atol = BOUND_ATOL
        if reference is None:
            ref_cfg = IterationConfig(lam, x0, max_iter * 10, epsilon / 10, A_POSTERIORI, cfg.delta)
            ref_trace = krasnoselskij(T, ref_cfg, norm, check_domain=False)
            reference = ref_trace.final
            atol = 10 * epsilon
        budget = verify_error_budget(trace, constant, reference, atol=atol)
    return SolveResult(trace.final, trace, budget, k, constant, reference)


@dataclass(frozen=True)
class UniquenessVerdict:
    unique: bool
    limit: Point | None
    divergent_pair: tuple[Point, Point] | None = None
    spread: float = 0.0


def uniqueness_probe(limits: Sequence[Point], tol: float, norm: NormKind = NormKind.L2) -> UniquenessVerdict:
    """All limits within ``tol`` of each other, or the farthest-apart pair."""
    if len(limits) < 2:
        raise InvalidInputError("need at least two limits to compare")
    worst = (0.0, None)
    for a in range(len(limits)):
        for b in range(a + 1, len(limits)):
            d = distance(limits[a], limits[b], norm)
            if d > worst[0]:
                worst = (d, (limits[a], limits[b]))
    if worst[0] <= tol:
        return UniquenessVerdict(True, limits[0], None, worst[0])
    return UniquenessVerdict(False, None, worst[1], worst[0])


def multi_start(T, cert: CertificateReport, starts: Sequence[Point], epsilon: float = 1e-10,
                **kw) -> tuple[list[SolveResult], UniquenessVerdict]:
    results = [solve(T, cert, s, epsilon, **kw) for s in starts]
    return results, uniqueness_probe([r.p for r in results], 10 * epsilon, cert.norm)
