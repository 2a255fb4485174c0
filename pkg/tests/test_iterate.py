import pytest
from hypothesis import given, settings, strategies as st

from fixpoint.conditions import ConditionParams, PairSampler, certify
from fixpoint.errors import ConvergenceError, DomainError, InvalidInputError, PreconditionError
from fixpoint.iterate import (
    A_POSTERIORI, MAX_ITER_ONLY, STEP_NORM, IterationConfig, delta_from_b, krasnoselskij, multi_start, picard,
    solve, uniqueness_probe, verify_error_budget,
)
from fixpoint.mapping import Affine, Builtin, Expression, evaluate
from fixpoint.space import BoxDomain, Point, distance

FLIP = Builtin("flip")
STEP = Builtin("step_half")
IDENTITY = Affine([[1.0]], Point([0.0]), BoxDomain.interval())


@pytest.mark.parametrize("b, delta", [(0, 0), (0.25, 1 / 3), (1 / 3, 0.5)])
def test_delta_from_b(b, delta):
    assert delta_from_b(b) == pytest.approx(delta, abs=1e-15)


@pytest.mark.parametrize("b", [-0.1, 0.5, 0.7])
def test_delta_from_b_range(b):
    with pytest.raises(InvalidInputError):
        delta_from_b(b)


def test_config_validation():
    with pytest.raises(InvalidInputError):
        IterationConfig(0.0, Point([0]))
    with pytest.raises(InvalidInputError):
        IterationConfig(0.5, Point([0]), stop_rule=A_POSTERIORI)
    with pytest.raises(InvalidInputError):
        IterationConfig(0.5, Point([0]), epsilon=0, stop_rule=STEP_NORM)
    with pytest.raises(InvalidInputError):
        IterationConfig(0.5, Point([0]), max_iter=0, stop_rule=STEP_NORM)


def test_picard_on_flip_oscillates():
    tr = krasnoselskij(FLIP, IterationConfig(1.0, Point([0]), 100, stop_rule=MAX_ITER_ONLY))
    assert [p[0] for p in tr.points[:5]] == [0, 1, 0, 1, 0]
    assert set(tr.step_norms) == {1.0}
    assert not tr.converged and tr.iterations_used == 100


def test_picard_on_flip_is_cut_short_under_a_stop_rule():
    tr = krasnoselskij(FLIP, IterationConfig(1.0, Point([0]), 10_000, stop_rule=STEP_NORM))
    assert not tr.converged and tr.iterations_used == 51
    assert "did not decrease" in tr.diagnostic


def test_averaged_flip_closed_form():
    tr = krasnoselskij(FLIP, IterationConfig(0.6, Point([0]), epsilon=1e-10, delta=1 / 3))
    assert tr.converged
    for n, p in enumerate(tr.points[:21]):
        assert abs(abs(p[0] - 0.5) - 0.5 * 0.2 ** n) <= 1e-12


def test_half_weight_fixes_flip_in_one_step():
    tr = krasnoselskij(FLIP, IterationConfig(0.5, Point([0]), stop_rule=STEP_NORM))
    assert tr.points[1] == Point([0.5])
    assert tr.step(2) == 0.0


def test_step_map_picard():
    tr = krasnoselskij(STEP, IterationConfig(1.0, Point([0.8]), stop_rule=STEP_NORM))
    assert [p[0] for p in tr.points] == [0.8, 0.0, 0.0]
    assert tr.converged


def test_escape_is_reported_with_index():
    with pytest.raises(DomainError) as exc:
        krasnoselskij(Expression("0.5 * x"), IterationConfig(0.5, Point([2.0]), stop_rule=STEP_NORM))
    assert exc.value.index == 0
    with pytest.raises(PreconditionError):
        krasnoselskij(Expression("x + 1"), IterationConfig(0.5, Point([0.0]), stop_rule=STEP_NORM))


def test_max_iter_only_marks_convergence_from_last_step():
    tr = krasnoselskij(FLIP, IterationConfig(0.6, Point([0]), 60, epsilon=1e-10, stop_rule=MAX_ITER_ONLY))
    assert tr.iterations_used == 60 and tr.converged


# ---- error budget

def test_budget_on_averaged_flip():
    tr = krasnoselskij(FLIP, IterationConfig(0.6, Point([0]), 60, stop_rule=MAX_ITER_ONLY))
    budget = verify_error_budget(tr, 0.25, Point([0.5]), n_max=50)
    assert budget.ok
    assert budget.delta == pytest.approx(1 / 3)


def test_budget_on_one_step_trace():
    tr = krasnoselskij(FLIP, IterationConfig(0.5, Point([0.5]), 1, stop_rule=MAX_ITER_ONLY))
    assert verify_error_budget(tr, 0.3, Point([0.5])).ok


def test_budget_flags_picard_on_flip():
    tr = krasnoselskij(FLIP, IterationConfig(1.0, Point([0]), 20, stop_rule=MAX_ITER_ONLY))
    budget = verify_error_budget(tr, 0.25, Point([0.5]))
    assert budget.ratio_violations
    assert budget.to_json()["n_violations"] == budget.n_violations > 0


def test_unified_bound_specialises():
    tr = krasnoselskij(FLIP, IterationConfig(0.6, Point([0]), 30, stop_rule=MAX_ITER_ONLY))
    budget = verify_error_budget(tr, 0.25, Point([0.5]))
    unified = {(i, n): b for i, n, b in budget.unified}
    for n in range(1, 30):
        assert unified[(1, n)] == pytest.approx(budget.a_posteriori[n - 1], rel=1e-15)
    # the n = 1 chain reproduces the a priori bound
    for i in range(1, 6):
        assert unified[(i, 1)] == pytest.approx(budget.a_priori[i - 1], rel=1e-15)


# ---- solve

def flip_cert(k, b):
    return certify("enriched-chatterjea", FLIP, params=ConditionParams.of("enriched-chatterjea", k=k, b=b))


def test_solve_flip():
    sol = solve(FLIP, flip_cert(2 / 3, 0.25), Point([0]), 1e-10)
    assert abs(sol.p[0] - 0.5) <= 1e-10
    assert sol.trace.iterations_used <= 30
    assert sol.budget is not None and sol.budget.ok


def test_solve_step_map_type_certificate():
    cert = certify("enriched-chatterjea-type", STEP,
                   params=ConditionParams.of("enriched-chatterjea-type", k=0, h=0.5))
    sol = solve(STEP, cert, Point([1.0]), 1e-12)
    assert sol.p == Point([0.0])
    assert sol.trace.points[2] == Point([0.0])
    assert sol.budget is None


def test_solve_with_k_one():
    sol = solve(FLIP, flip_cert(1, 0), Point([0.13]))
    assert sol.trace.iterations_used == 1 and sol.p == Point([0.5])


def test_solve_refuses_infeasible_and_non_enriched():
    with pytest.raises(PreconditionError):
        solve(FLIP, flip_cert(0.2, 0.1), Point([0]))
    with pytest.raises(InvalidInputError):
        solve(FLIP, certify("chatterjea", FLIP), Point([0]))


def test_solve_raises_with_trace_on_divergence():
    with pytest.raises(ConvergenceError) as exc:
        solve(FLIP, flip_cert(2 / 3, 0.25), Point([0]), lam=1.0)
    assert exc.value.trace.iterations_used > 0


def test_solve_reference_run_for_unknown_maps():
    T = Expression("0.5 - 0.5 * x")
    cert = certify("enriched-chatterjea", T, k=1.0, sampler=PairSampler(n_random=200))
    assert cert.feasible
    sol = solve(T, cert, Point([0.0]), 1e-10)
    assert sol.budget.ok
    assert abs(sol.p[0] - 1 / 3) <= 1e-9


# ---- uniqueness

def test_uniqueness_flip():
    _, verdict = multi_start(FLIP, flip_cert(2 / 3, 0.25), [Point([0]), Point([1]), Point([0.3])])
    assert verdict.unique and abs(verdict.limit[0] - 0.5) <= 1e-9


def test_uniqueness_step_map():
    cert = certify("enriched-chatterjea-type", STEP,
                   params=ConditionParams.of("enriched-chatterjea-type", k=0, h=0.5))
    _, verdict = multi_start(STEP, cert, [Point([0]), Point([0.99]), Point([1])])
    assert verdict.unique and verdict.limit == Point([0.0])


def test_identity_negative_control():
    starts = [Point([0]), Point([0.4]), Point([1])]
    limits = [krasnoselskij(IDENTITY, IterationConfig(0.5, s, stop_rule=STEP_NORM)).final for s in starts]
    verdict = uniqueness_probe(limits, 1e-9)
    assert not verdict.unique
    assert verdict.divergent_pair == (Point([0]), Point([1]))
    assert not certify("enriched-chatterjea", IDENTITY, k=1.0).feasible


def test_uniqueness_needs_two_limits():
    with pytest.raises(InvalidInputError):
        uniqueness_probe([Point([0])], 1e-9)


# ---- properties

@given(st.floats(0, 1), st.integers(1, 40), st.sampled_from([FLIP, STEP, Builtin("affine(0.3)")]))
@settings(max_examples=50)
def test_lambda_one_equals_picard(x0, n, T):
    tr = krasnoselskij(T, IterationConfig(1.0, Point([x0]), n, stop_rule=MAX_ITER_ONLY))
    assert list(tr.points) == picard(T, Point([x0]), n)


@given(st.floats(0, 1), st.floats(0.05, 1))
@settings(max_examples=50)
def test_trace_is_recomputable(x0, lam):
    cfg = IterationConfig(lam, Point([x0]), 200, stop_rule=STEP_NORM)
    a, b = krasnoselskij(FLIP, cfg), krasnoselskij(FLIP, cfg)
    assert a == b
    assert len(a.points) == a.iterations_used + 1
    for n in range(1, len(a.points)):
        assert a.step(n) == distance(a.points[n], a.points[n - 1])


@pytest.mark.parametrize("T, k, b", [
    (FLIP, 2 / 3, 0.25),
    (FLIP, 1.0, 0.0),
    (FLIP, 0.8, 0.2),
    (Builtin("affine(0.3)"), 0.0, 0.3),
    (Builtin("affine(0.25)"), 1.0, 0.39),
])
def test_step_contraction_along_grid_starts(T, k, b):
    cert = certify("enriched-chatterjea", T, params=ConditionParams.of("enriched-chatterjea", k=k, b=b))
    assert cert.feasible
    delta = delta_from_b(b)
    for x0 in [i / 10 for i in range(11)]:
        tr = krasnoselskij(T, IterationConfig(1 / (k + 1), Point([x0]), 100, stop_rule=MAX_ITER_ONLY))
        for n in range(1, tr.iterations_used):
            assert tr.step(n + 1) <= delta * tr.step(n) + 1e-12


@pytest.mark.parametrize("x0", [0.0, 0.27, 1.0])
@pytest.mark.parametrize("eps", [1e-6, 1e-10])
def test_fixed_point_residual(x0, eps):
    sol = solve(FLIP, flip_cert(2 / 3, 0.25), Point([x0]), eps)
    delta = delta_from_b(0.25)
    assert distance(sol.p, evaluate(FLIP, sol.p)) <= eps * (1 + 1 / (1 - delta))
