import warnings

import pytest

from bitbound import reference
from bitbound.circuit import const, eval_tuple, negate, restrict, truth_table
from bitbound.fixtures import LOOP, PARITY
from bitbound.terms import WitnessTerms
from bitbound.trace import run
from bitbound.witness import (WitnessClaim, achieved_exponent, alpha_check, alpha_from_mu,
                              beta_check, check, corrupt, corruption_point, iomu_check,
                              mu_check, mu_synthesize, pipeline)


@pytest.fixture(scope="module")
def parity_pipeline():
    fx = PARITY()
    return fx, pipeline(fx.code, fx.witness, 2)


def test_pipeline_parity_all_checks_pass(parity_pipeline):
    _, res = parity_pipeline
    assert res.ok, res.summary()
    assert set(res.checks) >= {"mu", "alpha", "beta", "mu_from_beta", "alpha_transfer",
                               "mu_transfer"}


@pytest.mark.parametrize("name", ["mu", "alpha", "beta", "mu_from_beta"])
def test_single_point_corruption_is_caught(parity_pipeline, name):
    _, res = parity_pipeline
    claim = res.claims[name]
    for seed in range(3):
        assert not check(corrupt(claim, corruption_point(claim, seed))).ok


@pytest.mark.parametrize("name,agree", [("mu", reference.mu_agrees),
                                        ("alpha", reference.alpha_agrees),
                                        ("beta", reference.beta_agrees)])
def test_checkers_agree_with_independent_simulation(parity_pipeline, name, agree):
    _, res = parity_pipeline
    claim = res.claims[name]
    bad = corrupt(claim, corruption_point(claim, 1))
    assert agree(claim) == check(claim).ok is True
    assert agree(bad) == check(bad).ok is False


def test_alpha_rejects_where_the_machine_rejects(parity_pipeline):
    fx, res = parity_pipeline
    alpha = res.claims["alpha"]
    for x in range(4):
        assert eval_tuple(alpha.circuit, (x,)) == bin(x).count("1") % 2


def test_negated_alpha_fails_everywhere(parity_pipeline):
    _, res = parity_pipeline
    alpha = res.claims["alpha"]
    neg = alpha.with_circuit(negate(alpha.circuit))
    assert not alpha_check(neg).ok
    for x in range(4):
        assert eval_tuple(neg.circuit, (x,)) != eval_tuple(alpha.circuit, (x,))


def test_alpha_counterexample_names_the_flipped_input(parity_pipeline):
    _, res = parity_pipeline
    alpha = res.claims["alpha"]
    result = alpha_check(corrupt(alpha, (2,)))
    assert result.counterexample["x"] == 2


def test_empty_circuit_is_not_a_computation():
    fx = PARITY()
    mu = mu_synthesize(fx.code, fx.witness, 2)
    empty = mu.with_circuit(const(0, mu.circuit.layout))
    result = mu_check(empty)
    assert not result.ok
    assert result.counterexample["x"] == 0
    assert result.counterexample["conjunct"] == "start"


def test_beta_reports_the_first_wrong_step(parity_pipeline):
    fx, res = parity_pipeline
    beta = res.claims["beta"]
    x, t = 3, 2
    Y = run(fx.code, (x,), t, *beta.bounds(x)[1:])
    v = sorted(Y.set.slice(t))[0]
    from bitbound.encoding import pair
    point = (x, t, pair(t, v))
    result = beta_check(corrupt(beta, point))
    assert not result.ok
    assert (result.counterexample["x"], result.counterexample["t"],
            result.counterexample["v"]) == point


def test_beta_at_time_zero_is_the_start_configuration(parity_pipeline):
    fx, res = parity_pipeline
    beta = res.claims["beta"]
    for x in range(4):
        _, s, q = beta.bounds(x)
        Y = run(fx.code, (x,), 0, s, q)
        got = truth_table(restrict(beta.circuit, [x, 0]), limit=None)
        assert got.below(Y.bd) == Y.set.below(Y.bd)


def test_size_violation_is_separate_from_semantics():
    fx = PARITY()
    mu = mu_synthesize(fx.code, fx.witness, 2)
    tight = WitnessClaim("mu", mu.M, mu.terms, 2, mu.circuit, c=1)
    result = mu_check(tight)
    assert not result.ok and not result.size_ok and result.semantic_ok


def test_achieved_exponent():
    assert achieved_exponent(1, 2) == 1
    assert achieved_exponent((1 << 9) - 1, 3) == 2
    assert achieved_exponent(1 << 9, 3) == 3


def test_loop_tableau_matches_the_run_bit_for_bit():
    fx = LOOP(4)
    mu = mu_synthesize(fx.code, fx.witness, 2)
    for x in range(4):
        t, s, q = mu.bounds(x)
        Y = run(fx.code, (x,), t, s, q)
        got = truth_table(restrict(mu.circuit, [x]), limit=None)
        assert got.below(Y.bd) == Y.set.below(Y.bd)
    assert mu_check(mu).ok


def test_parity_mu_at_length_three():
    fx = PARITY()
    assert mu_check(mu_synthesize(fx.code, fx.witness, 3)).ok


def test_synthesized_size_grows_with_time():
    fx = PARITY()
    sizes = [mu_synthesize(fx.code, WitnessTerms.exp(str(t)), 2).circuit.size for t in (4, 8, 16)]
    assert sizes[0] < sizes[1] < sizes[2]


def test_iomu_over_several_lengths():
    fx = PARITY()
    claims = [mu_synthesize(fx.code, fx.witness, n) for n in (2, 3, 4)]
    assert iomu_check(claims).ok
    broken = claims[:1] + [claims[1].with_circuit(const(0, claims[1].circuit.layout))] + claims[2:]
    result = iomu_check(broken)
    assert not result.ok and result.counterexample["n"] == 3


def test_iomu_with_no_lengths_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = iomu_check([])
    assert result.ok and result.warnings
    assert caught


def test_alpha_from_mu_on_loop():
    fx = LOOP(2)
    mu = mu_synthesize(fx.code, fx.witness, 2)
    assert alpha_check(alpha_from_mu(mu)).ok
