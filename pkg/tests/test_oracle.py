import math
from fractions import Fraction

import pytest

from shufflesum.oracle import (
    CollisionMode,
    Estimate,
    Lemma1Bound,
    SecurityReport,
    collision_probability,
    exact_avg_case_tv,
    exact_collision_probability,
    exact_output_distribution,
    exact_tv,
    hoeffding_halfwidth,
    lemma1_bound,
    theorem_bound,
    verify_chain,
)
from shufflesum.randgraph import EnumerationBudgetError, exact_m_power_C

# instances small enough to enumerate completely; these values are pinned
# from the exhaustive-enumeration oracle itself and act as regressions
SMALL_INSTANCES = [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (2, 1, 2), (2, 1, 3), (1, 2, 2)]

FROZEN_COLLISION = {
    (2, 2, 2): Fraction(5, 32),
    (2, 2, 3): Fraction(1, 18),
    (3, 2, 2): Fraction(1, 24),
    (2, 3, 2): Fraction(9, 256),
    (2, 1, 2): Fraction(3, 4),
    (2, 1, 3): Fraction(2, 3),
    (1, 2, 2): Fraction(1, 2),
}

FROZEN_AVG_TV = {
    (2, 2, 2): Fraction(1, 8),
    (2, 2, 3): Fraction(8, 27),
    (3, 2, 2): Fraction(3, 16),
    (2, 3, 2): Fraction(1, 16),
    (2, 1, 2): Fraction(1, 4),
    (2, 1, 3): Fraction(4, 9),
    (1, 2, 2): Fraction(0),
}


class TestExactOutputDistribution:
    def test_single_user_two_shares(self):
        dist = exact_output_distribution((1,), 2, 2)
        assert dist.mass == {(0, 1): 1, (1, 0): 1}
        assert dist.denominator == 2
        assert dist.probability((0, 1)) == Fraction(1, 2)

    def test_two_users_one_share(self):
        dist = exact_output_distribution((0, 1), 1, 2)
        assert dist.mass == {(0, 1): 1, (1, 0): 1}

    @pytest.mark.parametrize("n,k,m", SMALL_INSTANCES)
    def test_total_mass_and_support(self, n, k, m):
        inputs = tuple(i % m for i in range(n))
        dist = exact_output_distribution(inputs, k, m)
        assert dist.total() == 1
        target = sum(inputs) % m
        for outcome in dist.mass:
            assert len(outcome) == k * n
            assert all(0 <= v < m for v in outcome)
            assert sum(outcome) % m == target

    def test_budget_guard(self):
        with pytest.raises(EnumerationBudgetError):
            exact_output_distribution(tuple(range(9)) , 3, 4)
        with pytest.raises(EnumerationBudgetError):
            exact_output_distribution((0,) * 1000, 2, 2**32)


class TestExactTv:
    def test_identical_inputs(self):
        assert exact_tv((0, 1), (0, 1), 2, 2) == 0

    def test_permuted_inputs_one_share(self):
        assert exact_tv((0, 1), (1, 0), 1, 2) == 0

    def test_symmetric(self):
        a, b = (0, 1, 1), (1, 1, 0)
        assert exact_tv(a, b, 2, 2) == exact_tv(b, a, 2, 2)

    def test_rejects_unequal_sums(self):
        with pytest.raises(ValueError):
            exact_tv((0, 0), (0, 1), 2, 2)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            exact_tv((0,), (0, 0), 2, 2)

    def test_range_and_triangle(self):
        # equal-sum triple over Z_3
        a, b, c = (0, 2), (1, 1), (2, 0)
        ab = exact_tv(a, b, 2, 3)
        bc = exact_tv(b, c, 2, 3)
        ac = exact_tv(a, c, 2, 3)
        for t in (ab, bc, ac):
            assert 0 <= t <= 1
        assert ac <= ab + bc


class TestExactAvgTv:
    @pytest.mark.parametrize("n,k,m", SMALL_INSTANCES)
    def test_frozen_values(self, n, k, m):
        assert exact_avg_case_tv(n, k, m) == FROZEN_AVG_TV[(n, k, m)]

    @pytest.mark.parametrize("k,m", [(1, 2), (2, 3), (3, 5)])
    def test_single_user_is_zero(self, k, m):
        # equal sums force identical inputs when n=1
        assert exact_avg_case_tv(1, k, m) == 0

    def test_budget_guard(self):
        with pytest.raises(EnumerationBudgetError):
            exact_avg_case_tv(9, 3, 4)


class TestExactCollision:
    @pytest.mark.parametrize("n,k,m", SMALL_INSTANCES)
    def test_frozen_values_both_modes(self, n, k, m):
        pv = exact_collision_probability(n, k, m, CollisionMode.V_VS_V)
        pe = exact_collision_probability(n, k, m, CollisionMode.E_EVENT)
        assert pv == FROZEN_COLLISION[(n, k, m)]
        assert pv == pe  # single-shuffling identity, exact in the rationals

    @pytest.mark.parametrize("n,k,m", SMALL_INSTANCES)
    def test_graph_route_dominates(self, n, k, m):
        pv = exact_collision_probability(n, k, m, CollisionMode.V_VS_V)
        assert pv <= Fraction(exact_m_power_C(n, k, m), m ** (k * n))

    def test_budget_guard(self):
        with pytest.raises(EnumerationBudgetError):
            exact_collision_probability(19, 3, 2, CollisionMode.V_VS_V)


class TestMonteCarloCollision:
    @pytest.mark.parametrize("k", [2, 3])
    @pytest.mark.parametrize("m", [2, 5])
    def test_single_user_matches_closed_form(self, k, m):
        est = collision_probability(1, k, m, 20_000, seed=31, mode=CollisionMode.V_VS_V)
        assert abs(est.value - m ** (1 - k)) <= est.ci_halfwidth

    def test_both_modes_match_enumeration(self):
        exact = float(FROZEN_COLLISION[(2, 1, 2)])
        for mode in CollisionMode:
            est = collision_probability(2, 1, 2, 50_000, seed=32, mode=mode)
            assert abs(est.value - exact) <= est.ci_halfwidth

    def test_degenerate_group(self):
        est = collision_probability(3, 2, 1, 1000, seed=33, mode=CollisionMode.V_VS_V)
        assert est.value == 1.0 and est.ci_halfwidth == 0.0

    def test_deterministic(self):
        kwargs = dict(samples=5000, seed=34, mode=CollisionMode.E_EVENT, shards=2)
        assert collision_probability(3, 2, 4, **kwargs) == collision_probability(3, 2, 4, **kwargs)

    def test_hits_consistent(self):
        est = collision_probability(2, 2, 2, 4000, seed=35, mode=CollisionMode.V_VS_V)
        assert est.value == est.hits / est.samples


class TestLemma1Bound:
    def test_uniform_floor_exact(self):
        for n, k, m in [(1, 2, 2), (2, 2, 3), (3, 2, 2)]:
            b = lemma1_bound(Fraction(1, m ** (k * n - 1)), n, k, m)
            assert b == Lemma1Bound(0.0, "ok")

    def test_single_user_two_shares_float(self):
        assert lemma1_bound(1 / 2, 1, 2, 2).value == 0.0

    def test_below_floor_is_flagged(self):
        b = lemma1_bound(Fraction(1, 100), 2, 2, 2)
        assert b.status == "radicand-negative" and b.value is None
        assert lemma1_bound(0.0, 2, 2, 2).status == "radicand-negative"

    def test_exact_uses_rational_sign(self):
        # a hair above the uniform floor 2^-5 stays "ok" on the exact path
        # even though the excess is far below float resolution
        p = Fraction(1, 32) + Fraction(1, 2**80)
        assert lemma1_bound(p, 3, 2, 2).status == "ok"

    def test_log_space_large_instance(self):
        b = lemma1_bound(1.0, 100, 3, 2**32)
        assert b.status == "ok" and b.value == math.inf

    def test_moderate_value(self):
        # collision 3/4 at (n=2, k=1, m=2): sqrt(2 * 3/4 - 1) = sqrt(1/2)
        b = lemma1_bound(Fraction(3, 4), 2, 1, 2)
        assert abs(b.value - math.sqrt(0.5)) < 1e-12

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            lemma1_bound(1.5, 2, 2, 2)
        with pytest.raises(ValueError):
            lemma1_bound(Fraction(-1, 2), 2, 2, 2)


class TestTheoremBound:
    def test_reference_instance(self):
        assert abs(theorem_bound(19, 3, 2) - 0.2023) < 1e-4
        assert abs(theorem_bound(19, 3, 2) - math.sqrt(2 * (math.e / 19) ** 2)) < 1e-12


class TestVerifyChain:
    def test_exact_instance_all_pass(self):
        rep = verify_chain(3, 2, 2, samples=20_000, seed=41)
        assert rep.exact_avg_tv == Fraction(3, 16)
        assert rep.exact_collision_v == Fraction(1, 24)
        assert rep.lemma1_source == "exact"
        for name in (
            "lemma1_exact_soundness",
            "lemma2_exact_identity",
            "lemma3_exact_soundness",
            "lemma2_mc_consistency",
        ):
            assert rep.checks[name] == "pass", name
        assert rep.all_checks_pass()

    def test_single_user_everything_zero(self):
        rep = verify_chain(1, 2, 2, samples=5000, seed=42)
        assert rep.exact_avg_tv == 0
        assert rep.lemma1_bound.value_or_zero() >= 0
        assert rep.lemma3_bound.value_or_zero() >= 0
        assert rep.all_checks_pass()

    def test_out_of_regime_marked(self):
        rep = verify_chain(3, 2, 2, samples=1000, seed=43)
        assert rep.checks["expectation_bound_mc"] == "not-applicable"
        assert not rep.preconditions_ok["n>=19"]

    def test_large_instance_uses_monte_carlo(self):
        rep = verify_chain(19, 3, 2, samples=2000, seed=44)
        assert rep.exact_avg_tv is None
        assert rep.lemma1_source == "monte-carlo"
        assert rep.lemma3_source == "monte-carlo"
        assert abs(rep.theorem1_bound - 0.2023) < 1e-4
        assert rep.preconditions_ok == {"n>=19": True, "k>=3": True, "sigma>=1": True}
        assert rep.checks["expectation_bound_mc"] == "pass"
        assert rep.checks["graph_route_le_theorem1"] == "pass"

    def test_deterministic_report(self):
        a = verify_chain(2, 2, 3, samples=3000, seed=45, shards=2)
        b = verify_chain(2, 2, 3, samples=3000, seed=45, shards=2)
        assert a.to_json() == b.to_json()

    def test_report_is_json_shaped(self):
        import json

        rep = verify_chain(2, 2, 2, samples=1000, seed=46)
        parsed = json.loads(rep.to_json())
        assert parsed["params"] == {"n": 2, "k": 2, "m": 2}
        assert parsed["exact_collision_v"]["fraction"] == "5/32"
        assert parsed["mc_collision_v"]["provenance"] == "monte-carlo"
        assert parsed["seed"] == 46


def test_hoeffding_halfwidth_value():
    # sqrt(ln(2/0.001) / (2 * 10^5))
    expected = math.sqrt(math.log(2000) / 2e5)
    assert abs(hoeffding_halfwidth(100_000) - expected) < 1e-15
