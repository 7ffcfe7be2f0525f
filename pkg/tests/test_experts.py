import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from drivestyle.errors import DataError, IncompleteJudgments, InvalidQuantifier, LengthMismatch
from drivestyle.experts import (
    JudgmentTable,
    aggregate_opinions,
    antecedent_combinations,
    build_rulebase,
    consequent_from_value,
    map_term,
    median_opinion,
    owa_weights,
    read_judgments,
    write_judgments,
)
from drivestyle.mamdani import rulebase_to_csv
from drivestyle.partitions import default_variables
from drivestyle.pipeline import data_path

opinions_st = st.lists(st.integers(1, 9), min_size=2, max_size=12)


@pytest.fixture(scope="module")
def variables():
    return default_variables()


@pytest.fixture(scope="module")
def fixture_table():
    return read_judgments(data_path("judgments_synthetic.csv"))


def constant_table(inputs, term, n=2):
    combos = antecedent_combinations(inputs)
    ante = tuple(tuple(v.subsets[i].name for v, i in zip(inputs, c)) for c in combos)
    return JudgmentTable(tuple(v.name for v in inputs), tuple(f"e{i}" for i in range(n)), ante,
                         np.full((len(combos), n), term))


class TestOwaWeights:
    @pytest.mark.parametrize("n, a, b, expected", [
        (8, 0.0, 0.5, (0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0)),
        (2, 0.0, 0.5, (1.0, 0.0)),
        (4, 0.3, 0.8, (0.0, 0.4, 0.5, 0.1)),
    ])
    def test_examples(self, n, a, b, expected):
        assert owa_weights(n, a, b).w == pytest.approx(expected, abs=1e-12)

    def test_headline_weights_exact(self):
        assert owa_weights(8, 0, 0.5).w == (0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0)

    @pytest.mark.parametrize("a, b", [(0.5, 0.5), (0.6, 0.2), (-0.1, 0.5), (0.0, 1.2)])
    def test_invalid_quantifier(self, a, b):
        with pytest.raises(InvalidQuantifier):
            owa_weights(8, a, b)

    def test_needs_two_experts(self):
        with pytest.raises(InvalidQuantifier):
            owa_weights(1, 0, 0.5)

    @settings(max_examples=300)
    @given(n=st.integers(2, 40), a=st.floats(0, 1), b=st.floats(0, 1))
    def test_sum_to_one_and_nonnegative(self, n, a, b):
        assume(b - a > 1e-6)
        w = np.array(owa_weights(n, a, b).w)
        assert np.all(w >= 0)
        assert abs(w.sum() - 1) <= 1e-12

    @settings(max_examples=200)
    @given(n=st.integers(2, 40), b=st.floats(1e-3, 1))
    def test_non_increasing_when_a_is_zero(self, n, b):
        w = np.array(owa_weights(n, 0.0, b).w)
        assert np.all(np.diff(w) <= 1e-12)


class TestMapTerm:
    @pytest.mark.parametrize("t, v", [(9, 1.0), (1, 1 / 9), (5, 5 / 9)])
    def test_examples(self, t, v):
        assert map_term(t) == pytest.approx(v, abs=1e-15)

    @pytest.mark.parametrize("t", [0, 10, 2.5, -3])
    def test_invalid(self, t):
        with pytest.raises(DataError):
            map_term(t)


class TestAggregate:
    w8 = owa_weights(8, 0, 0.5)

    def test_all_nines(self):
        assert aggregate_opinions([9] * 8, self.w8) == pytest.approx(1.0, abs=1e-15)

    def test_top_half_selected(self):
        assert aggregate_opinions([9, 9, 9, 9, 1, 1, 1, 1], self.w8) == pytest.approx(1.0, abs=1e-15)

    def test_ascending_input(self):
        assert aggregate_opinions(range(1, 9), self.w8) == pytest.approx(26 / 36, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            aggregate_opinions([1, 2, 3], self.w8)

    @given(ops=opinions_st, seed=st.integers(0, 2**32 - 1))
    def test_permutation_invariant(self, ops, seed):
        w = owa_weights(len(ops), 0, 0.5)
        shuffled = list(np.random.default_rng(seed).permutation(ops))
        assert aggregate_opinions(ops, w) == pytest.approx(aggregate_opinions(shuffled, w), abs=1e-15)

    @given(ops=opinions_st, a=st.floats(0, 0.9), width=st.floats(0.05, 1))
    def test_between_min_and_max(self, ops, a, width):
        w = owa_weights(len(ops), a, min(1.0, a + width))
        v = aggregate_opinions(ops, w)
        assert min(ops) / 9 - 1e-12 <= v <= max(ops) / 9 + 1e-12

    @given(ops=opinions_st, i=st.integers(0, 11), a=st.floats(0, 0.9), width=st.floats(0.05, 1))
    def test_monotone_in_each_opinion(self, ops, i, a, width):
        i %= len(ops)
        assume(ops[i] < 9)
        w = owa_weights(len(ops), a, min(1.0, a + width))
        raised = list(ops)
        raised[i] += 1
        assert aggregate_opinions(raised, w) >= aggregate_opinions(ops, w) - 1e-15

    @given(ops=opinions_st)
    def test_raising_above_top_half_never_lowers(self, ops):
        n = len(ops)
        w = owa_weights(n, 0, 0.5)
        threshold = sorted(ops, reverse=True)[int(np.ceil(n / 2)) - 1]
        i = int(np.argmin(ops))
        raised = list(ops)
        raised[i] = max(raised[i], min(9, threshold + 1))
        assert aggregate_opinions(raised, w) >= aggregate_opinions(ops, w) - 1e-15

    @given(ops=opinions_st)
    def test_top_half_owa_dominates_median(self, ops):
        w = owa_weights(len(ops), 0, 0.5)
        assert aggregate_opinions(ops, w) >= median_opinion(ops) - 1e-15


class TestConsequent:
    @pytest.mark.parametrize("v, label", [(0.7222, "Aggressive"), (0.111, "Calm"), (0.3, "Moderate")])
    def test_examples(self, variables, v, label):
        out = variables[1]
        assert out.names[consequent_from_value(v, out)] == label


def _hand_rule(opinions):
    """Top-half mean of x/9, then the output subset with the largest UMF value."""
    top = sorted(opinions, reverse=True)[:len(opinions) // 2]
    v = sum(top) / (9 * len(top))
    umf = {
        "Calm": 1.0 if v <= 0.2 else max(0.0, (0.4 - v) / 0.2),
        "Moderate": max(0.0, min((v - 0.2) / 0.2, 1.0, (0.8 - v) / 0.2)),
        "Aggressive": 1.0 if v >= 0.8 else max(0.0, (v - 0.6) / 0.2),
    }
    best = max(umf.values())
    return v, [k for k in ("Calm", "Moderate", "Aggressive") if umf[k] >= best - 1e-9][-1]


class TestBuildRulebase:
    def test_constant_calm(self, variables):
        rb, _ = build_rulebase(constant_table(variables[0], 1), 0, 0.5, *variables)
        assert len(rb.rules) == 135
        assert {r.consequent for r in rb.rules} == {0}

    def test_single_aggressive_row(self, variables):
        jt = constant_table(variables[0], 1, n=3)
        terms = jt.terms.copy()
        terms[17] = 9
        jt = JudgmentTable(jt.variables, jt.experts, jt.antecedents, terms)
        rb, _ = build_rulebase(jt, 0, 0.5, *variables)
        assert rb.rules[17].consequent == 2
        assert sum(r.consequent for r in rb.rules) == 2

    @pytest.mark.parametrize("row", [0, 7, 22, 41, 58, 67, 80, 99, 113, 134])
    def test_fixture_matches_hand_aggregation(self, fixture_table, variables, row):
        rb, prov = build_rulebase(fixture_table, 0, 0.5, *variables)
        value, label = _hand_rule(list(fixture_table.terms[row]))
        assert prov["rules"][row]["aggregate"] == pytest.approx(value, abs=1e-12)
        assert prov["rules"][row]["antecedent"] == list(fixture_table.antecedents[row])
        assert variables[1].names[rb.rules[row].consequent] == label

    def test_lexicographic_order(self, fixture_table, variables):
        rb, _ = build_rulebase(fixture_table, 0, 0.5, *variables)
        assert [r.antecedent for r in rb.rules] == sorted(itertools.product(
            range(5), range(3), range(3), range(3)))

    def test_deterministic_serialization(self, fixture_table, variables):
        a = rulebase_to_csv(build_rulebase(fixture_table, 0, 0.5, *variables)[0])
        b = rulebase_to_csv(build_rulebase(fixture_table, 0, 0.5, *variables)[0])
        assert a == b

    def test_missing_rows_listed(self, fixture_table, variables):
        jt = JudgmentTable(fixture_table.variables, fixture_table.experts,
                           fixture_table.antecedents[:-2], fixture_table.terms[:-2])
        with pytest.raises(IncompleteJudgments) as info:
            build_rulebase(jt, 0, 0.5, *variables)
        assert len(info.value.missing) == 2
        assert info.value.missing[-1] == ("Very Fast", "Large", "Large", "Large")

    def test_median_baseline(self, fixture_table, variables):
        _, prov = build_rulebase(fixture_table, 0, 0.5, *variables, method="median")
        for rec in prov["rules"][:20]:
            assert rec["aggregate"] == pytest.approx(np.median(rec["opinions"]) / 9, abs=1e-15)

    def test_owa_never_less_aggressive_than_median(self, fixture_table, variables):
        owa, _ = build_rulebase(fixture_table, 0, 0.5, *variables)
        med, _ = build_rulebase(fixture_table, 0, 0.5, *variables, method="median")
        assert all(o.consequent >= m.consequent for o, m in zip(owa.rules, med.rules))


class TestJudgmentFiles:
    def test_roundtrip(self, fixture_table, tmp_path):
        path = tmp_path / "j.csv"
        write_judgments(fixture_table, path)
        back = read_judgments(path)
        assert back.experts == fixture_table.experts
        assert back.antecedents == fixture_table.antecedents
        np.testing.assert_array_equal(back.terms, fixture_table.terms)
        assert path.read_bytes() == data_path("judgments_synthetic.csv").read_bytes()

    def test_fixture_shape(self, fixture_table):
        assert fixture_table.n == 8
        assert len(fixture_table.antecedents) == 135

    def test_bad_term(self, tmp_path):
        path = tmp_path / "j.csv"
        path.write_text("v,a,d,j,e1,e2\nVery Slow,Small,Small,Small,1,x\n")
        with pytest.raises(DataError):
            read_judgments(path)

    def test_out_of_scale(self, tmp_path):
        path = tmp_path / "j.csv"
        path.write_text("v,a,d,j,e1,e2\nVery Slow,Small,Small,Small,1,12\n")
        with pytest.raises(DataError):
            read_judgments(path)
