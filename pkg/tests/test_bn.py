"""Engine tests: construction validation, exact inference vs the
enumeration oracle, Markov blankets, prediction semantics."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from requisites.bn import (
    ClassObserved,
    Cpt,
    CptMismatch,
    CycleDetected,
    IllegalState,
    IncompleteAssignment,
    InconsistentEvidence,
    RowNotNormalized,
    UnknownVariable,
    Variable,
    build_network,
    joint_probability,
    map_predict,
    markov_blanket,
    min_degree_order,
    posterior,
    prior_marginals,
)
from conftest import build_from_spec, make_chain_ab, random_evidence, random_net_spec
from oracle import oracle_posteriors


def make_single():
    return build_network(
        [Variable("V", ("yes", "no"))], [], [Cpt("V", (), [[0.5, 0.5]])]
    )


class TestBuildNetwork:
    def test_minimal_network(self):
        net = make_single()
        assert net.variable_ids == ("V",)
        assert net.variable("V").states == ("yes", "no")

    def test_smallest_cycle_rejected(self):
        variables = [Variable("A", ("x", "y")), Variable("B", ("x", "y"))]
        cpts = [
            Cpt("A", ("B",), [[0.5, 0.5], [0.5, 0.5]]),
            Cpt("B", ("A",), [[0.5, 0.5], [0.5, 0.5]]),
        ]
        with pytest.raises(CycleDetected):
            build_network(variables, [("A", "B"), ("B", "A")], cpts)

    def test_self_loop_rejected(self):
        with pytest.raises(CycleDetected):
            build_network(
                [Variable("A", ("x", "y"))],
                [("A", "A")],
                [Cpt("A", (), [[0.5, 0.5]])],
            )

    def test_unnormalized_row_rejected(self):
        with pytest.raises(RowNotNormalized):
            build_network(
                [Variable("A", ("x", "y"))], [], [Cpt("A", (), [[0.6, 0.5]])]
            )

    def test_row_tolerance_is_tight(self):
        # within 1e-9 passes, outside does not
        build_network(
            [Variable("A", ("x", "y"))], [], [Cpt("A", (), [[0.5 + 4e-10, 0.5]])]
        )
        with pytest.raises(RowNotNormalized):
            build_network(
                [Variable("A", ("x", "y"))], [], [Cpt("A", (), [[0.5 + 2e-9, 0.5]])]
            )

    def test_cpt_parent_mismatch(self):
        variables = [Variable("A", ("x", "y")), Variable("B", ("x", "y"))]
        cpts = [Cpt("A", (), [[0.5, 0.5]]), Cpt("B", (), [[0.5, 0.5]])]
        with pytest.raises(CptMismatch):
            build_network(variables, [("A", "B")], cpts)

    def test_cpt_shape_mismatch(self):
        variables = [Variable("A", ("x", "y")), Variable("B", ("x", "y"))]
        cpts = [
            Cpt("A", (), [[0.5, 0.5]]),
            Cpt("B", ("A",), [[0.5, 0.5]]),  # needs two rows
        ]
        with pytest.raises(CptMismatch):
            build_network(variables, [("A", "B")], cpts)

    def test_unknown_edge_endpoint(self):
        with pytest.raises(UnknownVariable):
            build_network(
                [Variable("A", ("x", "y"))],
                [("A", "Z")],
                [Cpt("A", (), [[0.5, 0.5]])],
            )

    def test_missing_and_duplicate_cpts(self):
        variables = [Variable("A", ("x", "y"))]
        with pytest.raises(CptMismatch):
            build_network(variables, [], [])
        with pytest.raises(CptMismatch):
            build_network(
                variables, [], [Cpt("A", (), [[0.5, 0.5]]), Cpt("A", (), [[0.4, 0.6]])]
            )

    def test_variable_needs_two_distinct_states(self):
        with pytest.raises(IllegalState):
            Variable("A", ("x",))
        with pytest.raises(IllegalState):
            Variable("A", ("x", "x"))

    def test_network_is_immutable(self):
        net = make_single()
        with pytest.raises(ValueError):
            net.cpt("V").table[0, 0] = 0.9


class TestJointProbability:
    def test_single_variable(self):
        assert joint_probability(make_single(), {"V": "yes"}) == pytest.approx(0.5)

    def test_two_factor_product(self):
        net = make_chain_ab()
        assert joint_probability(net, {"A": "a", "B": "b"}) == pytest.approx(0.24)

    def test_incomplete_assignment(self):
        with pytest.raises(IncompleteAssignment):
            joint_probability(make_chain_ab(), {"A": "a"})

    def test_illegal_state(self):
        with pytest.raises(IllegalState):
            joint_probability(make_single(), {"V": "maybe"})

    def test_sums_to_one_over_all_assignments(self):
        from itertools import product

        rng = np.random.default_rng(7)
        for _ in range(10):
            spec = random_net_spec(rng, max_vars=6)
            net = build_from_spec(*spec)
            variables = spec[0]
            total = sum(
                joint_probability(net, dict(zip([v for v, _ in variables], combo)))
                for combo in product(*[states for _, states in variables])
            )
            assert total == pytest.approx(1.0, abs=1e-9)


class TestPosterior:
    def test_root_prior_is_cpt_row(self):
        net = make_chain_ab()
        p = posterior(net, {}, "A")
        assert p.probabilities == pytest.approx({"a": 0.3, "not_a": 0.7})

    def test_chain_marginal_total_probability(self):
        # hand oracle: P(b) = 0.3*0.8 + 0.7*0.1 = 0.31
        p = posterior(make_chain_ab(), {}, "B")
        assert p.probabilities["b"] == pytest.approx(0.31, abs=1e-12)

    def test_observed_target_is_point_mass(self):
        net = make_chain_ab()
        p = posterior(net, {"B": "b"}, "B")
        assert p.probabilities == {"b": 1.0, "not_b": 0.0}

    def test_inconsistent_evidence_reported(self):
        variables = [Variable("A", ("x", "y")), Variable("B", ("x", "y"))]
        cpts = [
            Cpt("A", (), [[1.0, 0.0]]),
            Cpt("B", ("A",), [[1.0, 0.0], [0.5, 0.5]]),
        ]
        net = build_network(variables, [("A", "B")], cpts)
        with pytest.raises(InconsistentEvidence):
            posterior(net, {"B": "y"}, "A")
        # observed target with impossible companion evidence is also reported
        with pytest.raises(InconsistentEvidence):
            posterior(net, {"A": "y", "B": "y"}, "B")

    def test_matches_enumeration_oracle_on_random_networks(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            spec = random_net_spec(rng)
            net = build_from_spec(*spec)
            evidence = random_evidence(rng, spec[0])
            expected, _ = oracle_posteriors(spec[0], spec[1], spec[2], evidence)
            for var, by_state in expected.items():
                actual = posterior(net, evidence, var).probabilities
                for state, value in by_state.items():
                    assert abs(actual[state] - value) <= 1e-9

    def test_elimination_order_independence(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            spec = random_net_spec(rng, max_vars=6)
            net = build_from_spec(*spec)
            evidence = random_evidence(rng, spec[0])
            targets = [v for v, _ in spec[0] if v not in evidence]
            if not targets:
                continue
            target = targets[0]
            hidden = [v for v, _ in spec[0] if v != target and v not in evidence]
            base = posterior(net, evidence, target).probabilities
            for order in (list(hidden), list(reversed(hidden))):
                alt = posterior(net, evidence, target, elimination_order=order)
                for state, value in base.items():
                    assert abs(alt.probabilities[state] - value) <= 1e-9

    def test_bad_elimination_order_rejected(self):
        net = make_chain_ab()
        from requisites.bn import BayesNetError

        with pytest.raises(BayesNetError):
            posterior(net, {}, "B", elimination_order=["B"])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_posteriors_normalized_property(seed):
    rng = np.random.default_rng(seed)
    spec = random_net_spec(rng, max_vars=6)
    net = build_from_spec(*spec)
    evidence = random_evidence(rng, spec[0])
    for var, _ in spec[0]:
        p = posterior(net, evidence, var)
        assert sum(p.probabilities.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(v >= 0.0 for v in p.probabilities.values())


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_evidence_respected_property(seed):
    rng = np.random.default_rng(seed)
    spec = random_net_spec(rng, max_vars=6)
    net = build_from_spec(*spec)
    evidence = random_evidence(rng, spec[0], max_items=2)
    for var, state in evidence.items():
        p = posterior(net, evidence, var)
        assert p.probabilities[state] == 1.0


class TestPriorMarginals:
    def test_single_variable(self):
        marginals = prior_marginals(make_single())
        assert marginals["V"].probabilities == pytest.approx({"yes": 0.5, "no": 0.5})

    def test_chain(self):
        marginals = prior_marginals(make_chain_ab())
        assert marginals["B"].probabilities["b"] == pytest.approx(0.31)

    def test_equals_posterior_with_empty_evidence(self):
        rng = np.random.default_rng(3)
        spec = random_net_spec(rng)
        net = build_from_spec(*spec)
        marginals = prior_marginals(net)
        for var, _ in spec[0]:
            assert marginals[var].probabilities == posterior(net, {}, var).probabilities


class TestMarkovBlanket:
    def test_isolated_node(self):
        net = build_network(
            [Variable("A", ("x", "y")), Variable("B", ("x", "y"))],
            [],
            [Cpt("A", (), [[0.5, 0.5]]), Cpt("B", (), [[0.5, 0.5]])],
        )
        assert markov_blanket(net, "A") == frozenset()

    def test_two_node_chain(self):
        net = make_chain_ab()
        assert markov_blanket(net, "A") == {"B"}
        assert markov_blanket(net, "B") == {"A"}

    def test_includes_spouses(self):
        variables = [Variable(v, ("x", "y")) for v in "ABC"]
        cpts = [
            Cpt("A", (), [[0.5, 0.5]]),
            Cpt("B", (), [[0.5, 0.5]]),
            Cpt("C", ("A", "B"), [[0.5, 0.5]] * 4),
        ]
        net = build_network(variables, [("A", "C"), ("B", "C")], cpts)
        assert markov_blanket(net, "A") == {"B", "C"}

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            markov_blanket(make_single(), "Z")

    def test_blanket_screens_off_rest(self):
        # numeric d-separation: evidence beyond a fully observed blanket
        # cannot move the posterior
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 25:
            spec = random_net_spec(rng)
            variables, parents, tables, edges = spec
            net = build_from_spec(*spec)
            states_of = dict(variables)
            var = variables[int(rng.integers(len(variables)))][0]
            blanket = markov_blanket(net, var)
            outside = [v for v, _ in variables if v != var and v not in blanket]
            if not outside:
                continue
            evidence = {b: str(rng.choice(states_of[b])) for b in blanket}
            extra = dict(evidence)
            for v in outside:
                extra[v] = str(rng.choice(states_of[v]))
            base = posterior(net, evidence, var).probabilities
            widened = posterior(net, extra, var).probabilities
            for state, value in base.items():
                assert abs(widened[state] - value) <= 1e-9
            checked += 1


class TestMapPredict:
    def test_argmax(self):
        net = build_network(
            [Variable("V", ("yes", "no"))], [], [Cpt("V", (), [[0.7, 0.3]])]
        )
        assert map_predict(net, {}, "V") == "yes"

    def test_exact_tie_breaks_to_first_declared_state(self):
        assert map_predict(make_single(), {}, "V") == "yes"
        net = build_network(
            [Variable("V", ("no", "yes"))], [], [Cpt("V", (), [[0.5, 0.5]])]
        )
        assert map_predict(net, {}, "V") == "no"

    def test_observed_class_rejected(self):
        with pytest.raises(ClassObserved):
            map_predict(make_single(), {"V": "yes"}, "V")

    def test_deterministic(self):
        net = make_chain_ab()
        results = {map_predict(net, {"A": "a"}, "B") for _ in range(5)}
        assert len(results) == 1


class TestConcurrency:
    def test_concurrent_posteriors_agree(self):
        from concurrent.futures import ThreadPoolExecutor

        net = make_chain_ab()
        expected = posterior(net, {"A": "a"}, "B").probabilities

        def work(_):
            return posterior(net, {"A": "a"}, "B").probabilities

        with ThreadPoolExecutor(max_workers=8) as pool:
            for result in pool.map(work, range(64)):
                assert result == expected


def test_min_degree_order_deterministic():
    scopes = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    order1 = min_degree_order(scopes, ["a", "b", "c", "d"])
    order2 = min_degree_order(scopes, ["d", "c", "b", "a"])
    assert order1 == order2
