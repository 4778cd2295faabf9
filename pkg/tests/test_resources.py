"""Analytic cost model: formula values, scaling, and the crossover algebra."""

import math

import numpy as np
import pytest

from qasim.paulis import PauliSum
from qasim.resources import (
    CostFormula,
    ScenarioParams,
    crossover_heuristic,
    crossover_threshold,
    max_matrix_element,
    one_norm,
    propagator_cost,
    qas_cost,
    standard_method_cost,
)


def formula(alg, **kw):
    base = dict(algorithm=alg, pauli_terms=10, time=2.0, error=0.01,
                h_max=1.5, lam=3.0)
    base.update(kw)
    return CostFormula(**base)


class TestPropagatorCost:
    def test_trotter1_value(self):
        f = formula("trotter1", pauli_terms=1, time=2.0, error=0.5, h_max=1.0)
        assert propagator_cost(f) == pytest.approx((2.0) ** 2 / 0.5)
        f10 = formula("trotter1", pauli_terms=10, time=2.0, error=0.5, h_max=1.0)
        assert propagator_cost(f10) == pytest.approx(1000 * 4.0 / 0.5)

    def test_trotter2_value(self):
        f = formula("trotter2", pauli_terms=4, time=1.0, error=0.04, h_max=2.0)
        assert propagator_cost(f) == pytest.approx(4**2.5 * 2.0**1.5 / 0.2)

    def test_trotter2k_reduces_sensibly(self):
        f1 = formula("trotter2k", trotter_order=1)
        want = 25 * 10 * (10 * 2.0 * 1.5) ** 1.5 / math.sqrt(0.01)
        assert propagator_cost(f1) == pytest.approx(want)
        # raising the order trades prefactor against error exponent
        f3 = formula("trotter2k", trotter_order=3)
        assert propagator_cost(f3) != propagator_cost(f1)

    def test_qubitization_and_qsp_additive_error_term(self):
        fq = formula("qubitization")
        want = 2.0 * 3.0 + math.log(100) / math.log(math.log(100))
        assert propagator_cost(fq) == pytest.approx(want)
        fs = formula("qsp")
        want = 2.0 * 1.5 + math.log(100) / math.log(math.log(100))
        assert propagator_cost(fs) == pytest.approx(want)

    def test_lcu_value(self):
        f = formula("lcu")
        x = 2.0 * 3.0 / 0.01
        assert propagator_cost(f) == pytest.approx(
            6.0 * math.log(x) / math.log(math.log(x))
        )
        assert propagator_cost(formula("lcu", time=0.0)) == 0.0

    def test_qdrift_value(self):
        f = formula("qdrift")
        assert propagator_cost(f) == pytest.approx(36.0 / 0.01)

    def test_cost_grows_with_time(self):
        for alg in ("trotter1", "trotter2", "trotter2k", "qubitization",
                    "lcu", "qsp", "qdrift"):
            short = propagator_cost(formula(alg, time=1.0))
            long = propagator_cost(formula(alg, time=4.0))
            assert long > short, alg

    def test_missing_parameters_rejected(self):
        with pytest.raises(ValueError, match="requires h_max"):
            propagator_cost(formula("trotter1", h_max=None))
        with pytest.raises(ValueError, match="requires lam"):
            propagator_cost(formula("qdrift", lam=None))

    def test_validation(self):
        with pytest.raises(ValueError, match="unknown algorithm"):
            formula("suzuki9000")
        with pytest.raises(ValueError, match="error"):
            formula("trotter1", error=1.5)
        with pytest.raises(ValueError, match="pauli_terms"):
            formula("trotter1", pauli_terms=0)
        with pytest.raises(ValueError, match="trotter_order"):
            formula("trotter2k", trotter_order=0)

    def test_asymptotic_domain_guard(self):
        # log(1/eps) <= e makes log(log(.)) degenerate
        with pytest.raises(ValueError, match="asymptotic domain"):
            propagator_cost(formula("qubitization", error=0.9))

    def test_with_time(self):
        f = formula("trotter1")
        assert f.with_time(0.25).time == 0.25
        assert f.time == 2.0


def scenario(**kw):
    base = dict(n_states=2, pauli_terms=27, total_time=4.0, dt=0.001,
                gamma=6.0, epsilon=0.001)
    base.update(kw)
    return ScenarioParams(**base)


class TestScenarioCosts:
    def test_standard_cost_formula(self):
        p = scenario(total_time=1.0, dt=0.25)  # m = 4
        f = formula("trotter1")
        poly_u = propagator_cost(f.with_time(0.25))
        assert standard_method_cost(p, f) == pytest.approx(
            0.25 * 4 * 5 * 27 * poly_u
        )

    def test_non_integer_steps_rejected(self):
        p = scenario(total_time=1.0, dt=0.3)
        with pytest.raises(ValueError, match="integer step count"):
            standard_method_cost(p, formula("trotter1"))

    def test_qas_bound_formula(self):
        p = scenario(total_time=1.0, dt=0.25)
        f = formula("trotter1")
        poly_u = propagator_cost(f.with_time(0.25))
        assert qas_cost(p, f) == pytest.approx(4.0 * 6.0 * 4 * 27 * 4 * poly_u)

    def test_qas_exact_pair_durations(self):
        p = scenario(total_time=1.0, dt=0.25)
        f = formula("trotter1")
        poly_u = propagator_cost(f.with_time(0.25))
        # |0-0.5| twice over the ordered pairs -> 1.0 total, 4 steps of dt
        got = qas_cost(p, f, basis_times=(0.0, 0.5))
        assert got == pytest.approx(4.0 * 6.0 * 27 * poly_u * 4.0)
        assert got <= qas_cost(p, f)

    def test_basis_times_length_checked(self):
        with pytest.raises(ValueError, match="basis_times"):
            qas_cost(scenario(), formula("trotter1"), basis_times=(0.0,))

    def test_crossover_exact_algebra(self):
        p = scenario()
        f = formula("trotter1")
        threshold = crossover_threshold(p)
        assert threshold == 383.0
        # the ratio standard/bound crosses 1 exactly past the threshold
        for m, expect_beyond in ((382, False), (384, True)):
            pm = scenario(total_time=m * 0.001, dt=0.001)
            ratio = standard_method_cost(pm, f) / qas_cost(pm, f)
            assert (ratio > 1.0) == expect_beyond, m
        at = scenario(total_time=383 * 0.001, dt=0.001)
        ratio_at = standard_method_cost(at, f) / qas_cost(at, f)
        assert ratio_at == pytest.approx(1.0, abs=1e-12)

    def test_crossover_heuristic(self):
        assert crossover_heuristic(scenario()) == 400.0
        assert crossover_heuristic(scenario(n_states=3)) == 900.0

    def test_ratio_is_dt_independent(self):
        # both costs share the per-step propagator factor, so the ratio only
        # depends on the step count
        f = formula("trotter1")
        for dt in (0.01, 0.001):
            p = scenario(total_time=4000 * dt, dt=dt)
            ratio = standard_method_cost(p, f) / qas_cost(p, f)
            assert ratio == pytest.approx((4000 + 1) / (16 * 6.0 * 4))

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            scenario(n_states=0)
        with pytest.raises(ValueError):
            scenario(gamma=0.0)
        with pytest.raises(ValueError):
            scenario(total_time=0.0005)  # shorter than dt
        with pytest.raises(ValueError):
            scenario(epsilon=0.0)


class TestOperatorNorms:
    def test_one_norm(self):
        op = PauliSum.from_labels({"XX": 1.0, "ZI": -2.0, "YY": 0.5})
        assert one_norm(op) == pytest.approx(3.5)

    def test_max_matrix_element(self):
        op = PauliSum.from_labels({"Z": 2.0, "I": 1.0})
        assert max_matrix_element(op) == pytest.approx(3.0)
