"""Analytic gate-cost accounting for quantum time-evolution subroutines.

Per-propagator query/gate scalings (constant factors set to 1):

    trotter1       L^3 (t h)^2 / eps
    trotter2       L^(5/2) (t h)^(3/2) / eps^(1/2)
    trotter2k      5^(2k) L (L t h)^(1 + 1/2k) / eps^(1/2k)
    qubitization   t lam + log(1/eps) / loglog(1/eps)
    lcu            t lam log(t lam / eps) / loglog(t lam / eps)
    qsp            t h + log(1/eps) / loglog(1/eps)
    qdrift         (t lam)^2 / eps

with h the largest-magnitude Hamiltonian matrix element and lam the Pauli
coefficient one-norm.  On top of a chosen propagator, two measurement-driven
experiment designs are compared for producing an observable trajectory over
m = T/dt reporting steps:

    standard   m(m+1)/4 * L * PolyU(dt)          (restart for every time point)
    subspace   4 gamma n^2 m L PolyU(dt)  bound  (matrix elements once, then
               4 gamma L PolyU(dt) sum_jk |s_j - s_k| / dt  exact)

where n is the basis size and gamma the oversampling factor for precision.
The standard/subspace cost ratio exceeds 1 exactly when m > 16 gamma n^2 - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .paulis import PauliSum

ALGORITHMS = (
    "trotter1",
    "trotter2",
    "trotter2k",
    "qubitization",
    "lcu",
    "qsp",
    "qdrift",
)


@dataclass(frozen=True)
class CostFormula:
    """One propagator cost model instance.

    ``h_max`` and ``lam`` are only required by the formulas that use them;
    ``trotter_order`` is the k of the 2k-th order product formula.
    """

    algorithm: str
    pauli_terms: int
    time: float
    error: float
    h_max: float | None = None
    lam: float | None = None
    trotter_order: int = 1

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.pauli_terms < 1:
            raise ValueError("pauli_terms must be positive")
        if self.time < 0:
            raise ValueError("time must be non-negative")
        if not 0 < self.error < 1:
            raise ValueError("error must be in (0, 1)")
        if self.trotter_order < 1:
            raise ValueError("trotter_order must be at least 1")

    def with_time(self, t: float) -> "CostFormula":
        return replace(self, time=t)


def _need(value: float | None, name: str, algorithm: str) -> float:
    if value is None:
        raise ValueError(f"{algorithm} requires {name}")
    if value <= 0:
        raise ValueError(f"{name} must be positive")
    return value


def _log_over_loglog(x: float) -> float:
    # Asymptotic form log(x)/loglog(x); only meaningful where loglog > 0.
    if math.log(x) <= 1.0:
        raise ValueError(
            f"argument {x:g} outside the asymptotic domain (needs log(x) > 1)"
        )
    return math.log(x) / math.log(math.log(x))


def propagator_cost(formula: CostFormula) -> float:
    """Evaluate one propagator's cost scaling at the formula's parameters."""
    L = formula.pauli_terms
    t = formula.time
    eps = formula.error
    alg = formula.algorithm
    if alg == "trotter1":
        h = _need(formula.h_max, "h_max", alg)
        return L**3 * (t * h) ** 2 / eps
    if alg == "trotter2":
        h = _need(formula.h_max, "h_max", alg)
        return L**2.5 * (t * h) ** 1.5 / math.sqrt(eps)
    if alg == "trotter2k":
        h = _need(formula.h_max, "h_max", alg)
        k = formula.trotter_order
        return 5 ** (2 * k) * L * (L * t * h) ** (1.0 + 0.5 / k) / eps ** (0.5 / k)
    if alg == "qubitization":
        lam = _need(formula.lam, "lam", alg)
        return t * lam + _log_over_loglog(1.0 / eps)
    if alg == "lcu":
        lam = _need(formula.lam, "lam", alg)
        if t == 0.0:
            return 0.0
        return t * lam * _log_over_loglog(t * lam / eps)
    if alg == "qsp":
        h = _need(formula.h_max, "h_max", alg)
        return t * h + _log_over_loglog(1.0 / eps)
    # qdrift
    lam = _need(formula.lam, "lam", alg)
    return (t * lam) ** 2 / eps


@dataclass(frozen=True)
class ScenarioParams:
    """Shared experiment geometry for the cost comparison."""

    n_states: int
    pauli_terms: int
    total_time: float
    dt: float
    gamma: float
    epsilon: float

    def __post_init__(self) -> None:
        if self.n_states < 1:
            raise ValueError("n_states must be positive")
        if self.pauli_terms < 1:
            raise ValueError("pauli_terms must be positive")
        if self.total_time <= 0 or self.dt <= 0:
            raise ValueError("total_time and dt must be positive")
        if self.total_time < self.dt:
            raise ValueError("total_time must cover at least one step")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")

    @property
    def steps(self) -> float:
        return self.total_time / self.dt


def _integral_steps(params: ScenarioParams) -> int:
    m = params.steps
    if abs(m - round(m)) > 1e-9 * max(1.0, abs(m)):
        raise ValueError(f"total_time/dt = {m:g} must be an integer step count")
    return int(round(m))


def standard_method_cost(params: ScenarioParams, formula: CostFormula) -> float:
    """Propagator queries for the restart-per-time-point trajectory estimate.

    Measuring L observable terms at step r costs r propagator applications
    of length dt each; summed over m steps this is m(m+1)/2 * L / 2 full
    applications (expectation estimation uses each preparation twice).
    """
    m = _integral_steps(params)
    poly_u = propagator_cost(formula.with_time(params.dt))
    return 0.25 * m * (m + 1) * params.pauli_terms * poly_u


def qas_cost(
    params: ScenarioParams,
    formula: CostFormula,
    basis_times=None,
) -> float:
    """Propagator queries for the subspace method's matrix-element estimation.

    Each Hadamard-test circuit for a pair (j, k) runs evolution for
    |s_j - s_k|, repeated for L Pauli terms, two quadratures, and a factor
    gamma * n^2 of shot oversampling spread over the pair budget.  With
    explicit basis times the pair durations are summed exactly; otherwise
    every pair is bounded by the full horizon T.
    """
    poly_u = propagator_cost(formula.with_time(params.dt))
    scale = 4.0 * params.gamma * params.pauli_terms * poly_u
    if basis_times is not None:
        times = [float(s) for s in basis_times]
        if len(times) != params.n_states:
            raise ValueError("basis_times length must match n_states")
        pair_steps = sum(
            abs(a - b) / params.dt for a in times for b in times
        )
        return scale * pair_steps
    return scale * params.n_states**2 * params.steps


def crossover_threshold(params: ScenarioParams) -> float:
    """Step count above which the standard method is strictly costlier.

    Exact algebra on the two cost expressions: the ratio exceeds 1 iff
    m > 16 gamma n^2 - 1.
    """
    return 16.0 * params.gamma * params.n_states**2 - 1.0


def crossover_heuristic(params: ScenarioParams) -> float:
    """Round-number rule of thumb for the same crossover, 100 n^2."""
    return 100.0 * params.n_states**2


def one_norm(operator: PauliSum) -> float:
    return operator.coefficient_one_norm()


def max_matrix_element(operator: PauliSum) -> float:
    """Largest dense matrix-element magnitude (small registers only)."""
    return float(np.max(np.abs(operator.dense())))
