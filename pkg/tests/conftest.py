"""Shared fixtures.

Loading integrals and building 185-term Hamiltonians is not free, so the
molecular systems are built once per session and treated as read-only by
every test that uses them.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from qasim.chemistry import (
    build_hamiltonian,
    build_initial_state,
    build_observables,
    load_integrals,
)
from qasim.config import packaged_fixture


@dataclasses.dataclass(frozen=True)
class SystemBundle:
    """A molecular system plus everything the engine needs from it."""

    name: str
    integrals: object
    hamiltonian: object
    observables: dict
    psi0: object
    eigenvalues: np.ndarray
    orbital_labels: tuple


def _build_bundle(name, fcidump, splits, labels, eigenstates):
    integrals = load_integrals(packaged_fixture(fcidump), packaged_fixture(splits))
    hamiltonian = build_hamiltonian(integrals)
    observables = build_observables(integrals, orbital_labels=list(labels))
    prepared = build_initial_state(
        hamiltonian, integrals.n_electrons, integrals.ms2, eigenstates
    )
    return SystemBundle(
        name=name,
        integrals=integrals,
        hamiltonian=hamiltonian,
        observables=observables,
        psi0=prepared.state,
        eigenvalues=prepared.eigenvalues,
        orbital_labels=tuple(labels),
    )


@pytest.fixture(scope="session")
def he_bundle():
    return _build_bundle(
        "he",
        "he_631g.fcidump",
        "he_631g.splits",
        ("1s", "2s"),
        (0, -1),
    )


@pytest.fixture(scope="session")
def h2_bundle():
    return _build_bundle(
        "h2",
        "h2_631g_1p4.fcidump",
        "h2_631g_1p4.splits",
        ("1sigma", "1sigma_star", "2sigma", "2sigma_star"),
        (0, -1),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
