"""Shared fixtures for gamma-contract tests."""

from typing import Callable

import numpy as np
import pytest

from gamma_contract.models import OperatorPair, Tolerances
from gamma_contract.repro import epsilon_matrix, r_matrix
from gamma_contract.symmetrization import symmetrize_ops


def random_contraction(rng: np.random.Generator, n: int, norm: float = 0.9):
    """Complex Gaussian matrix rescaled to the given operator norm."""
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return norm * A / np.linalg.norm(A, 2)


def random_unitary(rng: np.random.Generator, n: int):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def disc_values(rng: np.random.Generator, n: int, radius: float = 1.0):
    return radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def tol() -> Tolerances:
    return Tolerances()


@pytest.fixture
def zero2() -> np.ndarray:
    return np.zeros((2, 2), dtype=complex)


@pytest.fixture
def epsilon_pair(zero2) -> OperatorPair:
    """(S_ε, 0) with ε = 1/1.3: norm above 1, numerical radius below 1."""
    return OperatorPair(epsilon_matrix(1 / 1.3), zero2)


@pytest.fixture
def r_pair(zero2) -> OperatorPair:
    """(S_r, 0) with r = 0.005: norm just below 2."""
    return OperatorPair(r_matrix(0.005), zero2)


@pytest.fixture
def boundary_scalar_pair() -> OperatorPair:
    """The scalar pair (0, -1), a point of the distinguished boundary."""
    return OperatorPair([[0.0]], [[-1.0]])


@pytest.fixture
def make_gamma_pair() -> Callable[..., OperatorPair]:
    """Factory for certified pairs: symmetrizations of commuting contractions.

    T2 is a polynomial in T1, so the factors commute; both have norm <= 0.9.
    """

    def factory(rng: np.random.Generator, n: int) -> OperatorPair:
        T1 = random_contraction(rng, n, 0.9)
        T2 = 0.5 * T1 + 0.5 * T1 @ T1
        return symmetrize_ops(T1, T2)

    return factory


@pytest.fixture
def make_normal_pair() -> Callable[..., OperatorPair]:
    """Factory for normal pairs U diag(z1 + z2) U*, U diag(z1 z2) U*."""

    def factory(rng: np.random.Generator, n: int, unimodular: bool = False):
        U = random_unitary(rng, n)
        if unimodular:
            z1 = np.exp(2j * np.pi * rng.random(n))
            z2 = np.exp(2j * np.pi * rng.random(n))
        else:
            z1, z2 = disc_values(rng, n, 0.95), disc_values(rng, n, 0.95)
        Uh = U.conj().T
        return OperatorPair(U @ np.diag(z1 + z2) @ Uh, U @ np.diag(z1 * z2) @ Uh)

    return factory
