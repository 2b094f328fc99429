"""Constructors, parity and Hermitian classes, symplectic block flows."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdmat import core, operators
from pdmat.core import SobolevVec, truncated_block

SEED = 1789


# ---------------------------------------------------------------------------
# multipliers and potentials


def test_fourier_multiplier_basics():
    block = truncated_block(1, 8)
    I = operators.fourier_multiplier(lambda x: 1.0, block)
    assert np.max(np.abs(I.entries - np.eye(block.n))) == 0.0
    Q = operators.fourier_multiplier(operators.symbol_catalog("laplacian"), block)
    p, _ = core._positions(block, [[3]])
    assert Q.entries[p[0], p[0]] == 9.0
    assert Q.diagonal_hint


def test_fourier_multiplier_rejects_nonfinite():
    block = truncated_block(1, 4)
    with pytest.raises(ValueError):
        operators.fourier_multiplier(lambda x: math.nan, block)


def test_half_order_symbol_certifies_on_quarter_grid():
    spec = operators.symbol_catalog("bracket_power", power=0.5)
    fam = [operators.fourier_multiplier(spec, truncated_block(1, M))
           for M in (16, 32, 64)]
    assert core.estimate_order(fam).r_hat == 0.5


def test_toeplitz_potential_constant_and_cos():
    block = truncated_block(1, 6)
    C = operators.toeplitz_potential(lambda k: 3.0 if k == 0 else 0.0, block)
    assert np.max(np.abs(C.entries - 3.0 * np.eye(block.n))) == 0.0
    B = operators.toeplitz_potential(operators.cos_coeff, block)
    idx = block.indices()[:, 0]
    for i, m in enumerate(idx):
        for j, n in enumerate(idx):
            assert B.entries[i, j] == (0.5 if abs(m - n) == 1 else 0.0)


def test_toeplitz_decay_constant():
    block = truncated_block(1, 32)
    B = operators.toeplitz_potential(operators.exp_decay_coeff, block)
    dist, _ = core._weight_arrays(block)
    c4 = float(np.max(np.abs(B.entries) * (1 + dist) ** 4))
    oracle = max(math.exp(-j) * (1 + j) ** 4 for j in range(65))
    assert c4 == pytest.approx(oracle, rel=1e-12)
    assert c4 == pytest.approx(math.exp(-3) * 4 ** 4, rel=1e-12)  # worst at |m-n| = 3


def test_compose_orders():
    block = truncated_block(1, 16)
    A = operators.fourier_multiplier(operators.symbol_catalog("laplacian"), block)
    B = operators.toeplitz_potential(operators.cos_coeff, block)
    I = core.identity(block)
    P, order = operators.compose([I, A, I, B], declared_orders=(0, 2, 0, 0))
    assert order == 2.0
    np.testing.assert_allclose(P.entries, core.matmul(A, B).entries)


def test_compose_certified_orders_match_declared():
    two_factor, three_factor = [], []
    for M in (16, 32, 64):
        block = truncated_block(1, M)
        A = operators.fourier_multiplier(operators.symbol_catalog("laplacian"), block)
        B = operators.toeplitz_potential(operators.cos_coeff, block)
        D = operators.fourier_multiplier(operators.symbol_catalog("first_derivative"), block)
        two_factor.append(core.matmul(A, B))
        three_factor.append(core.matmul(core.matmul(D, B), D))
    assert core.estimate_order(two_factor).r_hat <= 2.0
    assert core.estimate_order(three_factor).r_hat <= 2.0


# ---------------------------------------------------------------------------
# parity class


def test_dirichlet_identity_and_even_potential():
    block = truncated_block(1, 8)
    assert operators.dirichlet_check(core.identity(block))
    assert operators.dirichlet_check(
        operators.toeplitz_potential(operators.cos_coeff, block))
    assert not operators.dirichlet_check(
        operators.toeplitz_potential(operators.sin_coeff, block))


def test_parity_class_preserves_odd_sequences():
    block = truncated_block(1, 12)
    rng = np.random.default_rng(SEED)
    A = operators.toeplitz_potential(operators.cos_coeff, block) + \
        operators.fourier_multiplier(lambda x: x * x, block)
    assert operators.dirichlet_check(A)
    for _ in range(5):
        x = SobolevVec(block, rng.standard_normal(block.n)
                       + 1j * rng.standard_normal(block.n))
        xo = operators.project_odd(x)
        assert operators.is_odd(xo)
        assert operators.is_odd(core.apply(A, xo))


def test_parity_class_stable_under_product_and_bracket():
    block = truncated_block(1, 10)
    A = operators.fourier_multiplier(lambda x: x * x, block)
    B = operators.toeplitz_potential(operators.cos_coeff, block)
    assert operators.dirichlet_check(core.matmul(A, B))
    assert operators.dirichlet_check(core.commutator(A, B))


# ---------------------------------------------------------------------------
# Hermitian class


def test_hermitian_examples():
    block = truncated_block(1, 10)
    assert operators.hermitian_check(
        operators.fourier_multiplier(lambda x: x * x, block))
    assert operators.hermitian_check(
        operators.toeplitz_potential(operators.cos_coeff, block))
    imag_cos = lambda k: 1j * operators.cos_coeff(k)
    assert not operators.hermitian_check(
        operators.toeplitz_potential(imag_cos, block))


def test_hermitian_closure_under_scaled_bracket():
    block = truncated_block(1, 10)
    A = operators.fourier_multiplier(lambda x: x * x, block)
    B = operators.toeplitz_potential(operators.exp_decay_coeff, block)
    assert operators.hermitian_check(1j * core.commutator(A, B))


def test_diagonal_toeplitz_commutator_entry_formula():
    # closed-form oracle used against the generic commutator
    block = truncated_block(1, 16)
    phi = lambda x: x ** 2 - x
    A = operators.fourier_multiplier(phi, block)
    B = operators.toeplitz_potential(operators.exp_decay_coeff, block)
    C = core.commutator(A, B)
    idx = block.indices()[:, 0]
    oracle = np.array([[(phi(m) - phi(n)) * operators.exp_decay_coeff(m - n)
                        for n in idx] for m in idx])
    scale = np.max(np.abs(oracle))
    assert np.max(np.abs(C.entries - oracle)) < 1e-12 * scale


def test_symbol_difference_growth_probe():
    # finite differences of a declared-order symbol stay bounded in the
    # derivative-normalized scale
    spec = operators.symbol_catalog("bracket_power", power=0.5)
    for alpha in (1, 2):
        assert operators.symbol_difference_growth(spec, alpha, 64) < 4.0


# ---------------------------------------------------------------------------
# symplectic block systems


def test_symplectic_block_validation():
    block = truncated_block(1, 4)
    sym = operators.toeplitz_potential(operators.cos_coeff, block)
    skew = core.OpMatrix(block, np.triu(np.ones((block.n, block.n))) -
                         np.tril(np.ones((block.n, block.n))))
    with pytest.raises(ValueError):
        operators.SymplecticBlock(core.zeros(block), skew, sym)


def test_symplectic_flow_identity_at_zero():
    block = truncated_block(1, 6)
    S = operators.SymplecticBlock(core.zeros(block), core.identity(block),
                                  -1.0 * core.identity(block))
    prop, defect = operators.symplectic_flow(S, 0.0)
    assert np.max(np.abs(prop - np.eye(2 * block.n))) == 0.0
    assert defect == 0.0


def test_symplectic_flow_harmonic_rotation():
    block = truncated_block(1, 6)
    S = operators.SymplecticBlock(core.zeros(block), core.identity(block),
                                  -1.0 * core.identity(block))
    t = 0.7
    prop, defect = operators.symplectic_flow(S, t)
    n = block.n
    np.testing.assert_allclose(prop[:n, :n], np.cos(t) * np.eye(n), atol=1e-12)
    np.testing.assert_allclose(prop[:n, n:], np.sin(t) * np.eye(n), atol=1e-12)
    assert defect <= 1e-10


def test_symplectic_flow_wave_system():
    # generator [[0, Lap + V], [I, 0]] stays canonical over t in [0, 1]
    M = 32
    block = truncated_block(1, M)
    lap = operators.fourier_multiplier(lambda x: -x * x, block)
    V = operators.toeplitz_potential(operators.cos_coeff, block)
    S = operators.SymplecticBlock(core.zeros(block), lap + V, core.identity(block))
    for t in (0.25, 0.5, 1.0):
        _, defect = operators.symplectic_flow(S, t)
        assert defect <= 1e-8


def test_catalog_lookup_errors():
    with pytest.raises(KeyError):
        operators.symbol_catalog("no_such_symbol")
    with pytest.raises(KeyError):
        operators.potential_catalog("no_such_potential")
