import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import chaingap as cg
from chaingap.errors import NotIrreducible, NotStochastic

from conftest import stochastic_matrices


def test_flip_chain_basics(flip):
    assert np.allclose(flip.stationary, [0.5, 0.5])
    assert flip.irreducible and flip.reversible and flip.normal


def test_stationary_by_linear_solve_oracle():
    # independent oracle: solve mu P = mu, sum mu = 1 as a least-squares system
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    A = np.vstack([P.T - np.eye(2), np.ones((1, 2))])
    b = np.array([0.0, 0.0, 1.0])
    mu_oracle, *_ = np.linalg.lstsq(A, b, rcond=None)
    chain = cg.build_chain(P)
    assert np.allclose(chain.stationary, mu_oracle, atol=1e-12)
    assert np.allclose(chain.stationary, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)


def test_identity_is_reducible_with_multiple_invariant_measures():
    chain = cg.build_chain([[1.0, 0.0], [0.0, 1.0]])
    assert not chain.irreducible
    assert not chain.unique_stationary
    with pytest.raises(cg.errors.MultipleInvariantMeasures):
        cg.weighted_singular_spectrum(chain)


def test_reducible_chain_with_unique_stationary():
    chain = cg.build_chain([[1.0, 0.0], [0.5, 0.5]])
    assert not chain.irreducible
    assert chain.unique_stationary
    assert np.allclose(chain.stationary, [1.0, 0.0])
    with pytest.raises(NotIrreducible):
        cg.weighted_singular_spectrum(chain)


def test_not_stochastic_rejected():
    with pytest.raises(NotStochastic):
        cg.build_chain([[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(NotStochastic):
        cg.build_chain([[1.1, -0.1], [0.5, 0.5]])


def test_adjoint_of_shift_is_reverse_shift(shift4):
    rev = cg.adjoint(shift4)
    expected = cg.circulant_chain(4, [(-1, 1.0)])
    assert np.allclose(rev.transition, expected.transition)


def test_adjoint_formula_entrywise():
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    chain = cg.build_chain(P)
    mu = chain.stationary
    expected = np.array(
        [[mu[y] * P[y, x] / mu[x] for y in range(2)] for x in range(2)]
    )
    star = cg.adjoint(chain)
    assert np.allclose(star.transition, expected, atol=1e-14)
    # this chain satisfies detailed balance, so P* = P
    assert np.allclose(star.transition, P, atol=1e-12)


def test_adjoint_of_reversible_is_identity_map(uniform5):
    star = cg.adjoint(uniform5)
    assert np.allclose(star.transition, uniform5.transition, atol=1e-14)


def test_reversibilize_shift4(shift4):
    add = cg.reversibilize(shift4, "additive")
    sym = cg.circulant_chain(4, [(1, 0.5), (-1, 0.5)])
    assert np.allclose(add.transition, sym.transition)
    assert add.reversible
    mult = cg.reversibilize(shift4, "multiplicative")
    assert np.allclose(mult.transition, np.eye(4))
    assert not mult.irreducible


def test_reversibilize_additive_of_lazy_right_walk():
    chain = cg.circulant_chain(6, [(0, 0.5), (1, 0.5)])
    add = cg.reversibilize(chain, "additive")
    expected = cg.circulant_chain(6, [(0, 0.5), (1, 0.25), (-1, 0.25)])
    assert np.allclose(add.transition, expected.transition)


def test_reversibilize_bad_kind(flip):
    with pytest.raises(ValueError):
        cg.reversibilize(flip, "geometric")


def test_lazy_examples(flip):
    half = cg.lazy(flip, 0.5)
    assert np.allclose(half.transition, [[0.5, 0.5], [0.5, 0.5]])
    assert cg.lazy(flip, 0.0) is flip
    with pytest.raises(ValueError):
        cg.lazy(flip, 1.0)


def test_matrix_power(flip, uniform5):
    assert np.allclose(cg.matrix_power(flip, 0), np.eye(2))
    assert np.allclose(cg.matrix_power(flip, 2), np.eye(2))
    for n in (1, 3, 7):
        assert np.allclose(cg.matrix_power(uniform5, n), uniform5.transition)


def test_structure_flags_examples():
    shift5 = cg.circulant_chain(5, [(1, 1.0)])
    flags = cg.structure_flags(shift5)
    assert flags.normal and not flags.reversible

    cdg5 = cg.cdg_chain(5)
    flags = cg.structure_flags(cdg5)
    assert not flags.normal and not flags.reversible
    # independent commutator check with the transpose (mu is uniform)
    P = cdg5.transition
    assert np.abs(P @ P.T - P.T @ P).max() > 1e-3

    lazy_cdg = cg.lazy(cdg5, 0.5)
    assert cg.structure_flags(lazy_cdg).laziness >= 0.5


def test_transition_arrays_are_immutable(flip):
    with pytest.raises(ValueError):
        flip.transition[0, 0] = 0.3
    with pytest.raises(ValueError):
        flip.stationary[0] = 0.9


def test_distribution_validation():
    with pytest.raises(ValueError):
        cg.Distribution(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        cg.Distribution(np.array([-0.1, 1.1]))
    d = cg.Distribution(np.array([0.25, 0.75]))
    assert d.weights.sum() == 1.0


@settings(max_examples=40, deadline=None)
@given(stochastic_matrices())
def test_build_chain_invariants(matrix):
    chain = cg.build_chain(matrix)
    assert np.abs(chain.transition.sum(axis=1) - 1.0).max() <= 1e-12
    assert np.abs(chain.stationary @ chain.transition - chain.stationary).max() <= 1e-10
    assert chain.irreducible
    assert chain.stationary.min() > 0


@settings(max_examples=25, deadline=None)
@given(stochastic_matrices())
def test_adjoint_inner_product_identity(matrix):
    chain = cg.build_chain(matrix)
    star = cg.adjoint(chain)
    mu = chain.stationary
    rng = np.random.default_rng(7)
    for _ in range(100):
        f = rng.normal(size=chain.size)
        g = rng.normal(size=chain.size)
        lhs = cg.mu_inner(chain.transition @ f, g, mu)
        rhs = cg.mu_inner(f, star.transition @ g, mu)
        bound = 1e-10 * cg.mu_norm(f, mu) * cg.mu_norm(g, mu)
        assert abs(lhs - rhs) <= bound


@settings(max_examples=25, deadline=None)
@given(stochastic_matrices())
def test_adjoint_involution(matrix):
    chain = cg.build_chain(matrix)
    back = cg.adjoint(cg.adjoint(chain))
    assert np.abs(back.transition - chain.transition).max() <= 1e-12


@settings(max_examples=25, deadline=None)
@given(stochastic_matrices())
def test_reversibilizations_are_reversible(matrix):
    chain = cg.build_chain(matrix)
    for kind in ("additive", "multiplicative"):
        result = cg.reversibilize(chain, kind)
        assert cg.structure_flags(result).reversible
        assert np.allclose(result.stationary, chain.stationary)


@settings(max_examples=15, deadline=None)
@given(stochastic_matrices(max_size=5))
def test_lazy_gap_scaling(matrix):
    chain = cg.build_chain(matrix)
    gamma, _ = cg.spectral_gap(chain)
    for theta in (0.25, 0.5, 0.9):
        scaled, _ = cg.spectral_gap(cg.lazy(chain, theta))
        assert abs(scaled - (1 - theta) * gamma) <= 1e-9 * max(gamma, 1e-30)


@settings(max_examples=15, deadline=None)
@given(stochastic_matrices(max_size=5), st.randoms(use_true_random=False))
def test_permutation_invariance(matrix, rnd):
    n = len(matrix)
    perm = list(range(n))
    rnd.shuffle(perm)
    perm = np.array(perm)
    chain = cg.build_chain(matrix)
    relabeled = cg.build_chain(matrix[np.ix_(perm, perm)])
    assert np.abs(relabeled.stationary - chain.stationary[perm]).max() <= 1e-10
    g1, t1 = cg.spectral_gap(chain)
    g2, t2 = cg.spectral_gap(relabeled)
    assert abs(g1 - g2) <= 1e-10
    assert abs(t1 - t2) <= 1e-10 * max(t1, 1.0)
    x1 = cg.cheeger_exact(chain).xi
    x2 = cg.cheeger_exact(relabeled).xi
    assert abs(x1 - x2) <= 1e-10


def test_period():
    assert cg.period(cg.circulant_chain(4, [(1, 1.0)])) == 4
    assert cg.period(cg.circulant_chain(4, [(1, 0.5), (-1, 0.5)])) == 2
    assert cg.period(cg.circulant_chain(3, [(1, 0.5), (-1, 0.5)])) == 1
    assert cg.period(cg.cdg_chain(5)) == 1
