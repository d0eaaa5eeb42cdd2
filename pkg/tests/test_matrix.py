import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jstar import matrix as mx


def _eig_oracle_2x2(x):
    # largest eigenvalue of the Hermitian 2x2 matrix x*x in closed form
    g = np.conj(x).T @ x
    a, d, b = g[0, 0].real, g[1, 1].real, g[0, 1]
    return math.sqrt((a + d) / 2 + math.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2))


def test_adjoint_examples():
    assert mx.adjoint(mx.cmatrix([[1j]]))[0, 0] == -1j
    np.testing.assert_array_equal(mx.adjoint(mx.cmatrix([[0, 1], [0, 0]])), [[0, 0], [1, 0]])
    x = np.random.default_rng(0).normal(size=(3, 2)) + 1j * np.random.default_rng(1).normal(size=(3, 2))
    y = mx.adjoint(x)
    assert y.shape == (2, 3)
    np.testing.assert_array_equal(mx.adjoint(y), x)


def test_triple_examples():
    assert mx.triple(mx.cmatrix(2.0))[0, 0] == 8
    np.testing.assert_array_equal(mx.triple(mx.cmatrix([[1, 0], [0, 2]])), [[1, 0], [0, 8]])
    e = mx.cmatrix([[0, 1], [0, 0]])
    np.testing.assert_array_equal(mx.triple(e), e)
    assert mx.triple(mx.zeros(2, 3) + 1).shape == (2, 3)


def test_spectral_norm_examples():
    assert mx.spectral_norm(mx.identity(2)) == pytest.approx(1.0, rel=1e-15)
    assert mx.spectral_norm(mx.cmatrix([[0, 2], [0, 0]])) == pytest.approx(2.0, rel=1e-15)
    assert mx.spectral_norm(mx.zeros(3, 2)) == 0.0


@pytest.mark.parametrize("seed", range(25))
def test_spectral_norm_matches_closed_form_2x2(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert mx.spectral_norm(x) == pytest.approx(_eig_oracle_2x2(x), rel=1e-12)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        mx.cmatrix([[np.nan]])
    with pytest.raises(OverflowError):
        mx.spectral_norm(np.array([[np.inf, 0], [0, 1]], dtype=complex))


def test_plumbing():
    np.testing.assert_array_equal(mx.scale(2, mx.identity(2)), np.diag([2, 2]))
    x = mx.cmatrix([[1, 2j], [3, 4]])
    assert mx.distance(x, x) == 0
    np.testing.assert_array_equal(mx.matmul(mx.cmatrix([[0, 1], [0, 0]]), mx.cmatrix([[0, 0], [1, 0]])),
                                  np.diag([1, 0]))
    with pytest.raises(ValueError):
        mx.add(mx.identity(2), mx.identity(3))
    with pytest.raises(ValueError):
        mx.sub(mx.zeros(2, 3), mx.zeros(3, 2))
    with pytest.raises(ValueError):
        mx.matmul(mx.zeros(2, 3), mx.zeros(2, 3))


def test_operations_do_not_mutate():
    x = mx.cmatrix([[1, 2], [3, 4j]])
    before = x.copy()
    for f in (mx.adjoint, mx.triple, mx.spectral_norm):
        f(x)
    mx.add(x, x), mx.scale(3, x), mx.matmul(x, x)
    np.testing.assert_array_equal(x, before)


def test_literal_round_trip():
    lit = [[[1, 0], [0, 1]], [[0, 0], [1, 0]]]
    x = mx.from_literal(lit)
    np.testing.assert_array_equal(x, [[1, 1j], [0, 1]])
    assert mx.to_literal(x) == lit
    y = mx.cmatrix([[0.1 + 1 / 3j, -2.5e-300]])
    assert np.array_equal(mx.from_literal(mx.to_literal(y)), y)
    with pytest.raises(ValueError):
        mx.from_literal([[1, 2], [3, 4]])


_entry = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False)


@st.composite
def matrices(draw, max_dim=4):
    n = draw(st.integers(1, max_dim))
    m = draw(st.integers(1, max_dim))
    return np.array(draw(st.lists(_entry, min_size=n * m, max_size=n * m)), dtype=complex).reshape(n, m)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_cube_identity(x):
    nx = mx.spectral_norm(x)
    assert abs(mx.spectral_norm(mx.triple(x)) - nx**3) <= 1e-9 * max(1.0, nx**3)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_adjoint_isometry(x):
    assert abs(mx.spectral_norm(mx.adjoint(x)) - mx.spectral_norm(x)) <= 1e-12 * max(1.0, mx.spectral_norm(x))


@settings(max_examples=200, deadline=None)
@given(matrices(), _entry)
def test_homogeneity(x, lam):
    lhs = mx.spectral_norm(mx.scale(lam, x))
    assert lhs == pytest.approx(abs(lam) * mx.spectral_norm(x), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_triangle_inequality(data):
    x = data.draw(matrices())
    y = np.array(data.draw(st.lists(_entry, min_size=x.size, max_size=x.size)), dtype=complex).reshape(x.shape)
    slack = 1e-12 * max(1.0, mx.spectral_norm(x) + mx.spectral_norm(y))
    assert mx.spectral_norm(mx.add(x, y)) <= mx.spectral_norm(x) + mx.spectral_norm(y) + slack
