import numpy as np
import pytest

from jstar import algebra as alg
from jstar import maps
from jstar import matrix as mx

A2 = alg.make_full(2)


def test_exact_map_examples():
    x = mx.cmatrix([[1, 2j], [3, 4]])
    np.testing.assert_array_equal(maps.Transpose(A2)(x), [[1, 3], [2j, 4]])
    np.testing.assert_array_equal(maps.identity_map(A2)(x), x)
    np.testing.assert_array_equal(maps.Zero(A2)(x), np.zeros((2, 2)))
    U = mx.cmatrix([[0, 1], [1, 0]])
    np.testing.assert_array_equal(maps.ExactUV(U, mx.identity(2), A2)(x), [[3, 4], [1, 2j]])


def test_rectangular_uv():
    a = alg.make_cartan_type1(2, 3)
    h = maps.ExactUV(maps.random_unitary(2, 1), maps.random_unitary(3, 2), a)
    assert h.codomain.shape == (2, 3)
    assert maps.is_exact_jstar_hom(h, 50, 1e-12)
    # an isometry into a larger space is still a J*-homomorphism
    U = np.vstack([np.eye(2), np.zeros((1, 2))])
    g = maps.ExactUV(U, mx.identity(2), A2)
    assert g.codomain.shape == (3, 2) and maps.is_exact_jstar_hom(g, 50, 1e-12)


def test_transpose_respects_triple_product():
    for s in range(20):
        x = alg.sample(A2, s)
        t = maps.Transpose(A2)
        assert mx.distance(t(mx.triple(x)), mx.triple(t(x))) < 1e-14


def test_truncated_ball():
    h = maps.make_example23(maps.Transpose(A2))
    inside = mx.cmatrix([[0.5, 0], [0.2j, 0]])
    np.testing.assert_array_equal(h(inside), inside.T)
    on_sphere = mx.cmatrix([[1, 0], [0, 0]])
    np.testing.assert_array_equal(h(on_sphere), np.zeros((2, 2)))
    np.testing.assert_array_equal(h(3 * on_sphere), np.zeros((2, 2)))
    assert h.exact_beyond == 1.0
    scalar = maps.make_example23(maps.identity_map(alg.make_full(1)))
    assert scalar(mx.cmatrix(0.3))[0, 0] == 0.3


def test_example23_rejects_other_inner_maps():
    with pytest.raises(ValueError):
        maps.make_example23(maps.Zero(A2))
    with pytest.raises(ValueError):
        maps.TruncatedBall(maps.Transpose(A2), 0.0)


def test_bad_unitaries_rejected():
    with pytest.raises(ValueError):
        maps.ExactUV(2 * mx.identity(2), mx.identity(2), A2)
    with pytest.raises(ValueError):
        maps.ExactUV(mx.identity(2), mx.cmatrix([[1, 1], [0, 1]]), A2)
    with pytest.raises(ValueError):
        maps.ExactUV(mx.identity(3), mx.identity(2), A2)


def test_codomain_spot_check():
    with pytest.raises(ValueError):
        maps.Transpose(alg.make_cartan_type1(2, 3), codomain=alg.make_cartan_type1(2, 3))
    with pytest.raises(ValueError):
        maps.identity_map(A2).__class__(mx.identity(2), mx.identity(2), A2,
                                         alg.make_custom([np.eye(2)]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        maps.Transpose(A2)(mx.zeros(3, 3))


def test_random_unitary_is_unitary_and_deterministic():
    u = maps.random_unitary(4, 9)
    np.testing.assert_allclose(mx.adjoint(u) @ u, np.eye(4), atol=1e-14)
    np.testing.assert_array_equal(u, maps.random_unitary(4, 9))
    assert mx.distance(u, maps.random_unitary(4, 10)) > 0.1


@pytest.mark.parametrize("name", ["identity", "transpose", "zero", "uv", "spin5"])
def test_exact_maps_pass_hom_check(name):
    a = alg.make_cartan_type4(5) if name == "spin5" else A2
    h = {
        "identity": lambda: maps.identity_map(a),
        "transpose": lambda: maps.Transpose(a),
        "zero": lambda: maps.Zero(a),
        "uv": lambda: maps.ExactUV(maps.random_unitary(2, 3), maps.random_unitary(2, 4), a),
        "spin5": lambda: maps.identity_map(a),
    }[name]()
    check = maps.is_exact_jstar_hom(h, 100, 1e-12, scale=3.0)
    assert check.ok and check.witness is None
    assert maps.norm_decreasing_check(h, 100) <= 1e-12


def test_hom_check_witnesses():
    trunc = maps.make_example23(maps.Transpose(A2))
    check = maps.is_exact_jstar_hom(trunc, 20, 1e-10)
    assert not check and check.witness["check"] == "additivity"
    assert check.max_additivity > 0.1
    conj = maps.is_exact_jstar_hom(np.conj, 5, 1e-10, algebra=A2)
    assert not conj.ok and conj.max_homogeneity > 0.1 and conj.max_additivity < 1e-12


def test_ball_noise():
    inner = maps.identity_map(A2)
    h = maps.BallNoise(inner, alpha=0.5, p=0.5, support_radius=2.0, seed=3)
    x = alg.sample(A2, 1)
    nx = mx.spectral_norm(x)
    assert mx.distance(h(x), x) == pytest.approx(0.5 * nx**0.5, rel=1e-12)
    np.testing.assert_array_equal(h(mx.zeros(2, 2)), np.zeros((2, 2)))
    big = 2.0 * x / nx
    np.testing.assert_array_equal(h(big), big)
    # direction is constant along rays
    np.testing.assert_array_equal(h.direction(x), h.direction(0.1 * x))
    assert h.exact_beyond == 2.0
    assert mx.distance(h.direction(x), maps.BallNoise(inner, 0.5, 0.5, 2.0, seed=4).direction(x)) > 0


def test_ball_noise_validation():
    inner = maps.identity_map(A2)
    for kwargs in ({"alpha": -1, "p": 0.5, "support_radius": 1},
                   {"alpha": 1, "p": 1.0, "support_radius": 1},
                   {"alpha": 1, "p": 0.5, "support_radius": 0}):
        with pytest.raises(ValueError):
            maps.BallNoise(inner, **kwargs)
