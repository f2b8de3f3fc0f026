import numpy as np
import pytest

from sptfermi import (HarmonicPair, InternalCoordinates, NonInteracting, SquareWellContinued,
                      SystemSpec, effective_potential, find_symmetric_minimum,
                      gramian_inverse_diagonal, unitary_well)
from sptfermi.geometry import (GramianError, SymmetricMinimum, centrifugal_coefficients,
                               effective_potential_derivatives, kinetic_metric, pair_index,
                               pair_indices, restricted_potential)


def random_coords(n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, n + 2))
    r = np.linalg.norm(x, axis=1)
    u = x / r[:, None]
    return InternalCoordinates(r, np.clip(u @ u.T, -1, 1)), x


def internal_of(x):
    n = x.shape[0]
    r = np.linalg.norm(x, axis=1)
    u = x / r[:, None]
    i, j = pair_indices(n)
    return np.concatenate([r, (u @ u.T)[i, j]])


def test_pair_index_matches_pair_indices():
    i, j = pair_indices(6)
    for k, (a, b) in enumerate(zip(i, j)):
        assert pair_index(a, b, 6) == k
        assert pair_index(b, a, 6) == k


def test_vector_round_trip():
    c, _ = random_coords(5)
    back = InternalCoordinates.from_vector(c.to_vector(), 5)
    np.testing.assert_allclose(back.gammas, c.gammas)


def test_pair_distances_match_cartesian():
    c, x = random_coords(4)
    i, j = pair_indices(4)
    np.testing.assert_allclose(c.pair_distances(), np.linalg.norm(x[i] - x[j], axis=1))


def test_gramian_inverse_diagonal_symmetric_closed_form():
    n, g = 5, 0.2
    gam = np.full((n, n), g)
    np.fill_diagonal(gam, 1)
    np.testing.assert_allclose(gramian_inverse_diagonal(gam), np.diag(np.linalg.inv(gam)))


def test_singular_gramian_raises():
    gam = np.ones((3, 3))
    with pytest.raises(GramianError):
        gramian_inverse_diagonal(gam)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_kinetic_metric_matches_cartesian_jacobian(n):
    _, x = random_coords(n, seed=n)
    c = InternalCoordinates(np.linalg.norm(x, axis=1),
                            np.clip((x / np.linalg.norm(x, axis=1)[:, None])
                                    @ (x / np.linalg.norm(x, axis=1)[:, None]).T, -1, 1))
    h = 1e-6
    q0 = internal_of(x)
    jac = np.zeros((q0.size, x.size))
    for k in range(x.size):
        dx = np.zeros(x.size)
        dx[k] = h
        jac[:, k] = (internal_of(x + dx.reshape(x.shape)) - internal_of(x - dx.reshape(x.shape))) / (2 * h)
    np.testing.assert_allclose(kinetic_metric(c), jac @ jac.T, atol=1e-7)


@pytest.mark.parametrize("model", [NonInteracting(), HarmonicPair(0.2), SquareWellContinued(0.05, 5.0)])
def test_potential_derivatives_match_finite_differences(model):
    n = 4
    spec = SystemSpec.balanced(n, model)
    c = InternalCoordinates.symmetric(n, 1.1, -0.05)
    q = c.to_vector()
    q[0] *= 1.05
    q[n + 1] += 0.03
    c = InternalCoordinates.from_vector(q, n)
    v, g, hmat = effective_potential_derivatives(c, model, spec)
    assert v == pytest.approx(effective_potential(c, model, spec))
    h = 1e-5

    def f(qq):
        return effective_potential(InternalCoordinates.from_vector(qq, n), model, spec)

    def grad(qq):
        return effective_potential_derivatives(InternalCoordinates.from_vector(qq, n), model, spec)[1]

    for k in range(q.size):
        e = np.zeros(q.size)
        e[k] = h
        assert g[k] == pytest.approx((f(q + e) - f(q - e)) / (2 * h), rel=1e-6, abs=1e-7)
        np.testing.assert_allclose(hmat[:, k], (grad(q + e) - grad(q - e)) / (2 * h), rtol=1e-5, atol=1e-6)


def test_leading_centrifugal_coefficient():
    c, _ = random_coords(4, seed=3)
    u2, _, _ = centrifugal_coefficients(c)
    assert u2 == pytest.approx(np.sum(gramian_inverse_diagonal(c.gammas) / c.radii**2) / 8)


def test_restricted_potential_matches_full_on_symmetric_slice():
    model = unitary_well(0.01)
    spec = SystemSpec.balanced(6, model)
    w = spec.pair_weight()
    for r, g in [(1.0, 0.0), (1.2, -0.1), (0.9, 0.15)]:
        v, _, _ = restricted_potential(r, g, 6, model, w)
        assert v == pytest.approx(effective_potential(InternalCoordinates.symmetric(6, r, g), model, spec))


@pytest.mark.parametrize("n", [2, 3, 10, 30])
def test_ideal_gas_minimum(n):
    m = find_symmetric_minimum(NonInteracting(), SystemSpec.balanced(n))
    assert m.r_infinity == pytest.approx(1.0, abs=1e-10)
    assert m.gamma_infinity == pytest.approx(0.0, abs=1e-10)
    assert m.e_infinity == pytest.approx(n)


def test_harmonic_pair_minimum_is_stationary_on_slice():
    n, lam = 5, 0.1
    m = find_symmetric_minimum(HarmonicPair(lam), SystemSpec.balanced(n, HarmonicPair(lam)))
    h = 1e-6

    def v(r, g):
        return restricted_potential(r, g, n, HarmonicPair(lam), 1.0)[0]

    r, g = m.r_infinity, m.gamma_infinity
    assert (v(r + h, g) - v(r - h, g)) / (2 * h) == pytest.approx(0, abs=1e-7)
    assert (v(r, g + h) - v(r, g - h)) / (2 * h) == pytest.approx(0, abs=1e-7)
    assert v(r * 1.01, g) > m.e_infinity and v(r, g + 0.01) > m.e_infinity
    # attraction pulls the particles in
    assert r < 1.0


def test_unitary_minimum_is_interior_and_stationary():
    model = unitary_well(0.01)
    spec = SystemSpec.balanced(12, model)
    m = find_symmetric_minimum(model, spec)
    assert -1 / 11 < m.gamma_infinity < 0
    _, g, _ = effective_potential_derivatives(m.coordinates(), model, spec)
    assert np.max(np.abs(g)) < 1e-8
    assert SymmetricMinimum.from_dict(m.as_dict()) == m


def test_single_particle_rejected():
    with pytest.raises(ValueError):
        find_symmetric_minimum(NonInteracting(), SystemSpec(1, 0))
