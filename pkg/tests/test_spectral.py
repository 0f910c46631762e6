import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hedonic_eq import (MarketInstance, SpectralInstance, ValidationError, concentration_specialization,
                        jacobi_eigh, ranking_condition, spectral_outputs, spectral_welfares)
from hedonic_eq.spectral import spectral_weights, sufficiency_polynomials


def conc_instance(alpha, gamma):
    n = len(gamma)
    return SpectralInstance(alpha + np.asarray(gamma, dtype=float), alpha * np.ones((n, n)) + np.eye(n))


@st.composite
def spectral_instances(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    n = draw(st.integers(1, 8))
    m = draw(st.integers(1, 4))
    A = rng.normal(size=(m, n))
    A /= np.linalg.norm(A, axis=0)
    S = np.eye(n) + draw(st.floats(0.05, 10.0)) * A.T @ A
    return SpectralInstance(rng.uniform(0.05, 3.0, size=n), S)


class TestValidation:
    @pytest.mark.parametrize("psi, sigma, field", [
        ([1.0, -1.0], np.eye(2) * 2, "psi"),
        ([1.0, 1.0], [[2.0, 0.5], [0.4, 2.0]], "sigma"),
        ([1.0, 1.0], [[2.0, 0.0], [0.0, 3.0]], "sigma"),
        ([1.0, 1.0], np.eye(2), "sigma"),
        ([1.0, 1.0], [[2.0, 3.0], [3.0, 2.0]], "sigma"),
        ([1.0], np.eye(2) * 2, "sigma"),
    ])
    def test_rejects(self, psi, sigma, field):
        with pytest.raises(ValidationError) as e:
            SpectralInstance(psi, sigma)
        assert e.value.field == field

    def test_round_trip(self):
        si = conc_instance(1.0, [0.3, 0.2])
        again = SpectralInstance.from_json('{"psi": %s, "sigma": %s}' % (si.psi.tolist(), si.sigma.tolist()))
        assert np.array_equal(again.psi, si.psi) and np.array_equal(again.sigma, si.sigma)
        with pytest.raises(ValidationError):
            SpectralInstance.from_json("[1, 2]")


class TestOutputs:
    def test_scalar_sigma(self):
        si = SpectralInstance([1.0, 1.0], 2 * np.eye(2))
        qp, qm, qc = spectral_outputs(si)
        assert np.allclose(qp, 0.5) and np.allclose(qc, qm)
        wp, wm, wc = spectral_welfares(si)
        assert wp == pytest.approx(0.5) and wm == pytest.approx(0.375)
        rep = ranking_condition(si)
        assert rep.verdict == "tie" and rep.k == 0

    def test_concentration_outputs(self):
        si = conc_instance(1.0, [0.3, 0.3])
        assert np.allclose(spectral_outputs(si)[2], 0.26, atol=1e-14)

    def test_from_market_matches_concentration(self):
        inst = MarketInstance(1.0, [0.0, 1.0], [0.3, 0.2])
        si = SpectralInstance.from_market(inst, np.outer(inst.beta, np.ones(2)))
        ref = conc_instance(1.0, [0.3, 0.2])
        assert np.allclose(si.psi, ref.psi) and np.allclose(si.sigma, ref.sigma)

    def test_major_component_favours_oligopoly(self):
        n, a = 4, 0.7
        psi = np.full(n, 1 / np.sqrt(n))  # top eigenvector of alpha J + I
        rep = ranking_condition(SpectralInstance(psi, a * np.ones((n, n)) + np.eye(n)))
        assert rep.verdict == "oligopoly" and rep.minor == pytest.approx(0.0, abs=1e-20)


class TestJacobi:
    def test_matches_numpy(self):
        rng = np.random.default_rng(0)
        B = rng.normal(size=(6, 6))
        S = B + B.T
        lam, U = jacobi_eigh(S)
        assert np.allclose(lam, np.sort(np.linalg.eigvalsh(S))[::-1], atol=1e-12)
        assert np.abs(S @ U - U * lam).max() <= 1e-10

    def test_diagonal_and_scalar(self):
        lam, U = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
        assert lam.tolist() == [3.0, 2.0, 1.0]
        lam, U = jacobi_eigh([[5.0]])
        assert lam.tolist() == [5.0] and U.tolist() == [[1.0]]

    def test_tiny_off_diagonal(self):
        lam, U = jacobi_eigh([[1.0, 1e-200], [1e-200, 2.0]])
        assert lam == pytest.approx([2.0, 1.0])


class TestSpecialization:
    def test_eigen_structure(self):
        n, a = 3, 0.5
        g = np.array([0.1, 0.25, 0.4])
        rep = ranking_condition(conc_instance(a, g))
        assert rep.eigenvalues[0] == pytest.approx(1 + n * a)
        assert np.allclose(rep.eigenvalues[1:], 1.0)
        assert rep.k == 1 and rep.eigenvalues.sum() == pytest.approx(n * (1 + a))
        assert rep.projections[1:].sum() == pytest.approx(n * np.var(g), abs=1e-14)

    def test_equal_gamma(self):
        r = concentration_specialization(3, 1.0, 0.2)
        assert r.right == pytest.approx(0.0, abs=1e-30) and r.verdict == "oligopoly"

    def test_cross_check(self):
        g = [0.9, 0.05]
        spec = concentration_specialization(2, 1.0, g)
        assert spec.verdict == ranking_condition(conc_instance(1.0, g)).verdict

    def test_sufficiency_polynomials(self):
        f, g = sufficiency_polynomials(2, 100.0)
        assert f > g
        f, g = sufficiency_polynomials(2, 0.1)
        assert f < g

    def test_closed_form_equals_direct_gap(self):
        # the two sides of the inequality are a rescaling of the welfare gap
        g = np.array([0.2, 0.05, 0.3])
        spec = concentration_specialization(3, 0.8, g)
        rep = ranking_condition(conc_instance(0.8, g))
        assert np.sign(spec.left - spec.right) == np.sign(rep.direct_gap)


@given(spectral_instances())
def test_eigen_invariants(si):
    rep = ranking_condition(si)
    U, lam = rep.eigenvectors, rep.eigenvalues
    assert np.max(np.linalg.norm(si.sigma @ U - U * lam, axis=0)) <= 1e-8
    assert np.abs(U.T @ U - np.eye(si.n)).max() <= 1e-9
    assert np.trace(si.sigma) == pytest.approx(si.n * si.lam_bar, abs=1e-9)


@given(spectral_instances())
def test_identity_and_bounds(si):
    rep = ranking_condition(si)
    assert rep.direct_gap == pytest.approx(rep.identity_gap, abs=1e-9)
    assert rep.welfare_cournot <= rep.welfare_planner + 1e-12
    assert rep.welfare_monopoly == pytest.approx(0.75 * rep.welfare_planner, rel=1e-10)
    assert np.abs(si.sigma @ rep.q_planner - si.psi).max() <= 1e-10
    want = {1: "oligopoly", -1: "monopoly"}.get(int(np.sign(rep.major - rep.minor)), "tie")
    assert rep.verdict == want


@given(spectral_instances(), st.integers(0, 2**32 - 1))
def test_verdict_ignores_basis_within_eigenspaces(si, seed):
    rng = np.random.default_rng(seed)
    rep = ranking_condition(si)
    lam, U = rep.eigenvalues, rep.eigenvectors.copy()
    # rotate inside each cluster of (numerically) repeated eigenvalues
    start = 0
    while start < si.n:
        stop = start + 1
        while stop < si.n and abs(lam[stop] - lam[start]) <= 1e-9 * max(1.0, abs(lam[start])):
            stop += 1
        if stop - start > 1:
            Q, _ = np.linalg.qr(rng.normal(size=(stop - start, stop - start)))
            U[:, start:stop] = U[:, start:stop] @ Q
        start = stop
    proj = (U.T @ si.psi) ** 2
    w = np.abs(spectral_weights(lam, si.lam_bar))
    assert w[:rep.k] @ proj[:rep.k] == pytest.approx(rep.major, rel=1e-9, abs=1e-12)
    assert w[rep.k:] @ proj[rep.k:] == pytest.approx(rep.minor, rel=1e-9, abs=1e-12)


@given(st.integers(2, 8), st.floats(0.01, 20.0), st.integers(0, 2**32 - 1))
def test_specialization_matches_generic(n, a, seed):
    rng = np.random.default_rng(seed)
    g = rng.dirichlet(np.ones(n)) * rng.uniform(0.01, 1.0)
    spec = concentration_specialization(n, a, g)
    rep = ranking_condition(conc_instance(a, g))
    assert spec.verdict == rep.verdict
