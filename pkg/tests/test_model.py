import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hedonic_eq import (Allocation, CharProfile, MarketInstance, ValidationError, aggregate_profit,
                        demand_system, firm_profit, markup, markups, price_report, total_surplus)
from hedonic_eq.model import surplus

from conftest import SQ3


def rot(theta):
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])


def angles(*th):
    return np.array([[np.cos(t) for t in th], [np.sin(t) for t in th]])


class TestValidation:
    def test_beta_norm(self):
        with pytest.raises(ValidationError) as e:
            MarketInstance(1.0, [1.0, 1.0], [1.0, 1.0])
        assert e.value.field == "beta"

    def test_beta_norm_tolerance(self):
        MarketInstance(1.0, [1.0 + 5e-11, 0.0], [1.0])
        with pytest.raises(ValidationError):
            MarketInstance(1.0, [1.0 + 1e-9, 0.0], [1.0])

    @pytest.mark.parametrize("gamma", [[1.0, 0.0], [1.0, -2.0], [np.nan, 1.0]])
    def test_gamma_positive(self, gamma):
        with pytest.raises(ValidationError) as e:
            MarketInstance(1.0, [0.0, 1.0], gamma)
        assert e.value.field == "gamma"

    @pytest.mark.parametrize("alpha", [0.0, -1.0, np.inf])
    def test_alpha(self, alpha):
        with pytest.raises(ValidationError):
            MarketInstance(alpha, [0.0, 1.0], [1.0])

    def test_network_checks(self):
        base = dict(alpha=1.0, beta=[0.0, 1.0], gamma=[1.0, 1.0])
        MarketInstance(**base, network=[[0, 0.5], [0.5, 0]])
        for bad in ([[0, 0.5], [0.4, 0]], [[0.1, 0.5], [0.5, 0]], [[0, 1.0], [1.0, 0]], [[0]]):
            with pytest.raises(ValidationError) as e:
                MarketInstance(**base, network=bad)
            assert e.value.field == "network"

    def test_negative_network_allowed(self):
        MarketInstance(1.0, [0.0, 1.0], [1.0, 1.0], network=[[0, -0.9], [-0.9, 0]])

    def test_ownership_checks(self):
        base = dict(alpha=1.0, beta=[0.0, 1.0], gamma=[1.0, 1.0])
        MarketInstance(**base, ownership=[[1, 0.3], [0.1, 1]])
        for bad in ([[1, -0.1], [0, 1]], [[0.9, 0], [0, 1]], [[1, 3.0], [3.0, 1]]):
            with pytest.raises(ValidationError) as e:
                MarketInstance(**base, ownership=bad)
            assert e.value.field == "ownership"

    def test_profile_unit_columns(self):
        with pytest.raises(ValidationError):
            CharProfile([[1.0, 0.5], [0.0, 0.5]])

    def test_allocation_checks(self):
        prof = CharProfile(np.eye(2))
        with pytest.raises(ValidationError):
            Allocation(prof, [1.0, -0.1])
        with pytest.raises(ValidationError):
            Allocation(prof, [1.0, 1.0, 1.0])

    def test_immutable(self, ex1):
        with pytest.raises(ValueError):
            ex1.gamma[0] = 5.0


class TestSerialization:
    def test_round_trip(self):
        inst = MarketInstance(0.7, [0.6, 0.8], [1.0, 2.0], network=[[0, 0.2], [0.2, 0]],
                              ownership=[[1, 0.5], [0.5, 1]])
        again = MarketInstance.from_json(inst.to_json())
        assert again == inst
        assert json.loads(inst.to_json())["n"] == 2

    def test_declared_sizes(self):
        with pytest.raises(ValidationError) as e:
            MarketInstance.from_dict({"n": 3, "alpha": 1, "beta": [1, 0], "gamma": [1, 1]})
        assert e.value.field == "n"

    def test_unknown_and_missing_keys(self):
        with pytest.raises(ValidationError):
            MarketInstance.from_dict({"alpha": 1, "beta": [1], "gamma": [1], "W": 0})
        with pytest.raises(ValidationError) as e:
            MarketInstance.from_dict({"alpha": 1, "beta": [1]})
        assert e.value.field == "gamma"

    def test_malformed_json(self):
        with pytest.raises(ValidationError):
            MarketInstance.from_json("{alpha: 1")

    def test_profile_csv(self):
        text = CharProfile(angles(0.0, np.pi / 2)).to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "firm1,firm2"
        assert lines[1].split(",")[0] == "1"


class TestMarkup:
    def test_differentiation_markup(self, ex1):
        q = np.array([2 / 3, 1 / SQ3])
        # any profile with A q = beta
        from hedonic_eq import construct_profile
        alloc = Allocation(construct_profile(q, ex1.beta), q)
        assert markup(ex1, alloc, 0) == pytest.approx(4 / 3, abs=1e-12)
        assert firm_profit(ex1, alloc, 0) == pytest.approx(8 / 9, abs=1e-12)

    def test_zero_output(self, ex1):
        A = angles(0.3, 2.0)
        alloc = Allocation.from_arrays(A, [0.0, 0.0])
        expected = A.T @ ex1.beta + ex1.gamma
        assert np.allclose(markups(ex1, alloc), expected, atol=1e-14)
        assert firm_profit(ex1, alloc, 1) == 0.0
        assert total_surplus(ex1, alloc) == 0.0

    def test_hand_case(self, ex1):
        A = np.array([[0.0, 0.0], [1.0, 1.0]])
        alloc = Allocation.from_arrays(A, [0.5, 0.5])
        assert markup(ex1, alloc, 0) == pytest.approx(1.5, abs=1e-14)
        assert firm_profit(ex1, alloc, 0) == pytest.approx(0.75, abs=1e-14)
        # cross-check through inverse demand: intercept - Sigma q
        intercept, S = demand_system(ex1, alloc.profile)
        assert np.allclose(markups(ex1, alloc), intercept - S @ alloc.q, atol=1e-14)

    def test_index_errors(self, ex1):
        alloc = Allocation.from_arrays(np.eye(2), [0.1, 0.1])
        with pytest.raises(IndexError):
            markup(ex1, alloc, 2)
        with pytest.raises(IndexError):
            firm_profit(ex1, alloc, -1)


class TestSurplus:
    def test_planner_value(self, ex1):
        from hedonic_eq import construct_profile
        alloc = Allocation(construct_profile(ex1.gamma, ex1.beta), ex1.gamma)
        assert total_surplus(ex1, alloc) == pytest.approx(4.0, abs=1e-12)
        half = Allocation(alloc.profile, ex1.gamma / 2)
        assert total_surplus(ex1, half) == pytest.approx(3.0, abs=1e-12)

    def test_planner_value_by_grid(self, ex1):
        # for fixed q the best x has length clip(1, r, R); search q on a grid
        best = -np.inf
        for q1 in np.linspace(1.5, 2.5, 101):
            for q2 in np.linspace(1.2, 2.2, 101):
                q = np.array([q1, q2])
                rho = np.clip(1.0, abs(q1 - q2), q1 + q2)
                best = max(best, rho - 0.5 * rho * rho + ex1.gamma @ q - 0.5 * q @ q)
        assert best <= 4.0 + 1e-12
        assert best == pytest.approx(4.0, abs=1e-4)

    def test_demand_system_examples(self):
        inst = MarketInstance(1.0, [0.0, 1.0], [1.0, 1.0])
        _, S = demand_system(inst, CharProfile([[0.0, 0.0], [1.0, 1.0]]))
        assert np.allclose(S, [[2, 1], [1, 2]])
        _, S = demand_system(inst, CharProfile(angles(np.pi / 6, np.pi)))
        assert S[0, 1] == pytest.approx(-SQ3 / 2, abs=1e-12)

    def test_price_report(self, ex1):
        alloc = Allocation.from_arrays(angles(0.2, 1.1), [0.4, 0.9])
        rep = price_report(ex1, alloc)
        assert rep.aggregate_profit == pytest.approx(rep.profits.sum(), abs=1e-12)
        assert rep.consumer_surplus >= 0


@st.composite
def market_and_allocation(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 4))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    alpha = draw(st.floats(0.05, 20.0))
    beta = rng.normal(size=m)
    beta /= np.linalg.norm(beta)
    gamma = rng.uniform(0.01, 5.0, size=n)
    A = rng.normal(size=(m, n))
    A /= np.linalg.norm(A, axis=0)
    q = rng.uniform(0.0, 3.0, size=n)
    return MarketInstance(alpha, beta, gamma), Allocation.from_arrays(A, q), rng


@given(market_and_allocation())
def test_profit_identity(data):
    inst, alloc, _ = data
    intercept, S = demand_system(inst, alloc.profile)
    q = alloc.q
    direct = q @ intercept - q @ S @ q
    assert markups(inst, alloc) @ q == pytest.approx(aggregate_profit(inst, alloc), abs=1e-8)
    assert aggregate_profit(inst, alloc) == pytest.approx(direct, abs=1e-8)


@given(market_and_allocation())
def test_consumer_surplus_nonnegative(data):
    inst, alloc, _ = data
    _, S = demand_system(inst, alloc.profile)
    cs = total_surplus(inst, alloc) - aggregate_profit(inst, alloc)
    assert cs == pytest.approx(0.5 * alloc.q @ S @ alloc.q, abs=1e-8)
    assert cs >= -1e-8
    assert np.allclose(S, S.T)
    assert np.linalg.eigvalsh(S).min() >= 1 - 1e-8


@given(market_and_allocation())
def test_rotation_invariance(data):
    inst, alloc, rng = data
    Q, _ = np.linalg.qr(rng.normal(size=(inst.m, inst.m)))
    rotated = inst.replace(beta=Q @ inst.beta)
    moved = Allocation.from_arrays(Q @ alloc.A, alloc.q)
    assert total_surplus(rotated, moved) == pytest.approx(total_surplus(inst, alloc), abs=1e-8)
    assert np.allclose(markups(rotated, moved), markups(inst, alloc), atol=1e-8)
