import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blendsem.errors import InadmissibleStateError, NonPositiveDensityError
from blendsem.physics import (
    GasModel,
    entropy_density,
    is_admissible,
    max_wave_speed,
    physical_flux,
    pressure,
    primitives,
    state,
)


def test_gamma_must_exceed_one():
    with pytest.raises(ValueError):
        GasModel(1.0)


@pytest.mark.parametrize("u, p", [
    ([1.0, 0.0, 0.0, 2.5], 1.0),
    ([2.0, 2.0, 0.0, 3.0], 0.8),
    ([1.0, 0.0, 0.0, 0.0], 0.0),
])
def test_pressure_examples(gas, u, p):
    assert pressure(np.array(u), gas) == pytest.approx(p, abs=1e-15)


def test_zero_internal_energy_is_inadmissible(gas):
    assert not is_admissible(np.array([1.0, 0.0, 0.0, 0.0]), gas)


def test_pressure_rejects_nonpositive_density(gas):
    with pytest.raises(NonPositiveDensityError):
        pressure(np.array([0.0, 0.0, 0.0, 1.0]), gas)


def test_flux_rest_state(gas):
    u = state(1.0, 0.0, 0.0, 1.0, gas)
    np.testing.assert_allclose(physical_flux(u, gas, 0), [0.0, 1.0, 0.0, 0.0], atol=1e-15)


def test_flux_moving_state(gas):
    u = state(1.0, 1.0, 0.0, 1.0, gas)
    assert u[3] == pytest.approx(3.0)
    np.testing.assert_allclose(physical_flux(u, gas, 0), [1.0, 2.0, 0.0, 4.0], atol=1e-14)


def test_flux_rotation(gas, rng):
    for _ in range(20):
        rho, a, b, p = rng.uniform(0.2, 2), rng.normal(), rng.normal(), rng.uniform(0.2, 2)
        fx = physical_flux(state(rho, a, b, p, gas), gas, 0)
        fy = physical_flux(state(rho, b, a, p, gas), gas, 1)
        np.testing.assert_allclose(fy[[0, 2, 1, 3]], fx, atol=1e-14)


def test_flux_rejects_inadmissible(gas):
    with pytest.raises(InadmissibleStateError):
        physical_flux(np.array([1.0, 0.0, 0.0, -1.0]), gas, 0)


def test_wave_speeds(gas):
    assert max_wave_speed(state(1, 0, 0, 1, gas), gas, 0) == pytest.approx(1.18322, abs=1e-5)
    assert max_wave_speed(state(1, 2, 0, 1, gas), gas, 0) == pytest.approx(2 + math.sqrt(1.4))
    assert max_wave_speed(state(4, 0, 0, 1, gas), gas, 1) == pytest.approx(0.59161, abs=1e-5)


def test_entropy_density_examples(gas):
    assert entropy_density(state(1, 0, 0, 1, gas), gas) == pytest.approx(0.0, abs=1e-15)
    assert entropy_density(state(1, 0, 0, math.e, gas), gas) == pytest.approx(-2.5, abs=1e-14)


def test_entropy_ignores_bulk_velocity(gas):
    base = entropy_density(state(1.3, 0, 0, 0.7, gas), gas)
    moving = entropy_density(state(1.3, 2.0, -1.0, 0.7, gas), gas)
    assert moving == pytest.approx(base, abs=1e-14)


@given(rho=st.floats(1e-3, 1e3), v1=st.floats(-50, 50), v2=st.floats(-50, 50),
       p=st.floats(1e-3, 1e3))
def test_primitive_round_trip(rho, v1, v2, p):
    gas = GasModel()
    u = state(rho, v1, v2, p, gas)
    r, a, b, q = primitives(u, gas)
    assert r == rho
    assert a == pytest.approx(v1, rel=1e-13, abs=1e-13)
    assert b == pytest.approx(v2, rel=1e-13, abs=1e-13)
    # cancellation in rho E - |m|^2 / 2 rho scales with the kinetic/internal ratio
    scale = 1.0 + 0.5 * rho * (v1**2 + v2**2) * (gas.gamma - 1.0) / p
    assert q == pytest.approx(p, rel=1e-13 * scale)
