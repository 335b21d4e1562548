import math

import numpy as np
import pytest

from rtq.bogoliubov import validate_identities
from rtq.errors import NonResonantError, PerturbativeValidityWarning
from rtq.gw_scenario import (
    GWScenario,
    gw_coefficient,
    gw_efficiency,
    gw_transform,
    xi_parameter,
)


@pytest.mark.parametrize(
    "temperature, length, speed, expected",
    [
        (10e-9, 1e-6, 1e-2, 0.041673238272189134),
        (10e-9, 1e-3, 299792458.0, 1.3900696e-9),
        (0.0, 1e-6, 1e-3, 0.0),
    ],
)
def test_xi_parameter(temperature, length, speed, expected):
    assert xi_parameter(temperature, length, speed).xi == pytest.approx(expected, rel=1e-7)


def test_xi_parameter_rejects_bad_units():
    with pytest.raises(ValueError):
        xi_parameter(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        xi_parameter(1e-9, 1.0, 0.0)


def test_pair_creation_coefficient():
    # beta_12 at epsilon = 0.01, tau = 10
    assert 0.01 * gw_coefficient((1, 2), 10.0) == pytest.approx(0.11107, abs=1e-5)


def test_transform_structure():
    scenario = GWScenario(epsilon=1e-3, tau=20.0, pair=(1, 3))
    series = gw_transform(scenario, n_modes=4)
    assert series.h == 1e-3
    assert series.beta1[0, 2] == series.beta1[2, 0] == pytest.approx(math.pi / 4 * math.sqrt(3) * 20)
    assert np.count_nonzero(series.beta1) == 2
    assert validate_identities(series).passed


def test_non_resonant_drive():
    with pytest.raises(NonResonantError):
        gw_transform(GWScenario(epsilon=1e-4, tau=5.0, pair=(1, 2), omega_drive=4.0))


def test_large_strain_time_product_warns():
    with pytest.warns(PerturbativeValidityWarning):
        gw_transform(GWScenario(epsilon=1e-2, tau=50.0, pair=(1, 2)))


@pytest.mark.parametrize("pair", [(1, 1), (0, 2), (1, 2, 3)])
def test_invalid_pairs(pair):
    with pytest.raises(ValueError):
        GWScenario(epsilon=1e-4, tau=1.0, pair=pair)


def test_document_units():
    scenario = GWScenario.from_document(
        {"epsilon": 1e-4, "tau": 5, "pair": [1, 2], "temperature_nK": 10, "length_um": 1, "sound_speed_mps": 1e-2}
    )
    assert scenario.kappa == 3
    assert scenario.xi == pytest.approx(0.041673238272189134, rel=1e-12)


@pytest.mark.parametrize("family", ["passive", "sms"])
@pytest.mark.parametrize("xi, kappa", [(0.0, 3), (0.1, 3), (0.5, 7)])
def test_closed_form_efficiency(family, xi, kappa):
    assert gw_efficiency(xi, kappa, family) == pytest.approx(1 - xi / kappa, abs=1e-15)


def test_efficiency_argument_checks():
    with pytest.raises(ValueError):
        gw_efficiency(0.1, 1)
    with pytest.raises(ValueError):
        gw_efficiency(0.1, 3, "tms")
