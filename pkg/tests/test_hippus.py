import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plrsim.plr import HippusGenerator, hippus_perturbation

BOUND = 10 ** 0.3


def test_deterministic_in_seed_and_time():
    a = hippus_perturbation(HippusGenerator(7), 12_345.6)
    b = hippus_perturbation(HippusGenerator(7), 12_345.6)
    assert a == b
    assert hippus_perturbation(HippusGenerator(8), 12_345.6) != a


def test_bounded_over_300_s():
    t = np.arange(0.0, 300_000.0, 10.0)
    for seed in range(10):
        assert np.max(np.abs(hippus_perturbation(HippusGenerator(seed), t))) <= BOUND


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 1e7))
def test_bound_holds_anywhere(seed, t):
    assert abs(hippus_perturbation(HippusGenerator(seed), t)) <= BOUND


def test_components_in_band():
    g = HippusGenerator(3)
    assert len(g.frequencies) == 8
    assert np.all((g.frequencies >= 0.05) & (g.frequencies <= 0.3))
    assert g.amplitudes.sum() <= BOUND


def test_spectrum_confined_to_band():
    rate = 30.0
    t = np.arange(0.0, 600_000.0, 1000.0 / rate)
    x = hippus_perturbation(HippusGenerator(1), t)
    power = np.abs(np.fft.rfft(x)) ** 2
    f = np.fft.rfftfreq(len(x), 1 / rate)
    # allow one bin of leakage either side of the band edges
    df = f[1]
    inside = power[(f >= 0.05 - 2 * df) & (f <= 0.3 + 2 * df)].sum()
    assert inside / power.sum() > 0.99


def test_array_and_scalar_agree():
    g = HippusGenerator(0)
    t = np.array([0.0, 500.0, 2500.0])
    assert np.allclose(hippus_perturbation(g, t), [hippus_perturbation(g, x) for x in t], rtol=0, atol=1e-15)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        hippus_perturbation(HippusGenerator(0), -1.0)
