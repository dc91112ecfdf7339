"""Band-limited luminance noise that induces hippus.

The perturbation is a seeded bank of sinusoids with in-band frequencies and
random phases. Amplitudes are normalised so their sum stays below the bound,
which makes the bound hold for every t, not just statistically.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class HippusGenerator:
    """Deterministic luminance perturbation source.

    Parameters
    ----------
    seed : int
        Seed for the component frequencies, phases and amplitudes.
    band_low, band_high : float
        Frequency band in Hz.
    log_amplitude_bound : float
        The perturbation stays within ``±10**log_amplitude_bound`` blondels.
    n_components : int
        Number of sinusoids in the bank.
    """

    seed: int = 0
    band_low: float = 0.05
    band_high: float = 0.3
    log_amplitude_bound: float = 0.3
    n_components: int = 8
    frequencies: np.ndarray = field(init=False, repr=False)
    phases: np.ndarray = field(init=False, repr=False)
    amplitudes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.band_low < self.band_high:
            raise ValueError("need 0 < band_low < band_high")
        if self.n_components < 1:
            raise ValueError("need at least one component")
        rng = np.random.default_rng(self.seed)
        freqs = rng.uniform(self.band_low, self.band_high, self.n_components)
        phases = rng.uniform(0.0, 2.0 * np.pi, self.n_components)
        weights = rng.uniform(0.5, 1.0, self.n_components)
        # shave a hair off so rounding in the sum cannot breach the bound
        amps = weights * (self.amplitude_bound * (1.0 - 1e-9) / weights.sum())
        for name, value in (("frequencies", freqs), ("phases", phases),
                            ("amplitudes", amps)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def amplitude_bound(self):
        return 10.0 ** self.log_amplitude_bound


def hippus_perturbation(generator, t_ms):
    """Luminance offset in blondels at time `t_ms` (scalar or array)."""
    t = np.asarray(t_ms, dtype=float)
    if np.any(t < 0):
        raise ValueError("hippus is defined for t >= 0 only")
    t_s = t[..., None] / 1000.0
    out = (generator.amplitudes
           * np.sin(2.0 * np.pi * generator.frequencies * t_s + generator.phases)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out
