"""Seeded noisy-arc scenarios for the estimator comparison harness.

Points are placed at uniform angular steps along an arc of the true circle
and displaced by offsets drawn uniformly from a disc whose radius is a
fraction of the circle radius. Each trial gets its own RNG stream derived
from (seed, trial index), so trials can run in any order or in parallel
without changing the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fit import Circle

__all__ = ["SimScenario", "trial_points"]


@dataclass(frozen=True)
class SimScenario:
    arc_span_deg: float = 72.0
    radius: float = 1.0
    n_points: int = 1000
    noise_amp: float = 0.1
    trials: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.arc_span_deg <= 360.0:
            raise ValueError("arc span must be in (0, 360] degrees")
        if self.radius <= 0.0 or self.noise_amp < 0.0:
            raise ValueError("radius must be positive, noise nonnegative")
        if self.n_points < 1 or self.trials < 1:
            raise ValueError("need at least one point and one trial")

    @property
    def truth(self) -> Circle:
        return Circle(0.0, 0.0, self.radius)


def _rng(scenario: SimScenario, trial: int) -> np.random.Generator:
    # PCG64 streams keyed by (seed, trial) are platform independent.
    seq = np.random.SeedSequence(entropy=scenario.seed, spawn_key=(trial,))
    return np.random.Generator(np.random.PCG64(seq))


def trial_points(scenario: SimScenario, trial: int) -> np.ndarray:
    """(n, 2) noisy points of one trial. Deterministic in (seed, trial)."""
    rng = _rng(scenario, trial)
    span = math.radians(scenario.arc_span_deg)
    theta0 = rng.uniform(0.0, 2.0 * math.pi)
    angles = theta0 + np.linspace(0.0, span, scenario.n_points)
    base = scenario.radius * np.column_stack((np.cos(angles), np.sin(angles)))
    rho = scenario.noise_amp * scenario.radius * np.sqrt(
        rng.uniform(size=scenario.n_points))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=scenario.n_points)
    return base + np.column_stack((rho * np.cos(phi), rho * np.sin(phi)))
