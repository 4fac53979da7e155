"""Homodyne detection of a light quadrature and the conditional Gaussian update."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, MeasurementError, ModeError
from .gaussian import GaussianState, ModeKind, ModeLabel, symmetrize

#: relative singular-value cutoff of the support inverse
SUPPORT_RCOND = 1e-12

# (x, p) -> (p, -x); lets a p measurement reuse the x formula
_EXCHANGE = np.array([[0.0, 1.0], [-1.0, 0.0]])


class Quadrature(str, enum.Enum):
    X = "x"
    P = "p"


@dataclass(frozen=True)
class OutcomePolicy:
    """Either a fixed outcome ``value`` or a seeded Gaussian draw."""

    value: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if (self.value is None) == (self.seed is None):
            raise ValueError("exactly one of value / seed must be given")
        if self.value is not None and not math.isfinite(self.value):
            raise ValueError(f"fixed outcome must be finite, got {self.value}")

    @classmethod
    def fixed(cls, value: float) -> "OutcomePolicy":
        return cls(value=float(value))

    @classmethod
    def sampled(cls, seed: int) -> "OutcomePolicy":
        return cls(seed=int(seed))

    @property
    def is_sampled(self) -> bool:
        return self.seed is not None

    def draw(self, mean: float, variance: float, step_index: int) -> float:
        if not self.is_sampled:
            return self.value
        rng = np.random.default_rng(
            np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF, step_index])
        )
        return float(rng.normal(mean, math.sqrt(max(variance, 0.0))))


@dataclass(frozen=True)
class MeasurementRecord:
    measured_mode: str
    quadrature: Quadrature
    outcome: float
    step_index: int

    def as_dict(self) -> dict:
        return {
            "measured_mode": self.measured_mode,
            "quadrature": Quadrature(self.quadrature).value,
            "outcome": self.outcome,
            "step_index": self.step_index,
        }


def _support_pinv(M: np.ndarray) -> np.ndarray:
    return np.linalg.pinv(M, rcond=SUPPORT_RCOND)


def conditional_update(gammaA, gammaL, C, quad="x", outcome: float = 0.0):
    """Schur-complement update after measuring one quadrature of the light mode.

    ``gammaA`` is the covariance of the unmeasured modes, ``gammaL`` the 2x2
    block of the measured mode and ``C`` their cross-correlations. Returns the
    conditional covariance ``gammaA - C (X gammaL X)^+ C^T`` and the
    displacement shift ``C (X gammaL X)^+ (outcome, 0)``, where ``X`` projects
    onto the measured quadrature and ``^+`` is the inverse on the support.
    ``outcome`` is measured relative to the mode's prior mean.
    """
    gammaA = np.asarray(gammaA, dtype=float)
    gammaL = np.asarray(gammaL, dtype=float)
    C = np.asarray(C, dtype=float)
    if gammaL.shape != (2, 2) or C.shape != (gammaA.shape[0], 2):
        raise DimensionError(
            f"inconsistent blocks: gammaA {gammaA.shape}, gammaL {gammaL.shape}, C {C.shape}"
        )
    if Quadrature(quad) is Quadrature.P:
        gammaL = _EXCHANGE @ gammaL @ _EXCHANGE.T
        C = C @ _EXCHANGE.T

    X = np.diag([1.0, 0.0])
    M = X @ gammaL @ X
    if M[0, 0] <= SUPPORT_RCOND * max(1.0, float(np.max(np.abs(gammaL)))):
        if np.any(np.abs(C[:, 0]) > 0):
            raise MeasurementError(
                "measured quadrature has vanishing variance but non-zero correlations"
            )
    M_inv = _support_pinv(M)
    gain = C @ M_inv
    cov = symmetrize(gammaA - gain @ C.T)
    shift = gain @ np.array([outcome, 0.0])
    return cov, shift


def measure_homodyne(
    s: GaussianState,
    beam: ModeLabel | str,
    quad: Quadrature | str,
    policy: OutcomePolicy,
    step_index: int = 0,
) -> tuple[GaussianState, MeasurementRecord]:
    """Measure quadrature ``quad`` of light mode ``beam`` and trace it out."""
    quad = Quadrature(quad)
    beam_id = beam.id if isinstance(beam, ModeLabel) else beam
    label = s.label(beam_id)
    if label.kind is not ModeKind.LIGHT:
        raise ModeError(f"mode {beam_id!r} is atomic; only light modes can be measured")
    if s.n_modes < 2:
        raise ModeError("measuring the only mode would leave an empty state")

    rest = [m for m in s.ids if m != beam_id]
    a_idx = s.quadrature_indices(rest)
    l_idx = s.quadrature_indices([beam_id])
    gammaA = s.cov[np.ix_(a_idx, a_idx)]
    gammaL = s.cov[np.ix_(l_idx, l_idx)]
    C = s.cov[np.ix_(a_idx, l_idx)]
    dA = s.disp[a_idx]
    dL = s.disp[l_idx]

    k = 0 if quad is Quadrature.X else 1
    # ħ units: the measured quadrature has variance gamma_kk / 2
    outcome = policy.draw(float(dL[k]), 0.5 * float(gammaL[k, k]), step_index)
    # the exchange maps p -> x, so the p outcome enters unchanged
    cov, shift = conditional_update(gammaA, gammaL, C, quad, outcome - float(dL[k]))

    modes = tuple(s.label(m) for m in rest)
    record = MeasurementRecord(beam_id, quad, outcome, step_index)
    return GaussianState(modes, cov, dA + shift), record
