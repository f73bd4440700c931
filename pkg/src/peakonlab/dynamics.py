"""Right-hand sides of the two-peakon system and its reduced form.

State of the wave ansatz u(x,t) = p1 e^{-|x-q1|} + p2 e^{-|x-q2|} is the
four-vector (p1, p2, q1, q2) of momenta and positions.  The reduced
coordinates (q, h, w, z) = (q2-q1, p2-p1, p1+p2, p1*p2) close on
themselves and carry the invariant structure used by the analytic module;
the two descriptions are related by an invertible change of variables up
to the overall position q1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # avoid a runtime cycle; params imports PeakonState
    from .params import ABParams

#: relative tolerance on |p1*p2 - z| accepted silently by from_reduced
PRODUCT_CONSISTENCY_TOL = 1e-8

#: roundoff slack allowed on the q2 >= q1 orientation requirement
ORIENTATION_TOL = 1e-12


@dataclass(frozen=True)
class PeakonState:
    """Momenta and positions (p1, p2, q1, q2) of the two-peakon ansatz."""

    p1: float
    p2: float
    q1: float
    q2: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "q1", "q2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"state component {name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.q1, self.q2], dtype=float)

    @classmethod
    def from_array(cls, y) -> "PeakonState":
        return cls(p1=float(y[0]), p2=float(y[1]), q1=float(y[2]), q2=float(y[3]))


@dataclass(frozen=True)
class ReducedState:
    """Separation, momentum difference, sum and product (q, h, w, z).

    States obtained from a PeakonState satisfy h^2 + 4z = w^2 exactly up
    to roundoff; the reduced flow conserves that combination.
    """

    q: float
    h: float
    w: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.h, self.w, self.z], dtype=float)

    @classmethod
    def from_array(cls, y) -> "ReducedState":
        return cls(q=float(y[0]), h=float(y[1]), w=float(y[2]), z=float(y[3]))


@dataclass(frozen=True)
class AuxDiagnostics:
    """Derived quantities p = p2^2 - p1^2 = h*w and the product p1*p2."""

    p: float
    pprod: float


def aux_diagnostics(state: PeakonState) -> AuxDiagnostics:
    return AuxDiagnostics(p=state.p2**2 - state.p1**2, pprod=state.p1 * state.p2)


def full_rhs_array(y: np.ndarray, a: float, b: float) -> np.ndarray:
    """Time derivative of [p1, p2, q1, q2].

    Uses the convention sgn(0) = 0, which makes the field total at the
    coincidence point q1 = q2; integrations stop there via event detection
    before the convention matters.
    """
    p1, p2, q1, q2 = y
    d = abs(q1 - q2)
    e1 = math.exp(-d)
    e2 = e1 * e1
    s = math.copysign(1.0, q2 - q1) if q2 != q1 else 0.0
    pp = p1 * p2
    dq1 = (1.0 - a) * p1 * p1 + 2.0 * pp * e1 + (1.0 - 3.0 * a) * p2 * p2 * e2
    dq2 = (1.0 - a) * p2 * p2 + 2.0 * pp * e1 + (1.0 - 3.0 * a) * p1 * p1 * e2
    dp1 = (2.0 - b) * s * pp * e1 * (p1 + p2 * e1)
    dp2 = -(2.0 - b) * s * pp * e1 * (p1 * e1 + p2)
    return np.array([dp1, dp2, dq1, dq2])


def full_rhs(state: PeakonState, params: "ABParams") -> PeakonState:
    """Time derivative of the full state, packaged in the same field layout."""
    return PeakonState.from_array(full_rhs_array(state.as_array(), params.a, params.b))


def reduced_rhs_array(y: np.ndarray, a: float, b: float) -> np.ndarray:
    """Time derivative of [q, h, w, z] for the closed reduced system:

        q' = h w (1 - a - (1-3a) e^{-2q})
        h' = -(2-b) w z (1 + e^{-q}) e^{-q}
        w' = -(2-b) h z (1 - e^{-q}) e^{-q}
        z' =  (2-b) h w z e^{-2q}
    """
    q, h, w, z = y
    e1 = math.exp(-q)
    e2 = e1 * e1
    dq = h * w * ((1.0 - a) - (1.0 - 3.0 * a) * e2)
    dh = -(2.0 - b) * w * z * (1.0 + e1) * e1
    dw = -(2.0 - b) * h * z * (1.0 - e1) * e1
    dz = (2.0 - b) * h * w * z * e2
    return np.array([dq, dh, dw, dz])


def reduced_rhs(state: ReducedState, params: "ABParams") -> ReducedState:
    """Time derivative of the reduced state, same field layout."""
    return ReducedState.from_array(reduced_rhs_array(state.as_array(), params.a, params.b))


def to_reduced(state: PeakonState) -> ReducedState:
    """Change of variables (p1, p2, q1, q2) -> (q, h, w, z).

    Requires the orientation q2 >= q1 under which the reduced system is
    derived; violations at roundoff level (collision states located by
    the event solver) are tolerated.
    """
    if state.q2 < state.q1 - ORIENTATION_TOL * max(1.0, abs(state.q1)):
        raise ValueError(f"orientation q2 >= q1 violated: q1={state.q1}, q2={state.q2}")
    return ReducedState(
        q=state.q2 - state.q1,
        h=state.p2 - state.p1,
        w=state.p1 + state.p2,
        z=state.p1 * state.p2,
    )


def from_reduced(state: ReducedState, q1: float) -> PeakonState:
    """Inverse change of variables given the absolute position q1.

    Momenta come from p1 = (w-h)/2, p2 = (h+w)/2; a warning is emitted
    when the reconstructed product disagrees with the stored z, which
    happens only if the input violates h^2 + 4z = w^2.
    """
    p1 = 0.5 * (state.w - state.h)
    p2 = 0.5 * (state.h + state.w)
    mismatch = abs(p1 * p2 - state.z)
    if mismatch > PRODUCT_CONSISTENCY_TOL * max(1.0, abs(state.z)):
        warnings.warn(
            f"reduced state inconsistent: |p1*p2 - z| = {mismatch:.3e}",
            stacklevel=2,
        )
    return PeakonState(p1=p1, p2=p2, q1=q1, q2=q1 + state.q)


def evaluate_u(state: PeakonState, x):
    """Wave profile p1 e^{-|x-q1|} + p2 e^{-|x-q2|} at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    val = state.p1 * np.exp(-np.abs(x - state.q1)) + state.p2 * np.exp(-np.abs(x - state.q2))
    return float(val) if val.ndim == 0 else val
