"""Closed-form and quadrature invariants of the reduced flow.

Along any reduced trajectory the momentum product is an explicit function
of the separation,

    z(q) = z0 * (L_a(q) / L_a(mu)) ** ((2-b) / (2(1-3a))),

with a removable singularity at a = 1/3 where the exponential limit form
applies.  Substituting z(q) into the h and w equations turns them into
exact differentials, so that

    h(t)^2 = h0^2 + 2*F1(q(t)),   w(t)^2 = w0^2 + 2*F2(q(t)),

where F1, F2 are integrals in the separation variable of the density
f(q) weighted by (1 + e^{-q}) and (1 - e^{-q}).  These identities hold as
long as the separation stays in the range where L_a keeps a fixed sign,
and they bound the momenta up to the collision.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import PeakonState, to_reduced
from .params import ABParams, l_a

_THIRD_TOL = 1e-9  # |1 - 3a| below this uses the a = 1/3 limit branch
_QUAD_ABS_TOL = 1e-12
_IDENTITY_TOL = 1e-9  # accepted violation of h0^2 + 4 z0 = w0^2


@dataclass(frozen=True)
class InvariantContext:
    """Initial reduced data (mu, z0, h0, w0) plus the equation parameters."""

    params: ABParams
    mu: float
    z0: float
    h0: float
    w0: float

    def __post_init__(self) -> None:
        gap = abs(self.h0**2 + 4.0 * self.z0 - self.w0**2)
        if gap > _IDENTITY_TOL * max(1.0, self.w0**2):
            raise ValueError(f"h0^2 + 4 z0 = w0^2 violated by {gap:.3e}")

    @classmethod
    def from_initial(cls, params: ABParams, state: PeakonState) -> "InvariantContext":
        red = to_reduced(state)
        return cls(params=params, mu=red.q, z0=red.z, h0=red.h, w0=red.w)


def z_closed_form(ctx: InvariantContext, q):
    """Momentum product as an explicit function of the separation.

    Equals z0 at q = mu and is constant when b = 2.  Accepts scalars or
    arrays.  Raises ValueError outside the range where L_a(q)/L_a(mu)
    stays positive, since the derivation integrates d(ln|z|) there.
    """
    a, b = ctx.params.a, ctx.params.b
    if a == 0:
        raise ValueError("a must be nonzero")
    q = np.asarray(q, dtype=float)
    if b == 2.0:
        # zero exponent: constant product, valid for every separation
        val = np.full_like(q, ctx.z0)
    elif abs(1.0 - 3.0 * a) < _THIRD_TOL:
        val = ctx.z0 * np.exp(
            -(3.0 * (2.0 - b) / 4.0) * (np.exp(-2.0 * q) - np.exp(-2.0 * ctx.mu))
        )
    else:
        ratio = l_a(a, q) / l_a(a, ctx.mu)
        if np.any(ratio <= 0):
            raise ValueError("separation left the sign-definite range of L_a")
        val = ctx.z0 * ratio ** ((2.0 - b) / (2.0 * (1.0 - 3.0 * a)))
    return float(val) if val.ndim == 0 else val


def f_density(ctx: InvariantContext, q):
    """Density f(q) = -(2-b) e^{-q} z(q) / L_a(q), smooth and bounded.

    Satisfies h h' = (1 + e^{-q}) f(q) q' and w w' = (1 - e^{-q}) f(q) q'
    pointwise along trajectories; identically zero when b = 2.
    """
    a, b = ctx.params.a, ctx.params.b
    q = np.asarray(q, dtype=float)
    if b == 2.0:
        val = np.zeros_like(q)
    else:
        val = -(2.0 - b) * np.exp(-q) * z_closed_form(ctx, q) / l_a(a, q)
    return float(val) if val.ndim == 0 else val


def _potential(ctx: InvariantContext, q: float, sign: float) -> float:
    if q == ctx.mu:
        return 0.0
    val, err = quad(
        lambda rho: (1.0 + sign * math.exp(-rho)) * f_density(ctx, rho),
        ctx.mu,
        q,
        epsabs=_QUAD_ABS_TOL,
        epsrel=_QUAD_ABS_TOL,
        limit=200,
    )
    if err > 100 * _QUAD_ABS_TOL * max(1.0, abs(val)):
        warnings.warn(
            f"potential quadrature did not converge: estimated error {err:.3e}",
            stacklevel=3,
        )
    return val


def F1(ctx: InvariantContext, q: float) -> float:
    """Integral of (1 + e^{-rho}) f(rho) from mu to q; F1(mu) = 0."""
    return _potential(ctx, q, +1.0)


def F2(ctx: InvariantContext, q: float) -> float:
    """Integral of (1 - e^{-rho}) f(rho) from mu to q; F2(mu) = 0."""
    return _potential(ctx, q, -1.0)


def h_sq(ctx: InvariantContext, q: float) -> float:
    """h0^2 + 2*F1(q).

    Returned verbatim even when negative; a negative value means the
    requested separation lies outside the range actually swept by a
    trajectory with this initial data, where h would have to change sign.
    """
    return ctx.h0**2 + 2.0 * F1(ctx, q)


def w_sq(ctx: InvariantContext, q: float) -> float:
    """w0^2 + 2*F2(q), returned verbatim (may be negative, see h_sq)."""
    return ctx.w0**2 + 2.0 * F2(ctx, q)
