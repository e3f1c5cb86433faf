"""Closed-form solutions of the limiting equations and the stable density.

In the grazing limit the kinetic flow converges (for infinite-energy
scaling) to a fractional Fokker-Planck equation whose Fourier symbol is
-2 alpha |xi|^q - (p+1) xi d/dxi, and (for finite-energy data) to a pure
drift equation.  Both solve in closed form in the Fourier variable:

    FP:    f(xi, t) = f0(xi e^{-(p+1)t}) exp(-alpha |xi|^q (1 - e^{-2t}))
    drift: f(xi, t) = f0(xi e^{-(p+1)t})

The FP flow interpolates between f0 and the stable equilibrium
exp(-alpha |xi|^q) through the scaling pair beta = e^{-(p+1)t},
gamma = (1-e^{-2t})^{(p+1)/2}, which satisfies
beta^{2/(p+1)} + gamma^{2/(p+1)} = 1 identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import InitialDatum, ModelParams

__all__ = [
    "FPState",
    "fp_solution_hat",
    "drift_solution_hat",
    "fp_residual",
    "mp_physical",
]


@dataclass(frozen=True)
class FPState:
    params: ModelParams
    time: float

    def __post_init__(self):
        if self.time < 0.0:
            raise ValueError("time must be nonnegative")

    @property
    def beta(self) -> float:
        return float(np.exp(-(self.params.p + 1.0) * self.time))

    @property
    def gamma(self) -> float:
        return float((-np.expm1(-2.0 * self.time)) ** ((self.params.p + 1.0) / 2.0))


def _as_hat(f0, params: ModelParams):
    if isinstance(f0, InitialDatum):
        return lambda xi: f0.hat(params, xi)
    if callable(f0):
        return f0
    raise TypeError("f0 must be an InitialDatum or a callable of xi")


def fp_solution_hat(f0, params: ModelParams, t: float, xi):
    """Fractional Fokker-Planck solution in Fourier variables."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    hat = _as_hat(f0, params)
    x = np.abs(np.asarray(xi, dtype=float))
    beta = np.exp(-(params.p + 1.0) * t)
    return hat(x * beta) * np.exp(params.alpha * x**params.q * np.expm1(-2.0 * t))


def drift_solution_hat(f0, params: ModelParams, t: float, xi):
    """Drift-equation solution: pure argument scaling, no diffusion factor."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    hat = _as_hat(f0, params)
    x = np.abs(np.asarray(xi, dtype=float))
    return hat(x * np.exp(-(params.p + 1.0) * t))


def fp_residual(
    f,
    params: ModelParams,
    t: float,
    xi: float,
    h_t: float = 1e-4,
    h_xi: float = 1e-4,
) -> float:
    """Centered-difference residual of the Fourier Fokker-Planck operator,

        d/dt f + 2 alpha |xi|^q f + (p+1) xi d/dxi f,

    for a callable f(t, xi).  Vanishes (to O(h^2)) on the closed-form
    solution and the equilibrium; equals 2 alpha |xi|^q f on the drift
    solution, which does not satisfy the diffusive equation.
    """
    if xi <= h_xi:
        raise ValueError("need xi > h_xi for the centered xi-stencil")
    if t < h_t:
        raise ValueError("need t >= h_t for the centered t-stencil")
    df_dt = (f(t + h_t, xi) - f(t - h_t, xi)) / (2.0 * h_t)
    df_dxi = (f(t, xi + h_xi) - f(t, xi - h_xi)) / (2.0 * h_xi)
    return df_dt + 2.0 * params.alpha * xi**params.q * f(t, xi) + (params.p + 1.0) * xi * df_dxi


def mp_physical(params: ModelParams, v: float, tol: float = 1e-8) -> float:
    """Stable equilibrium density at velocity v by cosine-transform quadrature.

    (1/pi) int_0^inf cos(v xi) exp(-alpha xi^q) dxi, truncated where the
    integrand falls below 1e-16 and integrated with an oscillation-aware
    weighted rule.  Raises if the quadrature error estimate exceeds tol.
    """
    a, q = params.alpha, params.q
    upper = (37.0 / a) ** (1.0 / q)  # exp(-37) ~ 8.5e-17

    def integrand(x):
        return np.exp(-a * x**q)

    if v == 0.0:
        val, err = quad(integrand, 0.0, upper, epsabs=0.1 * tol * np.pi, limit=512)
    else:
        val, err = quad(
            integrand,
            0.0,
            upper,
            weight="cos",
            wvar=abs(v),
            epsabs=0.1 * tol * np.pi,
            limit=512,
        )
    if err > tol * np.pi:
        raise RuntimeError(
            f"cosine-transform quadrature did not converge: err = {err:.3e}"
        )
    density = val / np.pi
    if density < -1e-10:
        raise RuntimeError(f"quadrature returned {density:.3e} < -1e-10")
    return max(density, 0.0)
