"""Wild-expansion solver for the Fourier-transformed inelastic Kac equation.

For a cutoff kernel with total rate sigma the solution admits the Wild sum

    f(t) = e^{-sigma t} sum_n (1 - e^{-sigma t})^n phi_n,
    phi_0 = f0,  phi_{n+1} = (1/(n+1)) sum_{j<=n} Qplus(phi_j, phi_{n-j}),

a convex combination of iterated gain terms.  Grazing kernels have sigma
of order eps^{-2}, so one global series would need O(sigma t) terms; the
flow is autonomous, so we instead restart the series every dt with
sigma dt <= max_sigma_dt, which is exact semigroup composition.

The truncated sum at order N carries total weight 1 - x^{N+1} with
x = 1 - e^{-sigma dt}; we renormalize by that weight so each step is a
true convex combination of the phi_n.  This keeps constants (hence mass,
f(0) = 1) exactly fixed and the equilibrium stationary up to quadrature
error; the discarded-tail bound x^{N+1} <= tail_tol is still enforced on
every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelParams, SpectralDensity, XiGrid, _ChfInterpolant
from .kernels import GrazingKernel

__all__ = ["WildConfig", "qplus", "wild_step", "evolve", "collocation_oracle"]


@dataclass(frozen=True)
class WildConfig:
    terms_per_step: int = 20
    max_sigma_dt: float = math.log(2.0)
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.terms_per_step < 1:
            raise ValueError("terms_per_step must be >= 1")
        if not 0.0 < self.max_sigma_dt:
            raise ValueError("max_sigma_dt must be positive")


class _QuadratureWorkspace:
    """Precomputed offset arguments xi*cos^{p+1}(theta), xi*sin^{p+1}(theta).

    The gain operator always scales arguments down, so both matrices stay
    inside [0, xi_max] and interpolation never extrapolates upward.
    """

    def __init__(
        self,
        grid: XiGrid,
        k: GrazingKernel,
        params: ModelParams,
        rep_q: float | None = None,
    ):
        e = params.p + 1.0
        cos_pow = np.cos(k.quad_nodes) ** e
        sin_pow = np.sin(k.quad_nodes) ** e
        self.grid = grid
        self.q = params.q if rep_q is None else rep_q
        self.args_cos = grid.nodes[:, None] * cos_pow[None, :]
        self.args_sin = grid.nodes[:, None] * sin_pow[None, :]
        # (A/sigma) w sums to 1/2: Qplus(1,1) = 1 exactly.
        self.w_over_sigma = k.amplitude * k.quad_weights / k.sigma
        self.two_a_w = 2.0 * k.amplitude * k.quad_weights
        self.sigma = k.sigma

    def evaluate(self, values: np.ndarray, clamp: bool = True):
        itp = _ChfInterpolant(self.grid, values, self.q)
        return itp(self.args_cos, clamp=clamp), itp(self.args_sin, clamp=clamp)


def qplus(
    phi: SpectralDensity,
    psi: SpectralDensity,
    k: GrazingKernel,
    params: ModelParams,
) -> SpectralDensity:
    """Even-data gain operator.

    Qplus(phi, psi)(xi) = (1/sigma) int_0^{pi/2} b(theta)
        [phi(xi c) psi(xi s) + psi(xi c) phi(xi s)] dtheta,
    c = cos^{p+1}(theta), s = sin^{p+1}(theta).
    """
    if phi.grid != psi.grid:
        raise ValueError("phi and psi must share a grid")
    ws = _QuadratureWorkspace(phi.grid, k, params, rep_q=phi.q)
    pc, ps = ws.evaluate(phi.values)
    qc, qs = ws.evaluate(psi.values)
    vals = (pc * qs + qc * ps) @ ws.w_over_sigma
    return SpectralDensity(phi.grid, np.clip(vals, -1.0, 1.0), q=phi.q)


def wild_step(
    f: SpectralDensity,
    k: GrazingKernel,
    params: ModelParams,
    dt: float,
    cfg: WildConfig,
    _workspace: _QuadratureWorkspace | None = None,
) -> SpectralDensity:
    """One renormalized truncated Wild step of length dt."""
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    sigma_dt = k.sigma * dt
    if sigma_dt > cfg.max_sigma_dt * (1.0 + 1e-12):
        raise ValueError(
            f"sigma*dt = {sigma_dt:.6g} exceeds max_sigma_dt = {cfg.max_sigma_dt:.6g}"
        )
    x = -np.expm1(-sigma_dt)
    if x == 0.0:
        return f
    n_terms = cfg.terms_per_step
    tail = x ** (n_terms + 1)
    if tail > cfg.tail_tol:
        raise ValueError(
            f"truncation tail {tail:.3e} exceeds tail_tol {cfg.tail_tol:.3e}; "
            "increase terms_per_step or lower max_sigma_dt"
        )
    ws = (
        _workspace
        if _workspace is not None
        else _QuadratureWorkspace(f.grid, k, params, rep_q=f.q)
    )
    wq = ws.w_over_sigma

    phi = f.values
    evals_c = [None] * (n_terms + 1)
    evals_s = [None] * (n_terms + 1)
    evals_c[0], evals_s[0] = ws.evaluate(phi)

    weight = 1.0 - x  # e^{-sigma dt}
    acc = weight * phi
    wsum = weight
    for n in range(n_terms):
        # sum_j Qplus(phi_j, phi_{n-j}) is symmetric in j <-> n-j
        conv = evals_c[0] * evals_s[n]
        for j in range(1, n + 1):
            conv += evals_c[j] * evals_s[n - j]
        phi = np.clip((2.0 / (n + 1.0)) * (conv @ wq), -1.0, 1.0)
        if n + 1 < n_terms:
            evals_c[n + 1], evals_s[n + 1] = ws.evaluate(phi)
        weight *= x
        acc += weight * phi
        wsum += weight
    return SpectralDensity(f.grid, np.clip(acc / wsum, -1.0, 1.0), q=ws.q)


def evolve(
    f0: SpectralDensity,
    k: GrazingKernel,
    params: ModelParams,
    t: float,
    cfg: WildConfig | None = None,
) -> SpectralDensity:
    """Advance f0 by time t: full steps of sigma dt = max_sigma_dt plus a remainder."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    cfg = cfg if cfg is not None else WildConfig()
    if t == 0.0:
        return f0
    ws = _QuadratureWorkspace(f0.grid, k, params, rep_q=f0.q)
    dt_full = cfg.max_sigma_dt / k.sigma
    n_full = int(np.floor(t / dt_full * (1.0 + 1e-15)))
    remainder = t - n_full * dt_full
    if remainder < 1e-12 * dt_full:
        remainder = 0.0
    f = f0
    for _ in range(n_full):
        f = wild_step(f, k, params, dt_full, cfg, _workspace=ws)
    if remainder > 0.0:
        f = wild_step(f, k, params, remainder, cfg, _workspace=ws)
    return f


def collocation_oracle(
    f0: SpectralDensity,
    k: GrazingKernel,
    params: ModelParams,
    t: float,
    steps: int,
) -> SpectralDensity:
    """Independent reference integrator: classical RK4 on the nodal ODE system

        d/dt f(xi) = 2 int_0^{pi/2} b(theta) f(xi c) f(xi s) dtheta - sigma f(xi).

    Stage values may transiently leave [-1, 1]; clamping inside stages
    would bias the update, so interpolation runs unclamped and only the
    final result is clipped.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    h = t / steps
    if k.sigma * h > 0.5 * (1.0 + 1e-12):
        raise ValueError(
            f"sigma*h = {k.sigma * h:.6g} violates the stability bound 0.5; "
            "increase steps"
        )
    ws = _QuadratureWorkspace(f0.grid, k, params, rep_q=f0.q)

    def rhs(vals):
        ec, es = ws.evaluate(vals, clamp=False)
        return (ec * es) @ ws.two_a_w - ws.sigma * vals

    vals = np.array(f0.values, dtype=float)
    for _ in range(steps):
        k1 = rhs(vals)
        k2 = rhs(vals + 0.5 * h * k1)
        k3 = rhs(vals + 0.5 * h * k2)
        k4 = rhs(vals + h * k3)
        vals = vals + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return SpectralDensity(f0.grid, np.clip(vals, -1.0, 1.0), q=f0.q)
