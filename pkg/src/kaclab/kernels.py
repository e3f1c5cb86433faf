"""Grazing collision kernels.

A grazing family concentrates the collision kernel near theta = 0 while
keeping int b_eps(theta) sin^2(theta) dtheta = 1, so the energy-transfer
rate survives while the total rate sigma_eps diverges.  The concrete
family used everywhere here is the normalized indicator

    b_eps(theta) = A_eps * 1[c_eps <= |theta| <= d_eps],
    d_eps = eps * pi/4,  c_eps = d_eps / 2,

with A_eps fixed by the sin^2 normalization in closed form.  Indicator
kernels make DSMC angle sampling trivial (uniform on the support).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams

__all__ = [
    "GrazingKernel",
    "make_kernel",
    "energy_loss_rate",
    "cp_constant",
    "phi_lower",
    "sample_theta",
    "sample_theta_batch",
]


def _sin2_antiderivative(theta: float) -> float:
    # int sin^2 = theta/2 - sin(2 theta)/4
    return 0.5 * theta - 0.25 * np.sin(2.0 * theta)


@dataclass(frozen=True)
class GrazingKernel:
    """Normalized indicator kernel on [c_eps, d_eps] with quadrature attached.

    sigma is the total rate over (-pi/2, pi/2): sigma = 2 A_eps (d_eps - c_eps).
    quad_nodes/quad_weights are Gauss-Legendre on [c_eps, d_eps]; the
    integrands downstream are smooth on the narrow support, so 32 nodes
    are far below 1e-12 error.
    """

    eps: float
    c_eps: float
    d_eps: float
    amplitude: float
    sigma: float
    quad_nodes: np.ndarray
    quad_weights: np.ndarray

    def integrate_even(self, func) -> float:
        """int_{-pi/2}^{pi/2} b_eps(theta) func(theta) dtheta for even func."""
        return 2.0 * self.amplitude * float(self.quad_weights @ func(self.quad_nodes))


def make_kernel(eps: float, quad_points: int = 32) -> GrazingKernel:
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    d = eps * np.pi / 4.0
    c = d / 2.0
    norm = _sin2_antiderivative(d) - _sin2_antiderivative(c)
    amplitude = 1.0 / norm
    sigma = 2.0 * amplitude * (d - c)
    x, w = np.polynomial.legendre.leggauss(quad_points)
    nodes = 0.5 * (d - c) * x + 0.5 * (d + c)
    weights = 0.5 * (d - c) * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return GrazingKernel(
        eps=eps,
        c_eps=c,
        d_eps=d,
        amplitude=amplitude,
        sigma=sigma,
        quad_nodes=nodes,
        quad_weights=weights,
    )


def energy_loss_rate(k: GrazingKernel, params: ModelParams) -> float:
    """L_eps = int b_eps (1 - |sin|^{2+2p} - |cos|^{2+2p}) dtheta.

    Mean energy under the flow decays like exp(-L_eps t); along a grazing
    family L_eps -> 2(p+1).
    """
    e = 2.0 + 2.0 * params.p

    def integrand(theta):
        return 1.0 - np.abs(np.sin(theta)) ** e - np.abs(np.cos(theta)) ** e

    return k.integrate_even(integrand)


def cp_constant(p: float) -> float:
    return p * (1.0 + p) * 2.0 ** (1.0 - p)


def phi_lower(y, params: ModelParams):
    """Phi(y) = 1 - y^{1+p} - (1-y)^{1+p} - c_p y(1-y), nonnegative on [0, 1].

    With y = sin^2(theta) this certifies the lower sandwich bound
    c_p * J <= L_eps where J = int b sin^2 cos^2.
    """
    y = np.asarray(y, dtype=float)
    e = 1.0 + params.p
    return 1.0 - y**e - (1.0 - y) ** e - cp_constant(params.p) * y * (1.0 - y)


def sample_theta(k: GrazingKernel, rng: np.random.Generator) -> float:
    """One angle from the kernel density: |theta| uniform on the support."""
    mag = rng.uniform(k.c_eps, k.d_eps)
    return mag if rng.random() < 0.5 else -mag


def sample_theta_batch(k: GrazingKernel, n: int, rng: np.random.Generator) -> np.ndarray:
    mag = rng.uniform(k.c_eps, k.d_eps, size=n)
    sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    return sign * mag
