"""Direct simulation Monte Carlo for the N-particle inelastic Kac process.

Nanbu-style scheme: over a macro-step dt the number of collision events
is Poisson(N sigma dt / 2); each event picks an unordered pair uniformly,
draws an angle from the kernel, and applies the rotation-contraction

    v* = v cos(theta)|cos|^p - w sin(theta)|sin|^p
    w* = v sin(theta)|sin|^p + w cos(theta)|cos|^p.

Energy is quadratic, so the mean energy closes without any chaos
assumption: E[mean energy](t) = E(0) exp(-L_eps t) exactly.

Events are applied in vectorized conflict-free prefixes: events touching
pairwise-disjoint particles commute bitwise, so batching reproduces the
sequential law (and the sequential bits) while keeping numpy throughput.
The RNG stream is drawn up front either way, so results are a function of
the seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InitialDatum, ModelParams, SpectralDensity, XiGrid
from .kernels import GrazingKernel, sample_theta_batch

__all__ = [
    "ParticleEnsemble",
    "collide_pair",
    "step",
    "sample_initial",
    "empirical_chf",
]


@dataclass
class ParticleEnsemble:
    velocities: np.ndarray
    rng: np.random.Generator
    time: float = 0.0

    def __post_init__(self):
        self.velocities = np.asarray(self.velocities, dtype=float)
        if self.velocities.ndim != 1 or self.velocities.size < 2:
            raise ValueError("need a 1-d ensemble with at least 2 particles")

    @property
    def n(self) -> int:
        return self.velocities.size


def collide_pair(v, w, theta, params: ModelParams):
    """Rotation-contraction collision rule; broadcasts over arrays."""
    c, s = np.cos(theta), np.sin(theta)
    cp = c * np.abs(c) ** params.p
    sp = s * np.abs(s) ** params.p
    return v * cp - w * sp, v * sp + w * cp


def _first_duplicate(flat: np.ndarray):
    """Index of the first entry that repeats an earlier one, else None."""
    order = np.argsort(flat, kind="stable")
    srt = flat[order]
    eq = srt[1:] == srt[:-1]
    if not eq.any():
        return None
    # stable sort keeps equal entries in original order, so order[1:][eq]
    # holds the original positions of second-and-later occurrences
    return int(order[1:][eq].min())


def _apply_events(vel, idx_i, idx_j, theta, p: float, block: int = 512):
    """Apply collision events sequentially via conflict-free prefix batches."""
    c, s = np.cos(theta), np.sin(theta)
    cp = c * np.abs(c) ** p
    sp = s * np.abs(s) ** p
    n_events = idx_i.size
    start = 0
    while start < n_events:
        stop = min(start + block, n_events)
        flat = np.empty(2 * (stop - start), dtype=idx_i.dtype)
        flat[0::2] = idx_i[start:stop]
        flat[1::2] = idx_j[start:stop]
        dup = _first_duplicate(flat)
        # i != j within an event, so a duplicate can appear at index 2
        # at the earliest: dup // 2 >= 1 and the loop always progresses
        n_ok = (stop - start) if dup is None else max(dup // 2, 1)
        sl = slice(start, start + n_ok)
        ii, jj = idx_i[sl], idx_j[sl]
        a, b = vel[ii], vel[jj]
        va = a * cp[sl] - b * sp[sl]
        vb = a * sp[sl] + b * cp[sl]
        if __debug__:
            before = a * a + b * b
            chi = cp[sl] * cp[sl] + sp[sl] * sp[sl]
            after = va * va + vb * vb
            bad = np.abs(after - before * chi) > 1e-12 * np.maximum(before, 1e-300)
            if bad.any():
                raise AssertionError("per-collision energy identity violated")
        vel[ii] = va
        vel[jj] = vb
        start += n_ok


def step(
    e: ParticleEnsemble,
    k: GrazingKernel,
    params: ModelParams,
    dt: float,
    event_cap: int = 20_000_000,
) -> ParticleEnsemble:
    """Advance the ensemble by dt in place; returns the same object."""
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    if dt == 0.0:
        return e
    n = e.n
    n_events = int(e.rng.poisson(n * k.sigma * dt / 2.0))
    if n_events > event_cap:
        raise RuntimeError(
            f"{n_events} events exceed event_cap = {event_cap}; reduce dt"
        )
    if n_events > 0:
        idx_i = e.rng.integers(0, n, size=n_events)
        idx_j = e.rng.integers(0, n - 1, size=n_events)
        idx_j += idx_j >= idx_i  # uniform over unordered pairs, i != j
        theta = sample_theta_batch(k, n_events, e.rng)
        _apply_events(e.velocities, idx_i, idx_j, theta, params.p)
    e.time += dt
    return e


def _stable_symmetric(q: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Chambers-Mallows-Stuck draws of a symmetric stable law of index q,
    normalized so the characteristic function is exp(-|xi|^q)."""
    u = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size=n)
    if q == 1.0:
        return np.tan(u)
    w = rng.standard_exponential(size=n)
    return (
        np.sin(q * u)
        / np.cos(u) ** (1.0 / q)
        * (np.cos((1.0 - q) * u) / w) ** ((1.0 - q) / q)
    )


def sample_initial(
    datum: InitialDatum,
    params: ModelParams,
    n: int,
    seed,
) -> ParticleEnsemble:
    """Draw n i.i.d. particles from the datum's law, deterministically in seed.

    Stable components use the CMS construction with the scale calibrated
    so the ensemble's characteristic function matches the datum's closed
    form; the generator is handed to the ensemble for subsequent stepping.
    """
    rng = np.random.default_rng(seed)
    a, q = params.alpha, params.q
    if datum.tag == "gaussian":
        v = datum.s * rng.standard_normal(n)
    elif datum.tag == "equilibrium":
        v = a ** (1.0 / q) * _stable_symmetric(q, n, rng)
    elif datum.tag == "mixture":
        stable = (2.0 * a) ** (1.0 / q) * _stable_symmetric(q, n, rng)
        gauss = rng.standard_normal(n)
        pick = rng.random(n) < 0.5
        v = np.where(pick, stable, gauss)
    elif datum.tag == "convolution":
        v = a ** (1.0 / q) * _stable_symmetric(q, n, rng) + rng.standard_normal(n)
    else:
        raise ValueError(f"datum {datum.tag!r} has no particle sampler")
    return ParticleEnsemble(velocities=v, rng=rng, time=0.0)


def empirical_chf(
    e: ParticleEnsemble,
    grid: XiGrid,
    q: float = 1.0,
    chunk: int = 16384,
) -> SpectralDensity:
    """Even-law estimator (1/N) sum_i cos(xi v_i) at the grid nodes."""
    nodes = grid.nodes
    acc = np.zeros(grid.count)
    v = e.velocities
    for lo in range(0, v.size, chunk):
        acc += np.cos(np.outer(v[lo : lo + chunk], nodes)).sum(axis=0)
    vals = acc / v.size
    return SpectralDensity(grid, np.clip(vals, -1.0, 1.0), q=q)
