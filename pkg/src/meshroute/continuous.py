"""Continuous-domain hybrid swarm: standard PSO steps plus VPAC crossover.

This is the real-vector machinery the discrete route solver mirrors,
validated on analytic objectives.  The velocity/position update is the
classic inertia + cognitive + social rule; the GA side recombines particle
pairs with velocity-propelled averaged crossover (children start at the
parents' midpoint, shifted backwards along a parent velocity).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ContinuousConfig:
    bounds: list[tuple[float, float]]
    w: float = 0.7
    c1: float = 1.5
    c2: float = 1.5
    swarm_size: int = 20
    iterations: int = 200
    breed_ratio: float = 0.5
    phi1: float = 0.5
    phi2: float = 0.5
    elite_fraction: float = 0.1
    mutation_rate: float = 0.05
    mutation_sigma_frac: float = 0.01
    per_dimension_r: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("bounds must be non-empty")
        if any(lo >= hi for lo, hi in self.bounds):
            raise ValueError("each bound must satisfy lo < hi")
        if not (0.0 < self.phi1 < 1.0 and 0.0 < self.phi2 < 1.0):
            raise ValueError("phi1 and phi2 must lie in (0, 1)")
        if not 0.0 <= self.breed_ratio <= 1.0:
            raise ValueError("breed_ratio outside [0, 1]")


@dataclass
class RealParticle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_value: float
    value: float = math.inf

    def __post_init__(self):
        if self.position.shape != self.velocity.shape:
            raise ValueError("position/velocity dimension mismatch")


def _clamp(particle: RealParticle, lo: np.ndarray, hi: np.ndarray) -> None:
    below = particle.position < lo
    above = particle.position > hi
    particle.position = np.clip(particle.position, lo, hi)
    particle.velocity = np.where(below | above, 0.0, particle.velocity)


def pso_step(particle: RealParticle, gbest_position: np.ndarray,
             config: ContinuousConfig, rng: np.random.Generator) -> RealParticle:
    """One inertia + cognitive + social velocity/position update.

    r1 and r2 are drawn fresh per step; by default each is a scalar applied
    across all dimensions.  Positions are clamped to the bounds with the
    velocity zeroed on any clamped dimension.
    """
    d = particle.position.shape[0]
    shape = (d,) if config.per_dimension_r else ()
    r1 = rng.uniform(size=shape)
    r2 = rng.uniform(size=shape)
    v = (config.w * particle.velocity
         + config.c1 * r1 * (particle.pbest_position - particle.position)
         + config.c2 * r2 * (gbest_position - particle.position))
    particle.velocity = v
    particle.position = particle.position + v
    lo = np.array([b[0] for b in config.bounds])
    hi = np.array([b[1] for b in config.bounds])
    _clamp(particle, lo, hi)
    return particle


def vpac_crossover(p: RealParticle, q: RealParticle, phi1: float,
                   phi2: float) -> tuple[np.ndarray, np.ndarray]:
    """Children at the parents' midpoint, each pushed back along its own
    parent's velocity: child_k = (x_p + x_q)/2 - phi_k * v_k."""
    mid = (p.position + q.position) / 2.0
    return mid - phi1 * p.velocity, mid - phi2 * q.velocity


def run_continuous(objective, config: ContinuousConfig,
                   ) -> tuple[np.ndarray, float, list[float]]:
    """Hybrid swarm minimization of ``objective`` over the configured box.

    Mirrors the route solver's generation structure: elite retained, a
    breed-ratio share of the rest takes PSO steps, the remainder is paired
    for VPAC crossover with light Gaussian mutation.  Returns the best
    position, its value, and the per-iteration incumbent trace.
    """
    rng = np.random.default_rng(config.rng_seed)
    lo = np.array([b[0] for b in config.bounds])
    hi = np.array([b[1] for b in config.bounds])
    span = hi - lo
    n = config.swarm_size

    swarm: list[RealParticle] = []
    for _ in range(n):
        x = rng.uniform(lo, hi)
        v = rng.uniform(-span, span) * 0.1
        val = float(objective(x))
        swarm.append(RealParticle(position=x, velocity=v,
                                  pbest_position=x.copy(), pbest_value=val,
                                  value=val))

    gbest_x = None
    gbest_val = math.inf
    trace: list[float] = []

    for _ in range(config.iterations):
        for p in swarm:
            p.value = float(objective(p.position))
            if p.value < p.pbest_value:
                p.pbest_value = p.value
                p.pbest_position = p.position.copy()
            if p.value < gbest_val:
                gbest_val = p.value
                gbest_x = p.position.copy()
        trace.append(gbest_val)

        n_elite = math.ceil(config.elite_fraction * n)
        ranked = sorted(swarm, key=lambda p: p.value)
        elite = ranked[:n_elite]
        rest = ranked[n_elite:]
        z = round(len(rest) * config.breed_ratio)
        idx = rng.permutation(len(rest))
        pso_part = [rest[i] for i in idx[:z]]
        ga_part = [rest[i] for i in idx[z:]]

        for p in pso_part:
            pso_step(p, gbest_x, config, rng)

        order = rng.permutation(len(ga_part))
        for i in range(0, len(order) - 1, 2):
            pa, qa = ga_part[order[i]], ga_part[order[i + 1]]
            child1, child2 = vpac_crossover(pa, qa, config.phi1, config.phi2)
            for parent, child in ((pa, child1), (qa, child2)):
                if rng.uniform() < config.mutation_rate:
                    child = child + rng.normal(0.0, config.mutation_sigma_frac * span)
                parent.position = np.clip(child, lo, hi)
                parent.velocity = np.zeros_like(parent.velocity)

        swarm = elite + pso_part + ga_part

    return gbest_x, gbest_val, trace


def trace_to_csv(trace: list[float]) -> str:
    """CSV rendering of an incumbent-value trace: iteration, best value."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["iteration", "best_value"])
    for i, v in enumerate(trace, start=1):
        writer.writerow([i, repr(v)])
    return buf.getvalue()
