"""Stochastic packet transport over a chosen route.

Each packet crosses the route's links in order and is dropped independently
at each link with that link's loss probability; survivors accumulate the
link delay plus a uniform jitter sample per hop.  Output is the delivery
ratio and the mean end-to-end delay of delivered packets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .qos import InvalidPathError, PenaltyCoeffs, QosRequest
from .routing import HybridConfig, RunResult, run
from .topology import MeshTopology, validate_path


@dataclass(frozen=True)
class TrafficSpec:
    packet_count: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.packet_count < 1:
            raise ValueError("packet_count must be >= 1")


@dataclass(frozen=True)
class SimResult:
    pdr: float
    avg_delay: float
    delivered_count: int
    packet_count: int

    def to_dict(self) -> dict:
        return {
            "pdr": self.pdr,
            "avg_delay_ms": self.avg_delay,
            "delivered": self.delivered_count,
            "packets": self.packet_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def simulate_path(topo: MeshTopology, path: list[int],
                  traffic: TrafficSpec) -> SimResult:
    """Send ``packet_count`` packets down ``path``; deterministic per seed.

    avg_delay is computed over delivered packets only and is NaN when
    nothing gets through.
    """
    if not validate_path(topo, path, require_gateway=False):
        raise InvalidPathError(f"cannot simulate invalid path: {path}")
    links = [topo.link(u, v) for u, v in zip(path, path[1:])]
    n = traffic.packet_count
    rng = np.random.default_rng(traffic.seed)
    if not links:
        return SimResult(pdr=1.0, avg_delay=0.0, delivered_count=n,
                         packet_count=n)

    loss = np.array([l.loss_prob for l in links])
    base_delay = float(sum(l.delay for l in links))
    jitter = np.array([l.jitter for l in links])

    survive = rng.uniform(size=(n, len(links))) >= loss[None, :]
    delivered = survive.all(axis=1)
    jitter_samples = rng.uniform(0.0, jitter[None, :], size=(n, len(links)))
    delays = base_delay + jitter_samples.sum(axis=1)

    count = int(delivered.sum())
    avg = float(delays[delivered].mean()) if count else math.nan
    return SimResult(pdr=count / n, avg_delay=avg, delivered_count=count,
                     packet_count=n)


def evaluate_routing(topo: MeshTopology, source: int, req: QosRequest,
                     coeffs: PenaltyCoeffs, config: HybridConfig,
                     traffic: TrafficSpec,
                     gateways: set[int] | None = None,
                     ) -> tuple[RunResult, SimResult]:
    """Solve for the best route, then push traffic through it."""
    result = run(topo, source, req, coeffs, config, gateways)
    sim = simulate_path(topo, result.best_path, traffic)
    return result, sim
