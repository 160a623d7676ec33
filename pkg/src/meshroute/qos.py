"""Path-level QoS aggregation, constraint penalties, and route fitness.

A route is scored as F = f + lambda * p where f is the summed link cost and
p penalizes violations of the bandwidth floor, delay bound, jitter bound,
and interference ceiling.  Feasible routes have p = 0, so minimizing F over
feasible routes is exactly minimizing cost.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .topology import MeshTopology, validate_path, enumerate_simple_paths

# min_bw of a zero-link path: no link constrains bandwidth.
NO_LINK_BANDWIDTH = math.inf

PENALTY_TERMS = ("bandwidth", "delay", "jitter", "interference")


class InvalidPathError(ValueError):
    """Metrics requested for a node sequence that is not a path."""


@dataclass(frozen=True)
class QosRequest:
    """Application demands: bandwidth floor, delay/jitter caps, interference
    tolerance ``beta`` (1.0 = only interference-free routes tolerated)."""
    bw_req: float
    d_req: float
    j_req: float
    beta: float = 0.5

    def __post_init__(self):
        if self.bw_req <= 0 or self.d_req <= 0 or self.j_req <= 0:
            raise ValueError("bw_req, d_req and j_req must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta outside [0, 1]")


@dataclass(frozen=True)
class PenaltyCoeffs:
    """Violation normalizers and the penalty weight.

    ``strict`` mode sums unclamped weighted violations, with ``lam`` sized so
    any violation outweighs any cost saving.  ``fidelity`` mode clamps each
    term to [0, 1] and averages them, keeping p itself in [0, 1].
    """
    eta1: float
    eta2: float
    eta3: float
    lam: float = 1.0
    clamp_mode: str = "strict"

    def __post_init__(self):
        if min(self.eta1, self.eta2, self.eta3, self.lam) < 0:
            raise ValueError("coefficients must be non-negative")
        if self.clamp_mode not in ("strict", "fidelity"):
            raise ValueError("clamp_mode must be 'strict' or 'fidelity'")

    @classmethod
    def for_request(cls, req: QosRequest, topo: MeshTopology | None = None,
                    mode: str = "strict") -> "PenaltyCoeffs":
        """Dimensionless defaults: each eta is 1/bound so terms measure
        relative violation; strict lam dominates the worst possible path cost."""
        etas = (1.0 / req.bw_req, 1.0 / req.d_req, 1.0 / req.j_req)
        if mode == "fidelity":
            lam = 1.0
        else:
            if topo is None:
                raise ValueError("strict mode needs a topology to size lam")
            max_hops = topo.node_count - 1
            lam = 2.0 * topo.max_link_cost * max_hops
        return cls(*etas, lam=lam, clamp_mode=mode)


@dataclass(frozen=True)
class PathMetrics:
    cost: float
    min_bw: float
    total_delay: float
    total_jitter: float
    interference: float


@dataclass(frozen=True)
class FitnessBreakdown:
    objective: float
    penalty: float
    total: float
    terms: dict = field(default_factory=dict)
    feasible: bool = False
    valid: bool = True

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "penalty": self.penalty,
            "total": self.total,
            "terms": dict(self.terms),
            "feasible": self.feasible,
            "valid": self.valid,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def path_metrics(topo: MeshTopology, path: list[int]) -> PathMetrics:
    """Aggregate link weights along a validated path.

    Cost, delay and jitter are additive; bandwidth is the bottleneck minimum;
    interference is the mean link i_factor so it stays in [0, 1] regardless
    of hop count.
    """
    if not validate_path(topo, path, require_gateway=False):
        raise InvalidPathError(f"not a simple connected path: {path}")
    links = [topo.link(u, v) for u, v in zip(path, path[1:])]
    if not links:
        return PathMetrics(0.0, NO_LINK_BANDWIDTH, 0.0, 0.0, 0.0)
    return PathMetrics(
        cost=sum(l.cost for l in links),
        min_bw=min(l.bandwidth for l in links),
        total_delay=sum(l.delay for l in links),
        total_jitter=sum(l.jitter for l in links),
        interference=sum(l.i_factor for l in links) / len(links),
    )


def penalty(metrics: PathMetrics, req: QosRequest,
            coeffs: PenaltyCoeffs) -> tuple[float, dict]:
    """Constraint-violation penalty with its per-term breakdown.

    Zero exactly when the bandwidth floor, delay and jitter caps hold and
    path interference stays within 1 - beta.
    """
    terms = {
        "bandwidth": coeffs.eta1 * max(req.bw_req - metrics.min_bw, 0.0),
        "delay": coeffs.eta2 * max(metrics.total_delay - req.d_req, 0.0),
        "jitter": coeffs.eta3 * max(metrics.total_jitter - req.j_req, 0.0),
        "interference": max(metrics.interference - (1.0 - req.beta), 0.0),
    }
    if coeffs.clamp_mode == "fidelity":
        terms = {k: min(v, 1.0) for k, v in terms.items()}
        return sum(terms.values()) / len(terms), terms
    return sum(terms.values()), terms


def infeasible_sentinel(topo: MeshTopology, coeffs: PenaltyCoeffs) -> float:
    """Fitness assigned to unconnected/broken routes; dominated by every
    real path so selection never prefers a broken one."""
    cost_bound = topo.max_link_cost * (topo.node_count - 1)
    return coeffs.lam * 4.0 + cost_bound + 1.0


def fitness(topo: MeshTopology, path: list[int], req: QosRequest,
            coeffs: PenaltyCoeffs) -> FitnessBreakdown:
    """Total route fitness F = cost + lam * penalty.

    Accepts arbitrary node sequences: anything that fails validation gets
    the infeasible sentinel instead of raising.
    """
    if not validate_path(topo, path, require_gateway=False):
        sentinel = infeasible_sentinel(topo, coeffs)
        return FitnessBreakdown(objective=sentinel, penalty=0.0, total=sentinel,
                                terms={k: 0.0 for k in PENALTY_TERMS},
                                feasible=False, valid=False)
    metrics = path_metrics(topo, path)
    p, terms = penalty(metrics, req, coeffs)
    return FitnessBreakdown(
        objective=metrics.cost,
        penalty=p,
        total=metrics.cost + coeffs.lam * p,
        terms=terms,
        feasible=(p == 0.0),
        valid=True,
    )


def oracle_best(topo: MeshTopology, source: int, gateways: set[int],
                req: QosRequest, coeffs: PenaltyCoeffs,
                max_hops: int | None = None,
                cap: int = 500_000) -> tuple[list[int], FitnessBreakdown]:
    """Exhaustive reference optimum over all simple source->gateway paths.

    Ties in F break lexicographically by node sequence.  Only tractable on
    small graphs; the enumeration cap bounds the blow-up.
    """
    if max_hops is None:
        max_hops = topo.node_count - 1
    paths = enumerate_simple_paths(topo, source, set(gateways), max_hops, cap=cap)
    if not paths:
        raise ValueError("no gateway reachable from source")
    best = min(paths, key=lambda p: (fitness(topo, p, req, coeffs).total, p))
    return best, fitness(topo, best, req, coeffs)
