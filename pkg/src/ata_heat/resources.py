"""Closed-form cost and success-probability models for ATA versus HHL.

These are order-of-magnitude models. The HHL gate constant and the REV-block
scenario are explicit parameters, not measurements.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

ATA = "ata"
HHL = "hhl"

# two-qubit gates per n**3 for the HHL circuit (model constant)
HHL_GATE_CONSTANT = 1.0

REV_POLYLOG = "polylog"
REV_EXPONENTIAL = "exponential"


class ChainProbability(NamedTuple):
    exact: float
    approximation: float


@dataclass
class ResourceEstimate:
    method: str
    n: int
    n_steps: int
    depth_d: int | None
    ancilla_m: int | None
    two_qubit_gates: float
    success_probability: float
    expected_runs: float

    def as_row(self) -> dict:
        return asdict(self)


def hhl_chain_probability(p: float, n_steps: int) -> ChainProbability:
    """``(1 - p)**n_steps`` together with its approximation ``exp(-p n_steps)``."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    return ChainProbability((1.0 - p) ** n_steps, math.exp(-p * n_steps))


def ancilla_count(depth: int) -> int:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return (depth - 1).bit_length()


def ata_run_overhead(n_steps: int, depth: int) -> int:
    """Expected circuit runs ``n_steps * 2**ceil(log2 d)``."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    return n_steps * (1 << ancilla_count(depth))


def ata_run_overhead_smooth(n_steps: int, depth: int) -> int:
    """The ``n_steps * d`` scaling model."""
    if n_steps < 1 or depth < 1:
        raise ValueError("inputs must be positive")
    return n_steps * depth


def qft_pair_gates(n: int) -> int:
    """Two-qubit gates of a forward plus inverse QFT: ``2 * n(n-1)/2``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * (n - 1)


def gate_counts(n: int, method: str, depth: int = 35, hhl_constant: float = HHL_GATE_CONSTANT,
                rev: str = REV_POLYLOG) -> float:
    """Two-qubit gate estimate for one solve.

    ATA: the QFT pair plus ``2**m`` for the node-superposition preparation.
    HHL: ``hhl_constant * n**3``; the exponential REV scenario adds ``2**n``.
    """
    if method == ATA:
        return float(qft_pair_gates(n) + (1 << ancilla_count(depth)))
    if method == HHL:
        if n < 1:
            raise ValueError("n must be >= 1")
        base = hhl_constant * n ** 3
        if rev == REV_EXPONENTIAL:
            return base + float(2 ** n)
        if rev != REV_POLYLOG:
            raise ValueError(f"unknown REV scenario {rev!r}")
        return base
    raise ValueError(f"unknown method {method!r}")


def _runs(prob: float) -> float:
    return math.inf if prob <= 0.0 else float(math.ceil(1.0 / prob))


def estimate(method: str, n: int, n_steps: int, depth: int = 35, p: float = 0.5,
             hhl_constant: float = HHL_GATE_CONSTANT, rev: str = REV_POLYLOG) -> ResourceEstimate:
    """One row of the comparison table.

    ATA runs every step independently, so ``expected_runs`` is the linear
    overhead; HHL chains the steps coherently and pays ``1 / P_chain``.
    """
    if method == ATA:
        m = ancilla_count(depth)
        return ResourceEstimate(ATA, n, n_steps, depth, m, gate_counts(n, ATA, depth) * n_steps,
                                1.0 / (1 << m), float(ata_run_overhead(n_steps, depth)))
    if method == HHL:
        prob = hhl_chain_probability(p, n_steps).exact
        return ResourceEstimate(HHL, n, n_steps, None, None,
                                gate_counts(n, HHL, hhl_constant=hhl_constant, rev=rev) * n_steps,
                                prob, _runs(prob))
    raise ValueError(f"unknown method {method!r}")


def comparison_table(ns, step_counts, depths, ps, hhl_constant: float = HHL_GATE_CONSTANT,
                     rev: str = REV_POLYLOG) -> list:
    """Rows ``{n, n_steps, depth, p, ata_*, hhl_*, gate_ratio}`` over the full grid."""
    rows = []
    for n in ns:
        for nt in step_counts:
            for d in depths:
                for p in ps:
                    a = estimate(ATA, n, nt, d)
                    h = estimate(HHL, n, nt, d, p, hhl_constant, rev)
                    rows.append({
                        "n": n, "n_steps": nt, "depth": d, "p": p,
                        "ata_gates": a.two_qubit_gates, "ata_runs": a.expected_runs,
                        "ata_success": a.success_probability,
                        "hhl_gates": h.two_qubit_gates, "hhl_runs": h.expected_runs,
                        "hhl_success": h.success_probability,
                        "gate_ratio": a.two_qubit_gates / h.two_qubit_gates,
                    })
    return rows
