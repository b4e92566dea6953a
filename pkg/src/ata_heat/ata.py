"""Greedy Ansatz-tree solver for ``A' x = b`` with ``A' = F^dagger diag(lam) F``.

The solution is built as ``x = sum_i alpha_i U_i |b>`` where each node
unitary is ``F^dagger Z_{m_i} F``; products of node unitaries collapse to a
single mask by XOR, so a node is identified by its mask alone. In the Fourier
domain the ansatz multiplies the root amplitudes by
``q_k = sum_i alpha_i (-1)**popcount(m_i & k)``, which is why the Gram matrix,
the drive vector and the weights are all real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from .grid import GridSpec, approx_spectrum
from .oracle import fidelity, solve_exact
from .pauli import DiagonalPauliSum, decompose_operator
from .state import FOURIER, POSITION, Statevector, fourier

LATEST_NODE = "latest-node"
FULL_FRONTIER = "full-frontier"

_NORMAL_RESIDUAL_TOL = 1e-6
_LSTSQ_CUTOFF = 1e-10


class DegenerateBasisError(RuntimeError):
    """Gram matrix could not be solved even by the rank-revealing fallback."""


class TreeExhausted(RuntimeError):
    """Every child of the expansion set is already a node of the tree."""


@dataclass
class AtaConfig:
    max_depth: int = 35
    loss_tol: float = 1e-12
    stagnation_tol: float = 0.0
    expansion: str = LATEST_NODE
    ridge: float = 1e-12

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.loss_tol < 0 or self.stagnation_tol < 0 or self.ridge < 0:
            raise ValueError("tolerances must be non-negative")
        if self.expansion not in (LATEST_NODE, FULL_FRONTIER):
            raise ValueError(f"unknown expansion policy {self.expansion!r}")


@dataclass
class AnsatzTree:
    """Node masks (node 0 is the root, mask 0) with their current weights.

    ``root`` is the unit-norm Fourier-domain image of ``|b>``.
    """

    root: Statevector
    masks: list
    alphas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    loss_history: list = field(default_factory=list)
    stop_reason: str | None = None

    @classmethod
    def start(cls, root: Statevector, masks=(0,)) -> "AnsatzTree":
        if root.domain == POSITION:
            root = fourier(root)
        root = root.normalized()
        ordered = [0] + [int(m) for m in masks if int(m) != 0]
        if len(set(ordered)) != len(ordered):
            raise ValueError("node masks must be distinct")
        if any(m < 0 or m >= root.size for m in ordered):
            raise ValueError("node mask out of range")
        return cls(root=root, masks=ordered)

    @property
    def n(self) -> int:
        return self.root.n

    @property
    def depth(self) -> int:
        return len(self.masks)

    def as_pauli_sum(self) -> DiagonalPauliSum:
        """The tree as the operator ``sum_i alpha_i Z_{m_i}`` (Fourier domain)."""
        return DiagonalPauliSum.from_terms(self.n, zip(self.masks, self.alphas.tolist()))

    def multiplier(self) -> np.ndarray:
        """Diagonal ``q_k`` that the tree applies to the root's Fourier amplitudes."""
        signs = kernels.walsh_signs(np.asarray(self.masks, dtype=np.int64), self.n)
        return self.alphas @ signs

    def solution(self) -> Statevector:
        """Normalized-root solution ``x`` in the Fourier domain."""
        return Statevector(self.multiplier() * self.root.amps, FOURIER)

    def to_json_dict(self) -> dict:
        return {
            "masks": [int(m) for m in self.masks],
            "alphas": [[float(np.real(a)), float(np.imag(a))] for a in self.alphas],
            "loss_history": [float(v) for v in self.loss_history],
        }

    @classmethod
    def from_json_dict(cls, data: dict, root: Statevector) -> "AnsatzTree":
        tree = cls.start(root, data["masks"])
        alphas = np.array([complex(re, im) for re, im in data["alphas"]])
        if np.all(alphas.imag == 0):
            alphas = alphas.real
        tree.alphas = alphas
        tree.loss_history = list(data["loss_history"])
        return tree


class _Workspace:
    """Incrementally maintained Gram system for one root and one spectrum."""

    def __init__(self, root: Statevector, spectrum, masks, capacity: int, ridge: float):
        self.n = root.n
        lam = np.asarray(spectrum, dtype=np.float64)
        if lam.shape != (root.size,):
            raise ValueError("spectrum length does not match the root")
        w = np.abs(root.amps) ** 2
        total = w.sum()
        if total == 0.0:
            raise ValueError("root vector is zero")
        self.w = w / total
        self.lam = lam
        self.wl = self.w * lam
        self.wl2 = self.wl * lam
        self.ridge = ridge
        capacity = max(capacity, len(masks))
        self.signs = np.empty((capacity, root.size))
        self.gram = np.empty((capacity, capacity))
        self.drive = np.empty(capacity)
        self.d = 0
        initial = kernels.walsh_signs(np.asarray(masks, dtype=np.int64), self.n)
        d = initial.shape[0]
        self.signs[:d] = initial
        self.gram[:d, :d] = (initial * self.wl2) @ initial.T
        self.drive[:d] = initial @ self.wl
        self.d = d

    def add(self, mask: int):
        if self.d == self.signs.shape[0]:
            self._grow_capacity()
        s = kernels.walsh_signs(np.array([mask], dtype=np.int64), self.n)[0]
        d = self.d
        col = self.signs[:d] @ (self.wl2 * s)
        self.signs[d] = s
        self.gram[:d, d] = col
        self.gram[d, :d] = col
        self.gram[d, d] = self.wl2.sum()
        self.drive[d] = s @ self.wl
        self.d = d + 1

    def _grow_capacity(self):
        cap = 2 * self.signs.shape[0]
        signs = np.empty((cap, self.signs.shape[1]))
        signs[: self.d] = self.signs[: self.d]
        gram = np.empty((cap, cap))
        gram[: self.d, : self.d] = self.gram[: self.d, : self.d]
        drive = np.empty(cap)
        drive[: self.d] = self.drive[: self.d]
        self.signs, self.gram, self.drive = signs, gram, drive

    def multiplier(self, alpha) -> np.ndarray:
        return alpha @ self.signs[: self.d]

    def loss(self, alpha) -> float:
        # residual form of ||A'x - b||^2 for the unit root; no cancellation near 0
        resid = self.lam * self.multiplier(alpha) - 1.0
        return float(np.dot(self.w, resid * resid))

    def solve(self, previous=None):
        d = self.d
        alpha = solve_normal_system(self.gram[:d, :d], self.drive[:d], self.ridge)
        loss = self.loss(alpha)
        if previous is not None and len(previous) < d:
            # the previous optimum is feasible on the enlarged basis
            padded = np.concatenate([previous, np.zeros(d - len(previous))])
            prev_loss = self.loss(padded)
            if prev_loss < loss:
                return padded, prev_loss
        return alpha, loss

    def gradient(self, alpha) -> np.ndarray:
        """``g_m = <m| grad L |>`` for every mask ``m`` at once (one Walsh transform)."""
        v = self.wl * (self.lam * self.multiplier(alpha) - 1.0)
        return 2.0 * kernels.fwht(v)


def solve_normal_system(gram, drive, ridge: float = 1e-12) -> np.ndarray:
    """Ridge-regularized solve of ``G alpha = r`` with a least-squares fallback.

    Up to two refinement sweeps against the unregularized ``G`` remove the
    ridge bias; a sweep is kept only if it is a small correction that lowers
    the normal-equation residual.
    """
    d = drive.shape[0]
    scale = np.trace(gram) / d if d else 0.0
    alpha = None
    try:
        factor = scipy.linalg.cho_factor(gram + ridge * scale * np.eye(d), check_finite=False)
        alpha = scipy.linalg.cho_solve(factor, drive, check_finite=False)
        for _ in range(2):
            resid = drive - gram @ alpha
            delta = scipy.linalg.cho_solve(factor, resid, check_finite=False)
            # near-singular G: the correction would mostly inflate null-space components
            if np.linalg.norm(delta) > 1e-6 * np.linalg.norm(alpha):
                break
            if np.linalg.norm(drive - gram @ (alpha + delta)) >= np.linalg.norm(resid):
                break
            alpha = alpha + delta
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
        alpha = None
    if alpha is not None and np.all(np.isfinite(alpha)):
        rnorm = np.linalg.norm(drive)
        if np.linalg.norm(gram @ alpha - drive) <= _NORMAL_RESIDUAL_TOL * max(rnorm, 1e-300):
            return alpha
    try:
        alpha = scipy.linalg.lstsq(gram, drive, cond=_LSTSQ_CUTOFF)[0]
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise DegenerateBasisError(str(exc)) from exc
    if not np.all(np.isfinite(alpha)):
        raise DegenerateBasisError("non-finite weights from the least-squares fallback")
    return alpha


def solve_weights(tree: AnsatzTree, spectrum):
    """Optimal weights for the current nodes and the achieved loss ``||A'x - b||^2``.

    The root is taken at unit norm, so ``loss = x^T A'^2 x - 2 x^T A' b + 1``.
    """
    ws = _Workspace(tree.root, spectrum, tree.masks, len(tree.masks), AtaConfig.ridge)
    return ws.solve()


def candidate_masks(masks, decomposition: DiagonalPauliSum, expansion: str = LATEST_NODE) -> np.ndarray:
    """Children of the expansion set not yet in the tree, ascending."""
    parents = [masks[-1]] if expansion == LATEST_NODE else list(masks)
    terms = decomposition.masks
    kids = np.unique((np.asarray(parents, dtype=np.int64)[:, None] ^ terms[None, :]).ravel())
    return kids[~np.isin(kids, np.asarray(masks, dtype=np.int64))]


def score_children(tree: AnsatzTree, spectrum, decomposition: DiagonalPauliSum, expansion: str = LATEST_NODE):
    """Candidate child masks and their gradient overlaps ``|g|``.

    ``g = 2 sum_j alpha_j <c|A'^2|j> - 2 <c|A'|b>``. Raises
    :class:`TreeExhausted` if every child is already present.
    """
    cands = candidate_masks(tree.masks, decomposition, expansion)
    if cands.size == 0:
        raise TreeExhausted("all children of the expansion set are already nodes")
    ws = _Workspace(tree.root, spectrum, tree.masks, len(tree.masks), AtaConfig.ridge)
    g = ws.gradient(np.asarray(tree.alphas, dtype=np.float64))
    return cands, np.abs(g[cands])


def grow(tree: AnsatzTree, spectrum, decomposition: DiagonalPauliSum, cfg: AtaConfig | None = None,
         callback=None) -> AnsatzTree:
    """Greedy growth: re-solve all weights, add the child with the largest ``|g|``.

    Stops on ``max_depth``, ``loss_tol``, stagnation, exhaustion of children,
    or when ``callback(tree)`` returns True. Ties go to the smaller mask.
    The input tree is updated in place and returned.
    """
    cfg = cfg or AtaConfig()
    masks = list(tree.masks)
    ws = _Workspace(tree.root, spectrum, masks, cfg.max_depth, cfg.ridge)
    alpha, loss = ws.solve()
    history = [loss]
    reason = None
    while True:
        tree.masks, tree.alphas, tree.loss_history = list(masks), alpha, list(history)
        if callback is not None and callback(tree):
            reason = "callback"
            break
        if len(masks) >= cfg.max_depth:
            reason = "max_depth"
            break
        if loss <= cfg.loss_tol:
            reason = "loss_tol"
            break
        if cfg.stagnation_tol > 0 and len(history) >= 2:
            if history[-2] - history[-1] < cfg.stagnation_tol * history[-2]:
                reason = "stagnation"
                break
        cands = candidate_masks(masks, decomposition, cfg.expansion)
        if cands.size == 0:
            reason = "exhausted"
            break
        scores = np.abs(ws.gradient(alpha)[cands])
        pick = int(cands[int(np.argmax(scores))])
        ws.add(pick)
        masks.append(pick)
        alpha, loss = ws.solve(previous=alpha)
        history.append(loss)
    tree.stop_reason = reason
    return tree


def solve_system(b, spectrum, decomposition: DiagonalPauliSum, cfg: AtaConfig | None = None,
                 start_masks=(0,), callback=None) -> AnsatzTree:
    """Convenience wrapper: start a tree at ``b`` (any domain) and grow it."""
    root = b if isinstance(b, Statevector) else Statevector(np.asarray(b), POSITION)
    return grow(AnsatzTree.start(root, start_masks), spectrum, decomposition, cfg, callback)


@dataclass
class DepthResult:
    depth: int
    saturated: bool
    fidelity: float
    fidelities: list
    tree: AnsatzTree


def min_depth_for_fidelity(b, grid: GridSpec, target: float, cfg: AtaConfig | None = None,
                           x_oracle=None, start_masks=(0,)) -> DepthResult:
    """Smallest node count whose solution reaches ``target`` fidelity against the
    exact solution of ``A(c) x = b``.

    Growth runs against the piecewise-quadratic operator while fidelity is
    measured against the exact one. If the target is not reached before the
    tree stops, the result is reported as saturated with ``depth = 2**n``.
    ``start_masks`` seeds a warm start; the reported depth counts those nodes.
    """
    b = np.asarray(b)
    if cfg is None:
        cfg = AtaConfig(max_depth=grid.size, loss_tol=0.0)
    if x_oracle is None:
        x_oracle = solve_exact(b, grid).x
    lam = approx_spectrum(grid)
    decomposition = decompose_operator(lam)
    fids = []
    reached = []

    def check(tree):
        x = np.fft.ifft(tree.multiplier() * tree.root.amps, norm="ortho")
        f = fidelity(x, x_oracle)
        fids.append(f)
        if f >= target - 1e-12:
            reached.append(tree.depth)
            return True
        return False

    tree = solve_system(b, lam, decomposition, cfg, start_masks=start_masks, callback=check)
    if reached:
        return DepthResult(reached[0], False, fids[-1], fids, tree)
    return DepthResult(grid.size, True, max(fids), fids, tree)

