"""Stationary clusters: tree nodes that recur across many solves."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ata import AnsatzTree, AtaConfig, grow, solve_weights
from .grid import GridSpec, approx_spectrum
from .pauli import decompose_operator
from .state import FOURIER, Statevector


@dataclass
class ClusterReport:
    """Masks present in at least ``threshold`` of the analyzed trees.

    ``masks`` is ordered by descending occurrence, then ascending mask.
    """

    masks: list
    occurrence: dict = field(default_factory=dict)
    trees_analyzed: int = 0
    threshold: float = 1.0

    @property
    def size(self) -> int:
        return len(self.masks)

    def to_json_dict(self) -> dict:
        return {
            "masks": [int(m) for m in self.masks],
            "occurrence": {str(int(k)): int(v) for k, v in sorted(self.occurrence.items())},
            "trees_analyzed": self.trees_analyzed,
            "threshold": self.threshold,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, data: dict) -> "ClusterReport":
        occ = {int(k): int(v) for k, v in data["occurrence"].items()}
        return cls([int(m) for m in data["masks"]], occ, int(data["trees_analyzed"]), float(data["threshold"]))

    def histogram_to_csv(self, path):
        """``mask,count,fraction`` rows in report order, then the rest by count."""
        rows = sorted(self.occurrence.items(), key=lambda kv: (-kv[1], kv[0]))
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["mask", "count", "fraction"])
            for m, cnt in rows:
                writer.writerow([m, cnt, repr(cnt / self.trees_analyzed)])


def _mask_set(tree) -> set:
    masks = tree.masks if isinstance(tree, AnsatzTree) else tree
    return {int(m) for m in masks}


def detect(trees, threshold: float = 1.0) -> ClusterReport:
    """Cluster of masks found in at least ``ceil(threshold * len(trees))`` trees.

    ``trees`` may hold :class:`AnsatzTree` objects or plain mask sequences.
    """
    trees = list(trees)
    if not trees:
        raise ValueError("no trees to analyze")
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    counts = Counter()
    for t in trees:
        counts.update(_mask_set(t))
    need = max(1, math.ceil(threshold * len(trees) - 1e-9))
    chosen = sorted((m for m, k in counts.items() if k >= need), key=lambda m: (-counts[m], m))
    return ClusterReport(chosen, dict(counts), len(trees), threshold)


def warm_start(cluster, root, spectrum) -> AnsatzTree:
    """Tree seeded with every cluster mask and its weights solved immediately."""
    masks = cluster.masks if isinstance(cluster, ClusterReport) else list(cluster)
    if len(masks) == 0:
        raise ValueError("cluster is empty")
    if not isinstance(root, Statevector):
        root = Statevector(np.asarray(root))
    tree = AnsatzTree.start(root, masks)
    alpha, loss = solve_weights(tree, spectrum)
    tree.alphas = alpha
    tree.loss_history = [loss]
    return tree


def haar_roots(n: int, samples: int, seed=None) -> list:
    """Normalized complex Gaussian vectors (uniform on the unit sphere)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        out.append(v / np.linalg.norm(v))
    return out


def haar_random_study(n: int, samples: int, depth_cap: int = 50, c: float = 0.1, seed=None,
                      threshold: float = 1.0) -> ClusterReport:
    """Grow one tree per Haar-random root and intersect their node sets."""
    if samples < 2:
        raise ValueError("need at least two samples")
    lam = approx_spectrum(GridSpec.dimensionless(n, c))
    decomposition = decompose_operator(lam)
    cfg = AtaConfig(max_depth=depth_cap, loss_tol=0.0)
    trees = [grow(AnsatzTree.start(Statevector(v, FOURIER)), lam, decomposition, cfg)
             for v in haar_roots(n, samples, seed)]
    return detect(trees, threshold)


def trajectory_cluster(trajectory, threshold: float = 1.0, skip: int = 0) -> ClusterReport:
    """Cluster over the trees of an evolution (``run(..., keep_trees=True)``).

    Falls back to the stored per-step masks when trees were not kept.
    """
    if trajectory.trees:
        trees = trajectory.trees[skip:]
    else:
        trees = [s.tree_masks for s in trajectory.states[1:] if s.tree_masks][skip:]
    return detect(trees, threshold)


def smoothness_sweep(n: int, c: float, smoothness, n_steps: int, depth: int = 30, seed: int = 0,
                     threshold: float = 1.0) -> list:
    """Cluster size of one evolution per smoothness value.

    Returns ``[(G, ClusterReport), ...]``.
    """
    from .evolve import EvolveConfig, run
    from .sources import FieldSource, discretize_repr, field_seeds, normalize_pair, sample_field

    g = GridSpec.unit_run(n, c, n_steps)
    cfg = EvolveConfig(g, AtaConfig(max_depth=depth))
    out = []
    for G in smoothness:
        s_chi, s_f = field_seeds(seed, 2)
        chi = sample_field(G, 0, s_chi)
        f = normalize_pair(chi, sample_field(G, G, s_f))
        traj = run(discretize_repr(chi, n), FieldSource(f, n, n_steps), cfg, n_steps, track_oracle=False)
        out.append((G, trajectory_cluster(traj, threshold)))
    return out
