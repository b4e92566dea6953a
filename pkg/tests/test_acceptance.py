"""Acceptance criteria, one test per criterion.

Every test prints a single ``PASS``/``FAIL`` line (visible even without
``-s``) before asserting. ``python3 tests/test_acceptance.py`` runs the same
checks without pytest and prints only the summary lines.
"""

from __future__ import annotations

import sys
import time
from functools import reduce

import numpy as np
import pytest

from ata_heat import sources as S
from ata_heat.ata import AnsatzTree, AtaConfig, grow, min_depth_for_fidelity, solve_weights
from ata_heat.cluster import ClusterReport, haar_random_study, warm_start
from ata_heat.evolve import EvolveConfig, preparation_cost, run, stationary_profile
from ata_heat.grid import GridSpec, approx_spectrum, multidim_spectrum, step_matrix
from ata_heat.oracle import cross_check, dft_matrix, fidelity
from ata_heat.pauli import DiagonalPauliSum, decompose_operator, popcount, wht_analyze
from ata_heat.resources import ATA, HHL, ata_run_overhead, gate_counts, hhl_chain_probability
from ata_heat.state import FOURIER, Statevector, pauli_sum_from_vector, prepare_from_pauli_sum


def smooth_problem(n: int, g: GridSpec, G: int, seed: int) -> np.ndarray:
    """Single-step right-hand side ``c (dt f - chi)`` from a pair of smooth fields."""
    s_chi, s_f = S.field_seeds(seed, 2)
    chi = S.sample_field(G, 0, s_chi)
    f = S.normalize_pair(chi, S.sample_field(G, G, s_f))
    return g.c * (g.dt * S.discretize(f, n) - S.discretize(chi, n))


def criterion_1():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(4, 13))
        g = GridSpec.dimensionless(n, float(rng.uniform(0.01, 10.0)))
        worst = max(worst, cross_check(rng.standard_normal(g.size), g))
    elapsed = time.perf_counter() - t0
    return worst < 1e-10 and elapsed < 10.0, f"max diff {worst:.2e}, {elapsed:.2f} s"


def criterion_2():
    ok, counts = True, []
    for n in range(3, 13):
        lam = approx_spectrum(GridSpec.dimensionless(n, 0.1))
        full = wht_analyze(lam, prune_tol=0.0)
        high = np.abs(full.coeffs[popcount(full.masks) >= 3])
        terms = len(decompose_operator(lam))
        counts.append(f"n={n}:{terms}")
        ok &= (high.max(initial=0.0) < 1e-10) and terms <= n * (n + 1) // 2 + n + 1
    # pairs n(n-1)/2 plus n single Z plus identity equals n(n+1)/2 + 1
    return ok, "terms " + " ".join(counts)


def criterion_3():
    rng = np.random.default_rng(3)
    cs = (0.1, 1.0, 10.0)
    worst_rise = 0.0
    for i in range(50):
        c = cs[i % 3]
        g = GridSpec.unit_run(8, c, 200)
        lam = approx_spectrum(g)
        b = smooth_problem(8, g, 20, i) if i % 2 else rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size)
        tree = grow(AnsatzTree.start(Statevector(np.fft.fft(b, norm="ortho"), FOURIER)), lam,
                    decompose_operator(lam), AtaConfig(max_depth=64, loss_tol=0.0))
        worst_rise = max(worst_rise, float(np.max(np.diff(tree.loss_history), initial=-np.inf)))
    return worst_rise <= 1e-12, f"largest loss increase {worst_rise:.2e}"


def c4_medians():
    med = {}
    for n in range(6, 11):
        for c in (0.1, 1.0, 10.0):
            g = GridSpec.unit_run(n, c, 200)
            depths = []
            for seed in range(10):
                r = min_depth_for_fidelity(smooth_problem(n, g, 20, seed), g, 0.99)
                depths.append(r.depth)
            med[n, c] = float(np.median(depths))
    return med


def criterion_4():
    med = c4_medians()
    cs = (0.1, 1.0, 10.0)
    ok = all(med[n, cs[i + 1]] <= med[n, cs[i]] + 1 for n in range(6, 11) for i in range(2))
    ok &= all(med[n + 1, c] <= med[n, c] + 1 for c in cs for n in range(8, 10))
    rows = "; ".join(f"n={n}: " + "/".join(f"{med[n, c]:g}" for c in cs) for n in range(6, 11))
    return ok, f"median depths (c=0.1/1/10) {rows}"


def criterion_5():
    g = GridSpec.unit_run(6, 0.1, 200)
    results = [min_depth_for_fidelity(smooth_problem(6, g, 300, seed), g, 0.99) for seed in range(10)]
    saturated = sum(r.saturated for r in results)
    depths = [r.depth for r in results]
    return saturated >= 9, f"saturated {saturated}/10, depths {depths}"


def criterion_6():
    n = 8
    g = GridSpec.unit_run(n, 0.1, 5000)
    chi, src = S.heater_cooler_preset(n)
    target = stationary_profile(S.heater_cooler_field(n), g)
    prev = {}

    def converged(state):
        x = state.x_vector()
        done = "x" in prev and fidelity(x, prev["x"]) > 1 - 1e-10
        prev["x"] = x
        return done

    traj = run(chi, S.StaticSource(src), EvolveConfig(g, AtaConfig(max_depth=35)), 5000,
               track_oracle=False, stop_when=converged)
    fid = fidelity(traj.final_solution(), target)
    steps = traj.states[-1].step
    return fid >= 0.99 and steps <= 5000, f"fidelity {fid:.6f} after {steps} steps"


def criterion_7():
    n = 6
    g = GridSpec.unit_run(n, 0.1, 20)
    s_chi, s_f = S.field_seeds(1, 2)
    chi = S.sample_field(20, 0, s_chi)
    f = S.normalize_pair(chi, S.sample_field(20, 20, s_f))
    traj = run(S.discretize_repr(chi, n), S.FieldSource(f, n, 20),
               EvolveConfig(g, AtaConfig(max_depth=64, loss_tol=0.0), dual_path=True), 20)
    dual = [d.dual_path_fidelity for d in traj.diagnostics]
    return min(dual) >= 1 - 1e-8, f"min dual-path fidelity 1-{1 - min(dual):.1e}, final 1-{1 - dual[-1]:.1e}"


def c8_curves():
    n, steps = 9, 100
    g = GridSpec.unit_run(n, 2.0, steps)
    curves = {}
    for d_cut in (8, 16, 32):
        runs = []
        for seed in S.field_seeds(7, 10):
            s_chi, s_f = S.field_seeds(seed, 2)
            chi = S.sample_repr_initial(n, 8, s_chi)
            src = S.normalize_repr_pair(chi, S.sample_repr_source(n, 8, 20, steps, s_f))
            traj = run(chi, src, EvolveConfig(g, AtaConfig(max_depth=50), d_cut=d_cut), steps)
            runs.append(1.0 - traj.column("fidelity"))
        curves[d_cut] = np.mean(runs, axis=0)
    return curves


def criterion_8():
    curves = c8_curves()
    x = np.arange(1, 101)
    ok = curves[8][-1] >= curves[16][-1] >= curves[32][-1]
    parts = []
    for d_cut, m in curves.items():
        mono = bool(np.all(np.diff(m) >= 0))
        r2 = float(np.corrcoef(x, m)[0, 1] ** 2)
        ok &= mono and r2 >= 0.8
        parts.append(f"D={d_cut}: final {m[-1]:.3f} R2 {r2:.2f} monotone {mono}")
    return ok, "; ".join(parts)


def criterion_9():
    rng = np.random.default_rng(9)
    worst = -np.inf
    for i in range(50):
        n = 6 + i % 3
        lam = approx_spectrum(GridSpec.dimensionless(n, (0.1, 1.0, 10.0)[i % 3]))
        root = Statevector(rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n), FOURIER)
        _, cold = solve_weights(AnsatzTree.start(root), lam)
        masks = [0] + sorted(rng.choice(np.arange(1, 1 << n), size=5, replace=False).tolist())
        warm = warm_start(ClusterReport(masks, {}, 2), root, lam).loss_history[0]
        worst = max(worst, warm - cold)
    sizes = [haar_random_study(n, 10, depth_cap=50, seed=n).size for n in range(5, 10)]
    spread = max(sizes) / min(sizes)
    return worst <= 1e-12 and spread <= 2.0, f"max warm-cold {worst:.2e}; Haar sizes n=5..9 {sizes}"


def criterion_10():
    exact = hhl_chain_probability(0.5, 10).exact == 2.0 ** -10
    runs = ata_run_overhead(20000, 35) == 20000 * 64
    ratios = [gate_counts(n, ATA, 35) / gate_counts(n, HHL) for n in range(4, 21)]
    mono = all(a > b for a, b in zip(ratios, ratios[1:]))
    ok = exact and runs and mono and preparation_cost(35) == (6, 1 / 64)
    return ok, f"P_chain exact {exact}, overhead {ata_run_overhead(20000, 35)}, ratio monotone {mono}"


def zstring_dense(n: int, mask: int) -> np.ndarray:
    z = np.diag([1.0, -1.0])
    return reduce(np.kron, [z if (mask >> (n - 1 - q)) & 1 else np.eye(2) for q in range(n)])


def criterion_11():
    rng = np.random.default_rng(11)
    worst_trip, worst_b4 = 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        size = 1 << n
        k = int(rng.integers(1, size + 1))
        masks = np.sort(rng.choice(size, size=k, replace=False))
        p = DiagonalPauliSum(n, masks, rng.standard_normal(k) + 1j * rng.standard_normal(k))
        vec = prepare_from_pauli_sum(p).amps
        back = pauli_sum_from_vector(vec)
        worst_trip = max(worst_trip, float(np.max(np.abs(back.to_dense() - p.to_dense()))))
        op = sum(h * zstring_dense(n, int(m)) for m, h in zip(p.masks, p.coeffs))
        image = dft_matrix(n) @ vec
        worst_b4 = max(worst_b4, float(np.max(np.abs(image - np.diag(op) / np.sqrt(size)))))
    return max(worst_trip, worst_b4) < 1e-12, f"round trip {worst_trip:.1e}, diagonal match {worst_b4:.1e}"


def criterion_12():
    worst = 0.0
    for d_r in (2, 3):
        g = GridSpec.dimensionless(2, 0.3)
        a0 = step_matrix(g) + g.c * np.eye(g.size)
        dense = sum(reduce(np.kron, [a0 if j == i else np.eye(g.size) for j in range(d_r)]) for i in range(d_r))
        dense = dense - g.c * np.eye(g.size ** d_r)
        got = multidim_spectrum(g, d_r)
        worst = max(worst, float(np.max(np.abs(np.sort(got) - np.linalg.eigvalsh(dense)))))
        # eigenvalue order follows the Kronecker-product Fourier basis
        f = reduce(np.kron, [dft_matrix(g.n)] * d_r)
        worst = max(worst, float(np.max(np.abs(np.diag(f @ dense @ f.conj().T) - got))))
    return worst < 1e-10, f"max eigenvalue error {worst:.1e}"


CRITERIA = {
    1: ("oracle cross-validation", criterion_1),
    2: ("decomposition support", criterion_2),
    3: ("loss monotonicity", criterion_3),
    4: ("single-step depth trend", criterion_4),
    5: ("saturation at 64 nodes", criterion_5),
    6: ("stationary heater/cooler", criterion_6),
    7: ("dual-path consistency", criterion_7),
    8: ("dropout error growth", criterion_8),
    9: ("cluster properties", criterion_9),
    10: ("resource formulas", criterion_10),
    11: ("state preparation round trip", criterion_11),
    12: ("multidimensional spectrum", criterion_12),
}


def summary_line(idx: int, ok: bool, detail: str) -> str:
    name = CRITERIA[idx][0]
    return f"{'PASS' if ok else 'FAIL'} criterion {idx:2d} ({name}): {detail}"


@pytest.mark.parametrize("idx", sorted(CRITERIA))
def test_criterion(idx, capsys):
    ok, detail = CRITERIA[idx][1]()
    with capsys.disabled():
        print("\n" + summary_line(idx, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for i, (_, fn) in sorted(CRITERIA.items()):
        ok, detail = fn()
        failed += not ok
        print(summary_line(i, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
