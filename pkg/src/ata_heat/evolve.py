"""Time stepping with the Ansatz-tree solver.

The right-hand side ``b^t`` is stored as a Z-string sum ``h`` with
``b^t = scale * F^dagger diag(W h) F |0>`` (``W`` = Walsh synthesis). A
solved tree is itself a Z-string sum in the Fourier domain, so the solution
is ``xor_convolve(tree, h)`` and the next right-hand side is a linear
combination of that and the source sum. Dropout keeps the ``d_cut`` largest
coefficients after the source has been added.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .ata import AnsatzTree, AtaConfig, grow
from .grid import GridSpec, approx_spectrum, exact_spectrum, lowpass_mask
from .oracle import fidelity
from .pauli import DiagonalPauliSum, decompose_operator, dropped_mass, truncate_top, xor_convolve
from .state import FOURIER, Statevector, fourier_image_of_pauli_sum, reality_leakage

SCHEME = "scheme"
ADDITIVE = "additive"

TRAJECTORY_COLUMNS = ("step", "loss", "depth", "fidelity", "dropped_mass", "reality_leakage", "term_count")


class RepresentationBlowUp(RuntimeWarning):
    pass


@dataclass
class EvolveConfig:
    """``d_cut=None`` disables dropout.

    ``gamma_mode="scheme"`` forms the next right-hand side as
    ``c (dt f - x)``; ``"additive"`` uses ``x + gamma f`` with ``gamma``
    defaulting to ``-dt``. The two agree for a single step up to the factor
    ``-c`` but differ over many steps.
    """

    grid: GridSpec
    ata: AtaConfig = field(default_factory=AtaConfig)
    d_cut: int | None = None
    gamma_mode: str = SCHEME
    gamma: float | None = None
    lowpass_k: int | None = None
    warm_start: tuple = ()
    term_cap: int | None = None
    dual_path: bool = False

    def __post_init__(self):
        if self.d_cut is not None and self.d_cut < 1:
            raise ValueError("d_cut must be >= 1")
        if self.gamma_mode not in (SCHEME, ADDITIVE):
            raise ValueError(f"unknown gamma_mode {self.gamma_mode!r}")

    @property
    def coupling(self):
        """``(a, s)`` such that the next right-hand side is ``a * x + s * f``."""
        g = self.grid
        if self.gamma_mode == SCHEME:
            return -g.c, g.c * g.dt
        return 1.0, (-g.dt if self.gamma is None else self.gamma)


@dataclass
class StepDiagnostics:
    step: int
    loss: float
    depth: int
    fidelity: float | None
    dropped_mass: float
    reality_leakage: float
    term_count: int
    stop_reason: str | None = None
    dual_path_fidelity: float | None = None

    def row(self):
        return [self.step, self.loss, self.depth, self.fidelity, self.dropped_mass,
                self.reality_leakage, self.term_count]


@dataclass
class EvolveState:
    """Right-hand side ``b^t`` in representation form plus the last solution."""

    step: int
    b_repr: DiagonalPauliSum
    b_scale: float
    x_repr: DiagonalPauliSum | None = None
    x_scale: float = 1.0
    diagnostics: StepDiagnostics | None = None
    tree_masks: tuple = ()

    def b_vector(self) -> np.ndarray:
        return _position(self.b_repr, self.b_scale)

    def x_vector(self) -> np.ndarray | None:
        if self.x_repr is None:
            return None
        return _position(self.x_repr, self.x_scale)


def _position(rep: DiagonalPauliSum, scale: float) -> np.ndarray:
    return np.fft.ifft(fourier_image_of_pauli_sum(rep), norm="ortho") * scale


def _normalized(rep: DiagonalPauliSum):
    nrm = rep.norm()
    if nrm == 0.0:
        return rep, 0.0
    return rep * (1.0 / nrm), nrm


def initial_state(initial_repr: DiagonalPauliSum, source_repr: DiagonalPauliSum | None,
                  cfg: EvolveConfig) -> EvolveState:
    """``b^0`` from the initial temperature and the source at step 0."""
    a, s = cfg.coupling
    b = initial_repr * a
    if source_repr is not None and len(source_repr):
        b = b + source_repr * s
    b, scale = _normalized(b)
    if cfg.d_cut is not None:
        b = truncate_top(b, cfg.d_cut)
    return EvolveState(step=0, b_repr=b, b_scale=scale, x_repr=initial_repr, x_scale=1.0)


class _Operator:
    """Cached spectrum and decomposition for one grid."""

    def __init__(self, g: GridSpec):
        self.lam = approx_spectrum(g)
        self.decomposition = decompose_operator(self.lam)


def step(state: EvolveState, source_repr: DiagonalPauliSum | None, cfg: EvolveConfig,
         oracle_x=None, explicit_b=None, explicit_source=None, _op: _Operator | None = None):
    """Advance one time step.

    ``source_repr`` is the source entering the *next* right-hand side.
    ``oracle_x`` (position domain) enables the fidelity diagnostic. When
    ``explicit_b`` is given, the same tree is also applied to that dense
    vector and the dense next right-hand side is returned alongside.

    Returns ``(new_state, tree, explicit_next)``.
    """
    g = cfg.grid
    op = _op or _Operator(g)
    a, s = cfg.coupling
    n = state.b_repr.n

    if state.b_scale == 0.0 or len(state.b_repr) == 0:
        tree = None
        x_repr = DiagonalPauliSum.zero(n)
        loss, depth, reason = 0.0, 0, "zero_rhs"
    else:
        b_hat = fourier_image_of_pauli_sum(state.b_repr) * state.b_scale
        root_amps = b_hat
        if cfg.lowpass_k is not None:
            root_amps = np.where(lowpass_mask(n, cfg.lowpass_k), b_hat, 0.0)
        tree = AnsatzTree.start(Statevector(root_amps, FOURIER), (0,) + tuple(cfg.warm_start))
        grow(tree, op.lam, op.decomposition, cfg.ata)
        x_repr = xor_convolve(tree.as_pauli_sum(), state.b_repr)
        loss, depth, reason = tree.loss_history[-1], tree.depth, tree.stop_reason
    x_scale = state.b_scale

    nxt = x_repr * (a * x_scale)
    if source_repr is not None and len(source_repr):
        nxt = nxt + source_repr * s
    term_count = len(nxt)
    if cfg.term_cap is not None and term_count > cfg.term_cap:
        warnings.warn(f"representation has {term_count} terms (cap {cfg.term_cap})", RepresentationBlowUp)
    nxt, scale = _normalized(nxt)

    dual = None
    explicit_next = None
    if explicit_b is not None:
        q = tree.multiplier() if tree is not None else np.zeros(g.size)
        x_vec = np.fft.ifft(q * np.fft.fft(explicit_b))
        f_vec = 0.0 if explicit_source is None else explicit_source
        explicit_next = a * x_vec + s * f_vec
        if scale > 0:
            dual = fidelity(explicit_next, _position(nxt, scale))

    kept = nxt
    dropped = 0.0
    if cfg.d_cut is not None:
        kept = truncate_top(nxt, cfg.d_cut)
        dropped = dropped_mass(nxt, kept)

    x_pos = _position(x_repr, x_scale)
    fid = None
    if oracle_x is not None and np.linalg.norm(x_pos) > 0 and np.linalg.norm(oracle_x) > 0:
        fid = fidelity(x_pos, oracle_x)
    diag = StepDiagnostics(
        step=state.step + 1, loss=float(loss), depth=depth, fidelity=fid, dropped_mass=dropped,
        reality_leakage=reality_leakage(x_pos), term_count=term_count, stop_reason=reason,
        dual_path_fidelity=dual,
    )
    new_state = EvolveState(
        step=state.step + 1, b_repr=kept, b_scale=scale, x_repr=x_repr, x_scale=x_scale,
        diagnostics=diag, tree_masks=tuple(tree.masks) if tree is not None else (),
    )
    return new_state, tree, explicit_next


@dataclass
class Trajectory:
    states: list
    oracle: np.ndarray | None = None
    trees: list = field(default_factory=list)

    @property
    def diagnostics(self) -> list:
        return [s.diagnostics for s in self.states if s.diagnostics is not None]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(d, name) if getattr(d, name) is not None else np.nan
                         for d in self.diagnostics], dtype=float)

    def final_solution(self) -> np.ndarray:
        return self.states[-1].x_vector()

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRAJECTORY_COLUMNS)
            for d in self.diagnostics:
                writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v)
                                 for v in d.row()])


def _source_at(source_model, tau):
    if source_model is None:
        return None
    return source_model(tau)


def run(initial_repr: DiagonalPauliSum, source_model, cfg: EvolveConfig, n_steps: int,
        track_oracle: bool = True, keep_trees: bool = False, stop_when=None) -> Trajectory:
    """Evolve ``n_steps`` implicit steps from the initial temperature.

    ``source_model(step)`` returns the source Z-string sum ``f^step`` (or
    ``None``). With ``track_oracle`` the exact implicit-scheme trajectory is
    advanced alongside and each step records the fidelity against it.
    ``stop_when(state)`` may end the run early.
    """
    g = cfg.grid
    op = _Operator(g)
    a, s = cfg.coupling
    f_repr = _source_at(source_model, 0)
    state = initial_state(initial_repr, f_repr, cfg)
    states = [state]
    trees = []

    u = _position(initial_repr, 1.0) if track_oracle else None
    explicit = state.b_vector() if cfg.dual_path else None
    lam_exact = exact_spectrum(g)

    for tau in range(n_steps):
        f_now = f_repr
        f_repr = _source_at(source_model, tau + 1)
        oracle_x = None
        if track_oracle:
            f_vec = 0.0 if f_now is None else _position(f_now, 1.0)
            rhs = a * u + s * f_vec
            u = np.fft.ifft(np.fft.fft(rhs) / lam_exact)
            oracle_x = u
        f_next_vec = None
        if cfg.dual_path and f_repr is not None:
            f_next_vec = _position(f_repr, 1.0)
        state, tree, explicit = step(state, f_repr, cfg, oracle_x=oracle_x, explicit_b=explicit,
                                     explicit_source=f_next_vec, _op=op)
        states.append(state)
        if keep_trees and tree is not None:
            trees.append(tree)
        if stop_when is not None and stop_when(state):
            break
    oracle = u if track_oracle else None
    return Trajectory(states=states, oracle=oracle, trees=trees)


def stationary_profile(source_vec, g: GridSpec) -> np.ndarray:
    """Zero-mean steady state of the implicit scheme: ``A(0) U = c dt f``.

    Requires a source with zero total; the mean mode is set to zero.
    """
    f_hat = np.fft.fft(np.asarray(source_vec, dtype=np.complex128))
    lam0 = exact_spectrum(g) + g.c
    u_hat = np.zeros_like(f_hat)
    u_hat[1:] = g.c * g.dt * f_hat[1:] / lam0[1:]
    return np.fft.ifft(u_hat)


def preparation_cost(depth: int):
    """Ancilla qubits ``m = ceil(log2 d)`` and success probability ``2**-m``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    m = (depth - 1).bit_length()
    return m, 1.0 / (1 << m)
