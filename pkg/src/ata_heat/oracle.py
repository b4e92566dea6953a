"""Exact classical references for the implicit heat step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import CapacityError, GridSpec, exact_spectrum
from .pauli import DiagonalPauliSum, wht_synthesize

SPECTRAL = "spectral"
TRIDIAGONAL = "tridiagonal"


@dataclass
class OracleSolution:
    x: np.ndarray
    residual: float
    method: str


def apply_step_matrix(x, c: float) -> np.ndarray:
    """``A(c) x`` by stencil (periodic)."""
    x = np.asarray(x)
    return np.roll(x, 1) + np.roll(x, -1) - (2.0 + c) * x


def relative_residual(x, b, c: float) -> float:
    nb = np.linalg.norm(b)
    r = np.linalg.norm(apply_step_matrix(x, c) - b)
    return float(r / nb) if nb > 0 else float(r)


def solve_exact(b, g: GridSpec, method: str = SPECTRAL) -> OracleSolution:
    """Solve ``A(c) x = b`` exactly.

    ``spectral`` divides Fourier modes by the exact eigenvalues (all lie in
    ``[-c-4, -c]`` and are nonzero for ``c > 0``); ``tridiagonal`` runs the
    Thomas sweep with the Sherman-Morrison corner correction. Complex
    right-hand sides are accepted: ``A`` is real, so the real and imaginary
    parts are solved independently.
    """
    b = np.asarray(b)
    if b.shape != (g.size,):
        raise ValueError(f"expected length {g.size}, got {b.shape}")
    if method == SPECTRAL:
        x = np.fft.ifft(np.fft.fft(b) / exact_spectrum(g))
        if not np.iscomplexobj(b):
            x = x.real
    elif method == TRIDIAGONAL:
        x = kernels.thomas_cyclic(-2.0 - g.c, 1.0, b)
    else:
        raise ValueError(f"unknown method {method!r}")
    return OracleSolution(x=x, residual=relative_residual(x, b, g.c), method=method)


def cross_check(b, g: GridSpec) -> float:
    """Max abs difference between the spectral and tridiagonal solutions."""
    xs = solve_exact(b, g, SPECTRAL).x
    xt = solve_exact(b, g, TRIDIAGONAL).x
    return float(np.max(np.abs(xs - xt)))


def evolve_exact(chi, source_model, g: GridSpec, n_steps: int, method: str = SPECTRAL) -> np.ndarray:
    """Implicit-scheme trajectory ``U^0 .. U^{n_steps}``, shape ``(n_steps+1, N)``.

    ``source_model(step)`` returns the position-domain source ``f^step`` or
    ``None`` for no source.
    """
    u = np.asarray(chi)
    dtype = np.complex128 if np.iscomplexobj(u) else np.float64
    out = [u.astype(dtype)]
    zero = np.zeros(g.size)
    for tau in range(n_steps):
        f = source_model(tau) if source_model is not None else None
        f = zero if f is None else np.asarray(f)
        if np.iscomplexobj(f) and dtype == np.float64:
            dtype = np.complex128
        b = g.c * (g.dt * f - out[-1])
        out.append(solve_exact(b, g, method).x.astype(dtype))
    return np.array(out)


def fidelity(x, y) -> float:
    """``|<x|y>| / (||x|| ||y||)``; invariant under complex rescaling of either side."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError("fidelity needs vectors of equal length")
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("fidelity is undefined for a zero vector")
    return float(min(1.0, abs(np.vdot(x, y)) / (nx * ny)))


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix built from its definition (no FFT)."""
    size = 1 << n
    jk = np.outer(np.arange(size), np.arange(size))
    return np.exp(-2j * np.pi * jk / size) / np.sqrt(size)


def dense_reference(n: int, operator) -> np.ndarray:
    """Dense ``F^dagger diag(d) F`` for a spectrum or a :class:`DiagonalPauliSum`."""
    if n > 10:
        raise CapacityError("dense reference limited to n <= 10")
    if isinstance(operator, DiagonalPauliSum):
        diag = wht_synthesize(operator)
    else:
        diag = np.asarray(operator)
    if diag.shape != (1 << n,):
        raise ValueError("operator size does not match n")
    f = dft_matrix(n)
    return f.conj().T @ (diag[:, None] * f)
