"""Discretization of the periodic heat equation and the spectra of its
implicit-step matrix.

The implicit step solves ``A(c) U^{t+1} = c (dt f^t - U^t)`` where ``A(c)``
is the cyclic tridiagonal matrix with ``-2 - c`` on the diagonal and ones on
the off-diagonals and corners. ``A`` is circulant, so it is diagonal in the
discrete Fourier basis (forward kernel ``exp(-2j*pi*j*k/N)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_SPECTRUM_QUBITS = 24


class CapacityError(ValueError):
    """Requested object does not fit the desk-scale size budget."""


@dataclass(frozen=True)
class GridSpec:
    """Grid of ``N = 2**n`` periodic points plus the time step.

    ``c = dz**2 / (a2 * dt)`` is the only parameter the linear system sees;
    the physical triple is kept so that source terms can be scaled by ``dt``.
    Use one of the constructors rather than filling all fields by hand.
    """

    n: int
    c: float
    a2: float
    dz: float
    dt: float
    n_t: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.c > 0:
            raise ValueError(f"grid parameter c must be positive, got {self.c}")
        if not (self.dz > 0 and self.dt > 0 and self.a2 > 0):
            raise ValueError("dz, dt and a2 must be positive")
        if self.n_t < 0:
            raise ValueError("n_t must be non-negative")
        lhs = self.c * self.a2 * self.dt
        if abs(lhs - self.dz**2) > 1e-12 * self.dz**2:
            raise ValueError("inconsistent grid: c * a2 * dt != dz**2")

    @classmethod
    def dimensionless(cls, n: int, c: float, n_t: int = 1) -> "GridSpec":
        """Only ``(n, c)`` given: ``a2 = dt = 1`` and ``dz = sqrt(c)``."""
        return cls(n=n, c=float(c), a2=1.0, dz=math.sqrt(c), dt=1.0, n_t=n_t)

    @classmethod
    def from_physical(cls, n: int, c: float, a2: float, dt: float, n_t: int = 1) -> "GridSpec":
        dz = math.sqrt(c * a2 * dt)
        return cls(n=n, c=float(c), a2=float(a2), dz=dz, dt=float(dt), n_t=n_t)

    @classmethod
    def unit_run(cls, n: int, c: float, n_t: int) -> "GridSpec":
        """Unit spatial period and unit total run time split into ``n_t`` steps.

        ``dz = 2**-n`` and ``dt = 1/n_t``; the diffusivity follows from ``c``.
        This is the convention under which source fields with ``t`` in [0, 1]
        inject a total heat comparable to the initial heat.
        """
        n_t = max(int(n_t), 1)
        dz = 2.0 ** -n
        dt = 1.0 / n_t
        return cls(n=n, c=float(c), a2=dz * dz / (c * dt), dz=dz, dt=dt, n_t=n_t)

    @property
    def size(self) -> int:
        return 1 << self.n


def wave_indices(n: int) -> np.ndarray:
    return np.arange(1 << n)


def folded_wave_indices(n: int) -> np.ndarray:
    """``min(k, N - k)``: distance of each Fourier index from zero frequency."""
    k = wave_indices(n)
    return np.minimum(k, (1 << n) - k)


def exact_spectrum(g: GridSpec) -> np.ndarray:
    """Eigenvalues ``-c - 4 sin^2(pi k / N)`` of ``A(c)``, indexed by wave index k."""
    k = wave_indices(g.n)
    return -g.c - 4.0 * np.sin(np.pi * k / g.size) ** 2


def approx_spectrum(g: GridSpec) -> np.ndarray:
    """Piecewise-quadratic replacement ``-c - pi^2 (|k/2^(n-1) - 1| - 1)^2``.

    Agrees with :func:`exact_spectrum` to fourth order in ``k/N`` near
    ``k = 0`` (and symmetrically near ``k = N``) and is a quadratic
    polynomial in the bits of ``k``, which makes its Walsh expansion 2-local.
    """
    k = wave_indices(g.n)
    half = 1 << (g.n - 1)
    return -g.c - np.pi**2 * (np.abs(k / half - 1.0) - 1.0) ** 2


def lowpass_mask(n: int, k_cut: int) -> np.ndarray:
    """Boolean mask of Fourier modes with ``min(k, N-k) <= k_cut``."""
    return folded_wave_indices(n) <= k_cut


def multidim_spectrum(g: GridSpec, d_r: int, max_qubits: int = MAX_SPECTRUM_QUBITS) -> np.ndarray:
    """Spectrum of the Kronecker sum ``sum_j I..A(0)..I - c I`` over ``d_r`` axes.

    The flat index follows ``np.kron`` ordering: the first axis is the most
    significant digit of the multi-index.
    """
    if d_r < 1:
        raise ValueError("d_r must be >= 1")
    if g.n * d_r > max_qubits:
        raise CapacityError(f"{g.n * d_r} qubits exceed the spectrum budget of {max_qubits}")
    base = -4.0 * np.sin(np.pi * wave_indices(g.n) / g.size) ** 2
    total = np.zeros(1)
    for _ in range(d_r):
        total = (total[:, None] + base[None, :]).ravel()
    return total - g.c


def rhs_from_state(u, f, g: GridSpec) -> np.ndarray:
    """Right-hand side ``c (dt f - u)`` of the implicit step."""
    u = np.asarray(u)
    f = np.asarray(f)
    if u.shape != (g.size,) or f.shape != (g.size,):
        raise ValueError(f"expected vectors of length {g.size}, got {u.shape} and {f.shape}")
    return g.c * (g.dt * f - u)


def step_matrix(g: GridSpec) -> np.ndarray:
    """Dense ``A(c)``; small grids only."""
    if g.n > 12:
        raise CapacityError("dense step matrix limited to n <= 12")
    size = g.size
    a = np.zeros((size, size))
    idx = np.arange(size)
    a[idx, idx] = -2.0 - g.c
    a[idx, (idx + 1) % size] += 1.0
    a[idx, (idx - 1) % size] += 1.0
    return a
