"""Dense statevector engine.

Every node unitary of the Ansatz tree has the form ``F^dagger Z_mask F`` with
``F`` the unitary DFT, so in the Fourier domain a node is just a sign
pattern. States are therefore kept in the Fourier domain while a time step
is being solved and transformed back only for reporting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .pauli import DiagonalPauliSum, _qubits_for_length, wht_analyze, wht_synthesize

POSITION = "position"
FOURIER = "fourier"


class DomainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Statevector:
    """Complex amplitude vector of length ``2**n`` tagged with its domain.

    Normalization is not enforced; physical right-hand sides carry scale.
    """

    amps: np.ndarray
    domain: str = POSITION

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a 1-D array")
        _qubits_for_length(amps.shape[0])
        if self.domain not in (POSITION, FOURIER):
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return self.amps.shape[0].bit_length() - 1

    @property
    def size(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "Statevector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Statevector(self.amps / nrm, self.domain)

    def scaled(self, factor) -> "Statevector":
        return Statevector(self.amps * factor, self.domain)

    def to_csv(self, path):
        """Write ``index,real,imag`` rows."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "real", "imag"])
            for i, a in enumerate(self.amps):
                writer.writerow([i, repr(float(a.real)), repr(float(a.imag))])


def basis_state(n: int, index: int = 0, domain: str = POSITION) -> Statevector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(amps, domain)


def _require(s: Statevector, domain: str):
    if s.domain != domain:
        raise DomainError(f"expected a {domain}-domain state, got {s.domain}")


def fourier(s: Statevector) -> Statevector:
    """Unitary DFT, kernel ``exp(-2j pi j k / N) / sqrt(N)``."""
    _require(s, POSITION)
    return Statevector(np.fft.fft(s.amps, norm="ortho"), FOURIER)


def inverse_fourier(s: Statevector) -> Statevector:
    _require(s, FOURIER)
    return Statevector(np.fft.ifft(s.amps, norm="ortho"), POSITION)


def zstring_signs(n: int, mask: int) -> np.ndarray:
    return kernels.walsh_signs(np.array([mask], dtype=np.int64), n)[0]


def apply_zstring(s: Statevector, mask: int) -> Statevector:
    """Multiply Fourier amplitude ``k`` by ``(-1)**popcount(mask & k)``."""
    _require(s, FOURIER)
    return Statevector(s.amps * zstring_signs(s.n, mask), FOURIER)


def apply_node_sequence(s: Statevector, masks) -> Statevector:
    """Apply ``U_{v_j} ... U_{v_1}`` one unitary at a time (Fourier domain)."""
    for m in masks:
        s = apply_zstring(s, int(m))
    return s


def apply_diag_sum(s: Statevector, p: DiagonalPauliSum) -> Statevector:
    _require(s, FOURIER)
    if p.n != s.n:
        raise ValueError(f"qubit-count mismatch: state has {s.n}, operator {p.n}")
    return Statevector(s.amps * wht_synthesize(p), FOURIER)


def prepare_from_pauli_sum(p: DiagonalPauliSum) -> Statevector:
    """Position-domain vector ``F^dagger (sum_p h_p Z_p) F |0...0>``.

    Its Fourier image equals the synthesized diagonal divided by ``sqrt(N)``.
    """
    root = fourier(basis_state(p.n, 0))
    return inverse_fourier(apply_diag_sum(root, p))


def fourier_image_of_pauli_sum(p: DiagonalPauliSum) -> np.ndarray:
    """Fourier amplitudes of :func:`prepare_from_pauli_sum` without the round trip."""
    return wht_synthesize(p) / np.sqrt(1 << p.n)


def pauli_sum_from_vector(v) -> DiagonalPauliSum:
    """Inverse of :func:`prepare_from_pauli_sum` for an arbitrary vector."""
    v = np.asarray(v, dtype=np.complex128)
    image = np.fft.fft(v, norm="ortho") * np.sqrt(v.shape[0])
    if np.all(np.abs(image.imag) <= 1e-15 * max(1.0, np.abs(image).max())):
        image = image.real
    return wht_analyze(image)


def overlaps(root: Statevector, spectrum, masks_i, masks_j=None):
    """Tree-node overlaps against ``A' = F^dagger diag(spectrum) F``.

    Returns ``(gram, drive)`` with ``gram[a, b] = <i_a| A'^2 |j_b>`` and
    ``drive[a] = <i_a| A' |root>``, where node ``|i>`` is ``F^dagger Z_i F |root>``.
    Both are real because every node only flips signs of Fourier amplitudes.
    """
    _require(root, FOURIER)
    lam = np.asarray(spectrum, dtype=np.float64)
    w = np.abs(root.amps) ** 2
    si = kernels.walsh_signs(np.asarray(masks_i, dtype=np.int64), root.n)
    sj = si if masks_j is None else kernels.walsh_signs(np.asarray(masks_j, dtype=np.int64), root.n)
    gram = (si * (w * lam * lam)) @ sj.T
    drive = si @ (w * lam)
    return gram, drive


def reality_leakage(x) -> float:
    """Imaginary l2 mass fraction ``||Im x|| / ||x||`` of a position-domain vector."""
    x = np.asarray(x)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(x.imag) / nrm)
