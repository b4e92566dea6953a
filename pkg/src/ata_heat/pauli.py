"""Diagonal operators as sparse sums of Z-strings.

A Z-string is identified by an integer mask: bit ``s`` set means Pauli Z on
qubit ``s``. Its diagonal is ``(-1)**popcount(mask & k)``. A sum
``sum_p h_p Z_p`` therefore has diagonal ``D_k = sum_p h_p (-1)**popcount(p & k)``
and the map between ``h`` and ``D`` is the Walsh-Hadamard transform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels

PRUNE_TOL = 1e-14
DECOMPOSITION_TOL = 1e-10
# sparse XOR products are accumulated into a dense buffer up to this size
_DENSE_ACCUMULATOR_QUBITS = 22


class DecompositionError(ValueError):
    """Spectrum is not piecewise quadratic: Walsh mass on masks of weight > 2."""


def popcount(masks):
    return np.bitwise_count(np.asarray(masks, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class DiagonalPauliSum:
    """Immutable sparse map ``mask -> coefficient`` on ``n`` qubits.

    ``masks`` is a strictly increasing int64 array and ``coeffs`` the matching
    float64 (or complex128) array. Coefficients may be complex: the Walsh
    expansion of the Fourier image of a real field is complex in general.
    """

    n: int
    masks: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=np.int64)
        coeffs = np.asarray(self.coeffs)
        if coeffs.dtype.kind not in "fc":
            coeffs = coeffs.astype(np.float64)
        if masks.shape != coeffs.shape or masks.ndim != 1:
            raise ValueError("masks and coeffs must be 1-D arrays of equal length")
        if masks.size:
            if masks.min() < 0 or masks.max() >= (1 << self.n):
                raise ValueError(f"masks must lie in [0, 2**{self.n})")
            if np.any(np.diff(masks) <= 0):
                raise ValueError("masks must be strictly increasing")
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "coeffs", coeffs)

    # construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, n: int, terms, prune_tol: float = 0.0) -> "DiagonalPauliSum":
        """Build from a ``{mask: coeff}`` mapping or an iterable of pairs.

        Repeated masks are summed.
        """
        items = list(terms.items()) if hasattr(terms, "items") else list(terms)
        if not items:
            return cls.zero(n)
        masks = np.array([int(m) for m, _ in items], dtype=np.int64)
        coeffs = np.array([c for _, c in items])
        uniq, inv = np.unique(masks, return_inverse=True)
        summed = np.zeros(uniq.size, dtype=np.result_type(coeffs.dtype, np.float64))
        np.add.at(summed, inv, coeffs)
        return cls(n, uniq, summed).pruned(prune_tol)

    @classmethod
    def zero(cls, n: int) -> "DiagonalPauliSum":
        return cls(n, np.zeros(0, dtype=np.int64), np.zeros(0))

    @classmethod
    def identity(cls, n: int, scale=1.0) -> "DiagonalPauliSum":
        return cls(n, np.zeros(1, dtype=np.int64), np.array([scale]))

    @classmethod
    def from_dense(cls, coeffs, prune_tol: float = PRUNE_TOL) -> "DiagonalPauliSum":
        """From a length-``2**n`` coefficient vector indexed by mask."""
        coeffs = np.asarray(coeffs)
        n = _qubits_for_length(coeffs.shape[0])
        keep = np.flatnonzero(np.abs(coeffs) > prune_tol)
        return cls(n, keep.astype(np.int64), coeffs[keep].copy())

    # views --------------------------------------------------------------

    def __len__(self):
        return int(self.masks.size)

    def __iter__(self):
        return iter(zip(self.masks.tolist(), self.coeffs.tolist()))

    def terms(self) -> dict:
        return dict(zip(self.masks.tolist(), self.coeffs.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=self.coeffs.dtype)
        out[self.masks] = self.coeffs
        return out

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    def norm(self) -> float:
        """l2 norm of the coefficient vector."""
        return float(np.linalg.norm(self.coeffs))

    def max_weight(self) -> int:
        return int(popcount(self.masks).max()) if self.masks.size else 0

    # arithmetic ---------------------------------------------------------

    def pruned(self, tol: float = PRUNE_TOL) -> "DiagonalPauliSum":
        keep = np.abs(self.coeffs) > tol
        if keep.all():
            return self
        return DiagonalPauliSum(self.n, self.masks[keep], self.coeffs[keep])

    def __mul__(self, scalar) -> "DiagonalPauliSum":
        return DiagonalPauliSum(self.n, self.masks, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "DiagonalPauliSum":
        return self * -1.0

    def __add__(self, other: "DiagonalPauliSum") -> "DiagonalPauliSum":
        _check_same_n(self, other)
        masks = np.concatenate([self.masks, other.masks])
        coeffs = np.concatenate([self.coeffs, other.coeffs])
        if masks.size == 0:
            return DiagonalPauliSum.zero(self.n)
        uniq, inv = np.unique(masks, return_inverse=True)
        summed = np.zeros(uniq.size, dtype=coeffs.dtype)
        np.add.at(summed, inv, coeffs)
        nz = summed != 0
        return DiagonalPauliSum(self.n, uniq[nz], summed[nz])

    def __sub__(self, other: "DiagonalPauliSum") -> "DiagonalPauliSum":
        return self + (-other)

    # serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        """``{"n": n, "terms": [[mask, coeff], ...]}`` with masks ascending.

        Complex coefficients are written as ``[re, im]`` pairs.
        """
        if self.is_real:
            terms = [[int(m), float(c)] for m, c in zip(self.masks, self.coeffs)]
        else:
            terms = [[int(m), [float(c.real), float(c.imag)]] for m, c in zip(self.masks, self.coeffs)]
        return {"n": int(self.n), "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiagonalPauliSum":
        n = int(data["n"])
        terms = []
        for mask, coeff in data["terms"]:
            if isinstance(coeff, (list, tuple)):
                coeff = complex(coeff[0], coeff[1])
            terms.append((int(mask), coeff))
        return cls.from_terms(n, terms)

    @classmethod
    def from_json(cls, text: str) -> "DiagonalPauliSum":
        return cls.from_json_dict(json.loads(text))

    def __repr__(self):
        shown = ", ".join(f"{m}: {c:.6g}" for m, c in list(self)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"DiagonalPauliSum(n={self.n}, {{{shown}{more}}})"


def _qubits_for_length(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise ValueError(f"length {length} is not a power of two")
    return length.bit_length() - 1


def _check_same_n(a: DiagonalPauliSum, b: DiagonalPauliSum):
    if a.n != b.n:
        raise ValueError(f"qubit-count mismatch: {a.n} vs {b.n}")


def wht_analyze(diag, prune_tol: float = PRUNE_TOL) -> DiagonalPauliSum:
    """Z-string coefficients ``h_p = 2**-n sum_k D_k (-1)**popcount(p & k)``."""
    diag = np.asarray(diag)
    _qubits_for_length(diag.shape[0])
    coeffs = kernels.fwht(diag) / diag.shape[0]
    return DiagonalPauliSum.from_dense(coeffs, prune_tol=prune_tol)


def wht_synthesize(p: DiagonalPauliSum) -> np.ndarray:
    """Diagonal of the operator ``sum_p h_p Z_p`` (inverse of :func:`wht_analyze`)."""
    return kernels.fwht(p.to_dense())


def decompose_operator(spectrum, tol: float = DECOMPOSITION_TOL) -> DiagonalPauliSum:
    """Z-string decomposition of a piecewise-quadratic spectrum.

    Raises :class:`DecompositionError` if any mask of weight three or more
    carries a coefficient above ``tol``.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    _qubits_for_length(spectrum.shape[0])
    dense = kernels.fwht(spectrum) / spectrum.shape[0]
    heavy = (popcount(np.arange(dense.size)) > 2) & (np.abs(dense) > tol)
    if heavy.any():
        worst = int(np.argmax(np.where(heavy, np.abs(dense), 0.0)))
        raise DecompositionError(
            f"{int(heavy.sum())} masks of weight > 2 above {tol:g}; "
            f"largest is mask {worst} with |h| = {abs(dense[worst]):.3e}"
        )
    return DiagonalPauliSum.from_dense(dense, prune_tol=tol)


def xor_convolve(a: DiagonalPauliSum, b: DiagonalPauliSum, prune_tol: float = PRUNE_TOL) -> DiagonalPauliSum:
    """Product of two Z-string sums: coefficient of ``m`` is ``sum_{p^q=m} a_p b_q``."""
    _check_same_n(a, b)
    n = a.n
    size = 1 << n
    if len(a) == 0 or len(b) == 0:
        return DiagonalPauliSum.zero(n)
    if len(a) > size // 2 or len(b) > size // 2:
        # dense route: pointwise product of diagonals
        prod = wht_synthesize(a) * wht_synthesize(b)
        return wht_analyze(prod, prune_tol=prune_tol)
    if n <= _DENSE_ACCUMULATOR_QUBITS:
        dense = kernels.xor_accumulate(a.masks, a.coeffs, b.masks, b.coeffs, size)
        return DiagonalPauliSum.from_dense(dense, prune_tol=prune_tol)
    masks = (a.masks[:, None] ^ b.masks[None, :]).ravel()
    coeffs = (a.coeffs[:, None] * b.coeffs[None, :]).ravel()
    return DiagonalPauliSum.from_terms(n, zip(masks.tolist(), coeffs.tolist()), prune_tol=prune_tol)


def truncate_top(p: DiagonalPauliSum, d_cut: int) -> DiagonalPauliSum:
    """Keep the ``d_cut`` largest-magnitude terms; ties go to the smaller mask."""
    if d_cut < 1:
        raise ValueError("d_cut must be >= 1")
    if len(p) <= d_cut:
        return p
    order = np.lexsort((p.masks, -np.abs(p.coeffs)))
    keep = np.sort(order[:d_cut])
    return DiagonalPauliSum(p.n, p.masks[keep], p.coeffs[keep])


def dropped_mass(before: DiagonalPauliSum, after: DiagonalPauliSum) -> float:
    """Squared l2 coefficient mass removed by a truncation."""
    gone = ~np.isin(before.masks, after.masks)
    return float(np.sum(np.abs(before.coeffs[gone]) ** 2))
