"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise (or when the
environment variable ``ATA_HEAT_PURE`` is set to a non-empty value other
than ``0``) the numpy implementations are used. Both expose the same four
functions with the same semantics.
"""

import os

import numpy as np

from . import _kernels_py

_force_pure = os.environ.get("ATA_HEAT_PURE", "") not in ("", "0")

_compiled = None
if not _force_pure:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = "cython" if _compiled is not None else "python"


def _as_scalar_array(x):
    if np.iscomplexobj(x):
        return np.ascontiguousarray(x, dtype=np.complex128)
    return np.ascontiguousarray(x, dtype=np.float64)


def fwht(x, backend=None):
    """Return the unnormalized Walsh-Hadamard transform of ``x`` (a copy)."""
    impl = _pick(backend)
    out = _as_scalar_array(x).copy()
    impl.fwht(out)
    return out


def walsh_signs(masks, n, backend=None):
    """Sign table ``S[r, k] = (-1)**popcount(masks[r] & k)``, shape (len(masks), 2**n)."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    return _pick(backend).walsh_signs(masks, int(n))


def xor_accumulate(a_masks, a_coef, b_masks, b_coef, size, backend=None):
    """Dense XOR convolution of two sparse coefficient lists into ``size`` slots."""
    complex_out = np.iscomplexobj(a_coef) or np.iscomplexobj(b_coef)
    dtype = np.complex128 if complex_out else np.float64
    out = np.zeros(size, dtype=dtype)
    _pick(backend).xor_accumulate(
        np.ascontiguousarray(a_masks, dtype=np.int64),
        np.ascontiguousarray(a_coef, dtype=dtype),
        np.ascontiguousarray(b_masks, dtype=np.int64),
        np.ascontiguousarray(b_coef, dtype=dtype),
        out,
    )
    return out


def thomas_cyclic(diag, off, rhs, backend=None):
    """Solve the constant-band cyclic tridiagonal system ``A x = rhs``."""
    return _pick(backend).thomas_cyclic(float(diag), float(off), _as_scalar_array(rhs))


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available in this build")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    return ("python", "cython") if _compiled is not None else ("python",)
