import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ata_heat import kernels

BACKENDS = kernels.available_backends()


def test_backend_flag_is_known():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_env_forces_python_backend():
    env = dict(os.environ, ATA_HEAT_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from ata_heat import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("backend", BACKENDS)
def test_fwht_is_its_own_inverse_up_to_n(backend, rng):
    x = rng.standard_normal(64)
    y = kernels.fwht(kernels.fwht(x, backend=backend), backend=backend) / 64
    assert np.allclose(y, x, atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
def test_fwht_does_not_mutate_input(backend, rng):
    x = rng.standard_normal(16)
    keep = x.copy()
    kernels.fwht(x, backend=backend)
    assert np.array_equal(x, keep)


@pytest.mark.parametrize("backend", BACKENDS)
def test_fwht_matches_hadamard_matrix(backend, rng):
    from scipy.linalg import hadamard
    x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    assert np.allclose(kernels.fwht(x, backend=backend), hadamard(32) @ x, atol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@given(n=st.integers(1, 10), seed=st.integers(0, 2**32 - 1))
def test_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    size = 1 << n
    x = rng.standard_normal(size)
    assert np.array_equal(kernels.fwht(x, backend="cython"), kernels.fwht(x, backend="python"))
    masks = np.sort(rng.choice(size, size=min(size, 5), replace=False)).astype(np.int64)
    assert np.array_equal(kernels.walsh_signs(masks, n, backend="cython"),
                          kernels.walsh_signs(masks, n, backend="python"))
    coef = rng.standard_normal(masks.size) + 1j * rng.standard_normal(masks.size)
    a = kernels.xor_accumulate(masks, coef, masks, coef.real, size, backend="cython")
    b = kernels.xor_accumulate(masks, coef, masks, coef.real, size, backend="python")
    assert np.allclose(a, b, atol=1e-14)
    rhs = rng.standard_normal(size)
    xc = kernels.thomas_cyclic(-2.3, 1.0, rhs, backend="cython")
    xp = kernels.thomas_cyclic(-2.3, 1.0, rhs, backend="python")
    assert np.allclose(xc, xp, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("size", [2, 3, 8, 33])
def test_thomas_cyclic_residual(backend, size, rng):
    rhs = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    x = kernels.thomas_cyclic(-2.5, 1.0, rhs, backend=backend)
    a = np.diag(np.full(size, -2.5))
    for i in range(size):
        a[i, (i + 1) % size] += 1.0
        a[i, (i - 1) % size] += 1.0
    assert np.allclose(a @ x, rhs, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_walsh_signs_values(backend):
    s = kernels.walsh_signs(np.array([0, 3], dtype=np.int64), 2, backend=backend)
    assert np.array_equal(s, [[1, 1, 1, 1], [1, -1, -1, 1]])


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.fwht(np.ones(4), backend="fortran")
