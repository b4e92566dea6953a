"""Pure numpy/Python twins of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def fwht(x):
    """In-place unnormalized Walsh-Hadamard transform (natural order)."""
    size = x.shape[0]
    h = 1
    while h < size:
        y = x.reshape(-1, 2, h)
        a = y[:, 0, :].copy()
        b = y[:, 1, :]
        y[:, 0, :] = a + b
        y[:, 1, :] = a - b
        h *= 2


def walsh_signs(masks, n):
    k = np.arange(1 << n, dtype=np.int64)
    parity = np.bitwise_count(np.asarray(masks, dtype=np.int64)[:, None] & k[None, :]) & 1
    return 1.0 - 2.0 * parity


def xor_accumulate(a_masks, a_coef, b_masks, b_coef, out):
    idx = (a_masks[:, None] ^ b_masks[None, :]).ravel()
    prod = (a_coef[:, None] * b_coef[None, :]).ravel()
    # np.add.at is unbuffered and sums in index order, matching the loop
    np.add.at(out, idx, prod)


def thomas_cyclic(diag, off, rhs):
    size = rhs.shape[0]
    gamma = -diag
    dmod = np.full(size, diag, dtype=np.float64)
    dmod[0] = diag - gamma
    dmod[size - 1] = diag - off * off / gamma
    cp = np.empty(size)
    zu = np.empty(size)
    y = np.empty(size, dtype=rhs.dtype)

    cp[0] = off / dmod[0]
    y[0] = rhs[0] / dmod[0]
    zu[0] = gamma / dmod[0]
    for i in range(1, size):
        denom = dmod[i] - off * cp[i - 1]
        cp[i] = off / denom
        y[i] = (rhs[i] - off * y[i - 1]) / denom
        u_i = off if i == size - 1 else 0.0
        zu[i] = (u_i - off * zu[i - 1]) / denom
    for i in range(size - 2, -1, -1):
        y[i] = y[i] - cp[i] * y[i + 1]
        zu[i] = zu[i] - cp[i] * zu[i + 1]

    fact = (y[0] + off / gamma * y[size - 1]) / (1.0 + zu[0] + off / gamma * zu[size - 1])
    y -= fact * zu
    return y
