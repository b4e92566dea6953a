import math

import numpy as np
import pytest

from ata_heat.grid import (CapacityError, GridSpec, approx_spectrum, exact_spectrum, folded_wave_indices,
                           lowpass_mask, multidim_spectrum, rhs_from_state, step_matrix)
from ata_heat.oracle import solve_exact


def test_gridspec_invariant_enforced():
    with pytest.raises(ValueError):
        GridSpec(n=3, c=0.1, a2=1.0, dz=1.0, dt=1.0)
    with pytest.raises(ValueError):
        GridSpec.dimensionless(0, 0.1)
    with pytest.raises(ValueError):
        GridSpec.dimensionless(3, 0.0)


@pytest.mark.parametrize("make", [
    lambda: GridSpec.dimensionless(4, 0.3),
    lambda: GridSpec.from_physical(4, 0.3, a2=2.0, dt=0.05),
    lambda: GridSpec.unit_run(4, 0.3, 50),
])
def test_constructors_satisfy_invariant(make):
    g = make()
    assert math.isclose(g.c * g.a2 * g.dt, g.dz**2, rel_tol=1e-12)
    assert g.size == 16


def test_unit_run_steps():
    g = GridSpec.unit_run(6, 2.0, 100)
    assert g.dz == 2.0**-6 and g.dt == 0.01 and g.n_t == 100


def test_exact_spectrum_examples():
    lam = exact_spectrum(GridSpec.dimensionless(3, 0.1))
    assert lam[0] == pytest.approx(-0.1)
    assert lam[4] == pytest.approx(-4.1)
    assert np.all((lam <= -0.1 + 1e-15) & (lam >= -4.1 - 1e-15))


def test_exact_spectrum_matches_dense_eigenvalues():
    g = GridSpec.dimensionless(5, 2.0)
    dense = np.sort(np.linalg.eigvalsh(step_matrix(g)))
    assert np.max(np.abs(dense - np.sort(exact_spectrum(g)))) < 1e-10


def test_approx_spectrum_examples():
    lam = approx_spectrum(GridSpec.dimensionless(3, 0.1))
    assert lam[0] == pytest.approx(-0.1)
    assert lam[4] == pytest.approx(-0.1 - np.pi**2)


def test_approx_spectrum_taylor_bound():
    g = GridSpec.dimensionless(6, 1.0)
    k = 1
    diff = abs(approx_spectrum(g)[k] - exact_spectrum(g)[k])
    assert diff < 4 * (np.pi * k / 64) ** 4 / 3


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_approx_spectrum_fourth_order_bound(n):
    g = GridSpec.dimensionless(n, 0.1)
    theta = np.pi * folded_wave_indices(n) / g.size
    diff = np.abs(approx_spectrum(g) - exact_spectrum(g))
    assert np.all(diff <= 4 * theta**4 / 3 + 1e-12)


@pytest.mark.parametrize("n", [5, 6, 8, 10])
def test_approx_spectrum_low_mode_relative_error(n):
    g = GridSpec.dimensionless(n, 0.1)
    k = folded_wave_indices(n)
    rel = np.abs(approx_spectrum(g) - exact_spectrum(g)) / np.abs(exact_spectrum(g))
    assert rel[k < (1 << (n - 4))].max() < 0.02
    assert rel[k < (1 << (n - 3))].max() < 0.05


def test_approx_spectrum_symmetric():
    lam = approx_spectrum(GridSpec.dimensionless(5, 0.7))
    assert np.allclose(lam[1:], lam[1:][::-1])


def test_lowpass_mask():
    m = lowpass_mask(3, 1)
    assert m.tolist() == [True, True, False, False, False, False, False, True]


def test_multidim_reduces_to_1d():
    g = GridSpec.dimensionless(4, 0.4)
    assert np.array_equal(multidim_spectrum(g, 1), exact_spectrum(g))


def test_multidim_corner_value():
    # c = 0 is not a valid grid, so subtract the c contribution explicitly
    g = GridSpec.dimensionless(1, 0.5)
    lam = multidim_spectrum(g, 2).reshape(2, 2)
    assert lam[1, 1] + g.c == pytest.approx(-8.0)


def test_multidim_capacity():
    with pytest.raises(CapacityError):
        multidim_spectrum(GridSpec.dimensionless(9, 0.1), 3)
    with pytest.raises(ValueError):
        multidim_spectrum(GridSpec.dimensionless(2, 0.1), 0)


def test_rhs_from_state_examples(rng):
    g = GridSpec.from_physical(3, 2.0, a2=1.0, dt=0.01)
    u = rng.standard_normal(8)
    assert np.allclose(rhs_from_state(u, np.zeros(8), g), -2.0 * u)
    assert np.allclose(rhs_from_state(np.zeros(8), np.ones(8), g), 0.02)
    with pytest.raises(ValueError):
        rhs_from_state(np.zeros(4), np.zeros(8), g)


def test_rhs_then_oracle_residual(rng):
    g = GridSpec.dimensionless(4, 0.3)
    b = rhs_from_state(rng.standard_normal(16), rng.standard_normal(16), g)
    sol = solve_exact(b, g)
    assert np.linalg.norm(step_matrix(g) @ sol.x - b) / np.linalg.norm(b) < 1e-10
