"""Initial temperatures and heat sources.

Random fields are Chebyshev expansions with i.i.d. uniform coefficients on
[-1, 1]; the maximal degree controls smoothness. All randomness comes from
numpy's PCG64 generator seeded through ``SeedSequence`` so every field has
its own reproducible stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev
from scipy.integrate import simpson

from .pauli import DiagonalPauliSum
from .state import pauli_sum_from_vector, prepare_from_pauli_sum

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence"
QUADRATURE_POINTS = 1024


class DegenerateNormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class ChebyshevField:
    """``f(z, t) = sum_ij coeffs[i, j] T_i(2t-1) T_j(2z-1)`` on ``[0,1]^2``.

    A purely spatial field (an initial temperature) has ``g_t = 0``.
    """

    g_z: int
    g_t: int
    coeffs: np.ndarray = field(repr=False)
    seed: int | None = None

    def __post_init__(self):
        if self.g_z < 0 or self.g_t < 0:
            raise ValueError("degrees must be non-negative")
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (self.g_t + 1, self.g_z + 1):
            raise ValueError(f"coeffs must have shape {(self.g_t + 1, self.g_z + 1)}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    def scaled(self, factor: float) -> "ChebyshevField":
        return ChebyshevField(self.g_z, self.g_t, self.coeffs * factor, self.seed)

    def to_json_dict(self, inline: bool = True) -> dict:
        out = {"g_z": self.g_z, "g_t": self.g_t, "seed": self.seed}
        if inline:
            out["coeffs"] = self.coeffs.tolist()
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChebyshevField":
        if "coeffs" in data:
            return cls(data["g_z"], data["g_t"], np.array(data["coeffs"]), data.get("seed"))
        return sample_field(data["g_z"], data["g_t"], data["seed"])


def field_seeds(seed: int, count: int) -> list:
    """Independent child seeds for ``count`` fields derived from one master seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def sample_field(g_z: int, g_t: int = 0, seed: int | None = None) -> ChebyshevField:
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=(g_t + 1, g_z + 1))
    return ChebyshevField(g_z, g_t, coeffs, seed)


def evaluate(fld: ChebyshevField, z, t=0.0):
    """Clenshaw evaluation at ``z, t`` in [0, 1] (broadcasting)."""
    z = np.asarray(z, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if np.any((z < 0) | (z > 1)) or np.any((t < 0) | (t > 1)):
        raise ValueError("z and t must lie in [0, 1]")
    return chebyshev.chebval2d(2.0 * t - 1.0 + 0.0 * z, 2.0 * z - 1.0 + 0.0 * t, fld.coeffs)


def _abs_integral(fld: ChebyshevField, points: int) -> float:
    z = np.linspace(0.0, 1.0, points)
    # separable tensor-grid evaluation: V_t @ coeffs @ V_z^T
    vz = chebyshev.chebvander(2.0 * z - 1.0, fld.g_z)
    vt = chebyshev.chebvander(2.0 * z - 1.0, fld.g_t)
    vals = np.abs(vt @ fld.coeffs @ vz.T)
    if fld.g_t == 0:
        return float(simpson(vals[0], x=z))
    return float(simpson(simpson(vals, x=z, axis=1), x=z))


def normalize_pair(chi: ChebyshevField, f: ChebyshevField, points: int = QUADRATURE_POINTS) -> ChebyshevField:
    """Rescale ``f`` so that ``int int |f| dz dt = int |chi| dz``."""
    target = _abs_integral(chi, points)
    if target == 0.0:
        raise DegenerateNormalizationError("initial temperature integrates to zero")
    current = _abs_integral(f, points)
    if current == 0.0:
        raise DegenerateNormalizationError("source integrates to zero")
    return f.scaled(target / current)


def grid_points(n: int) -> np.ndarray:
    return np.arange(1 << n) / (1 << n)


def discretize(fld: ChebyshevField, n: int, t: float = 0.0) -> np.ndarray:
    """Sample the field at ``z_i = i / 2**n``."""
    return evaluate(fld, grid_points(n), t)


def discretize_repr(fld: ChebyshevField, n: int, t: float = 0.0) -> DiagonalPauliSum:
    """The sampled field as a Z-string sum acting under Fourier conjugation on ``|0>``."""
    return pauli_sum_from_vector(discretize(fld, n, t))


def heater_cooler_preset(n: int, positions=None, width: int = 1):
    """Zero initial temperature plus a +1 heater and a -1 cooler window.

    ``positions`` are the first cells of the two windows (default: antipodal
    at ``N/4`` and ``3N/4``). Windows wrap around the periodic grid. A width
    covering the whole grid cancels to a zero source. Returns
    ``(chi_repr, source_repr)``.
    """
    size = 1 << n
    if positions is None:
        positions = (size // 4, (3 * size) // 4)
    hot, cold = (int(p) % size for p in positions)
    if hot == cold:
        raise ValueError("heater and cooler positions must differ")
    if width < 1:
        raise ValueError("width must be >= 1")
    src = np.zeros(size, dtype=np.int64)
    if width < size:
        hot_cells = (hot + np.arange(width)) % size
        cold_cells = (cold + np.arange(width)) % size
        if np.intersect1d(hot_cells, cold_cells).size:
            raise ValueError("heater and cooler windows overlap")
        src[hot_cells] += 1
        src[cold_cells] -= 1
    return DiagonalPauliSum.zero(n), pauli_sum_from_vector(src.astype(np.float64))


def heater_cooler_field(n: int, positions=None, width: int = 1) -> np.ndarray:
    """Position-domain values of :func:`heater_cooler_preset`'s source."""
    _, rep = heater_cooler_preset(n, positions, width)
    return prepare_from_pauli_sum(rep).amps.real


@dataclass
class RepresentationSource:
    """Source given directly as a Z-string sum with slowly varying weights.

    Coefficient ``i`` at normalized time ``t`` is
    ``sum_j envelopes[i, j] T_j(2t - 1)``.
    """

    n: int
    masks: np.ndarray
    envelopes: np.ndarray
    n_steps: int
    scale: float = 1.0

    def coefficients(self, t: float) -> np.ndarray:
        return self.scale * chebyshev.chebval(2.0 * t - 1.0, self.envelopes.T)

    def __call__(self, step: int) -> DiagonalPauliSum:
        t = min(step / max(self.n_steps, 1), 1.0)
        order = np.argsort(self.masks)
        return DiagonalPauliSum(self.n, self.masks[order], self.coefficients(t)[order])


def sample_repr_terms(n: int, n_terms: int, rng) -> tuple:
    """Distinct random masks and uniform [-1, 1] coefficients."""
    n_terms = min(n_terms, 1 << n)
    masks = np.sort(rng.choice(1 << n, size=n_terms, replace=False)).astype(np.int64)
    return masks, rng.uniform(-1.0, 1.0, size=n_terms)


def sample_repr_source(n: int, n_terms: int, degree: int, n_steps: int, seed=None) -> RepresentationSource:
    rng = np.random.default_rng(seed)
    masks, _ = sample_repr_terms(n, n_terms, rng)
    env = rng.uniform(-1.0, 1.0, size=(masks.size, degree + 1))
    return RepresentationSource(n, masks, env, n_steps)


def sample_repr_initial(n: int, n_terms: int, seed=None) -> DiagonalPauliSum:
    rng = np.random.default_rng(seed)
    masks, coeffs = sample_repr_terms(n, n_terms, rng)
    return DiagonalPauliSum(n, masks, coeffs)


@dataclass
class FieldSource:
    """Chebyshev source sampled on the grid at normalized time ``step / n_steps``."""

    fld: ChebyshevField
    n: int
    n_steps: int

    def position(self, step: int) -> np.ndarray:
        t = min(step / max(self.n_steps, 1), 1.0)
        return discretize(self.fld, self.n, t)

    def __call__(self, step: int) -> DiagonalPauliSum:
        return pauli_sum_from_vector(self.position(step))


@dataclass
class StaticSource:
    rep: DiagonalPauliSum

    def __call__(self, step: int) -> DiagonalPauliSum:
        return self.rep


def normalize_repr_pair(chi: DiagonalPauliSum, source: RepresentationSource, samples: int = 65) -> RepresentationSource:
    """Rescale a representation source so its mean absolute value over the grid
    and time matches that of the initial temperature (grid analogue of
    :func:`normalize_pair`; time uses ``samples`` evenly spaced points)."""
    target = np.mean(np.abs(prepare_from_pauli_sum(chi).amps))
    if target == 0.0:
        raise DegenerateNormalizationError("initial temperature is zero")
    ts = np.linspace(0.0, 1.0, samples)
    vals = []
    order = np.argsort(source.masks)
    for t in ts:
        rep = DiagonalPauliSum(source.n, source.masks[order], source.coefficients(t)[order] / source.scale)
        vals.append(np.mean(np.abs(prepare_from_pauli_sum(rep).amps)))
    current = float(simpson(vals, x=ts))
    if current == 0.0:
        raise DegenerateNormalizationError("source is zero")
    return RepresentationSource(source.n, source.masks, source.envelopes, source.n_steps, target / current)
