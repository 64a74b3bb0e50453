"""Correlations of local spin measurements.

Single correlation values E = <sigma_u1 (x) ... (x) sigma_uk>, correlation
tensors over Pauli basis axes, the squared-sum correlation length, and
sampling of correlation distributions over random directions, together
with the closed-form two-qubit reference densities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .sampling import RngStream, as_direction_array, uniform_directions
from .states import DensityMatrix, IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z

#: Pre-clamp tolerance; |E| beyond 1 by more than this is treated as a bug.
CORRELATION_EXCESS_ATOL = 1e-9
IMAG_RESIDUE_ATOL = 1e-10

_PAULI_STACK = np.stack([IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z])
# Site transfer matrix: S[a, 2 r + c] = P_a[c, r], so contracting every
# (row, col) index pair of rho with S yields tr(rho P_a1 (x) ... (x) P_an).
_SITE_TRANSFER = _PAULI_STACK.transpose(0, 2, 1).reshape(4, 4).copy()

_CONTRACTION_CHUNK = 1 << 17


def pauli_coefficients(rho: DensityMatrix) -> np.ndarray:
    """Expectation values tr(rho P) for every Pauli string P.

    Returns a real array of shape (4,) * n indexed by (I, x, y, z) per
    site; entry (0, ..., 0) is the trace, i.e. 1.
    """
    n = rho.n_qubits
    tens = rho.matrix.reshape((2,) * (2 * n))
    perm = [axis for j in range(n) for axis in (j, n + j)]
    tens = np.transpose(tens, perm).reshape((4,) * n)
    for axis in range(n):
        tens = np.moveaxis(np.tensordot(_SITE_TRANSFER, tens, axes=(1, axis)), 0, axis)
    residue = float(np.max(np.abs(tens.imag)))
    if residue > IMAG_RESIDUE_ATOL:
        raise ValueError(f"Pauli coefficients have imaginary residue {residue:.3e}")
    return np.ascontiguousarray(tens.real)


def normalize_subset(subset, n: int) -> tuple:
    """Canonicalize a party subset to a sorted tuple of ints in 1..n."""
    parties = tuple(sorted({int(p) for p in subset}))
    if not parties:
        raise ValueError("party subset must not be empty")
    if parties[0] < 1 or parties[-1] > n:
        raise ValueError(f"party subset {parties} outside 1..{n}")
    return parties


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Correlation values along all Pauli axis combinations of a subset.

    ``components`` has shape (3,) * k with axes ordered by ascending party
    index and axis values (x, y, z).
    """

    subset: tuple
    components: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        if comps.shape != (3,) * len(self.subset):
            raise ValueError(
                f"components shape {comps.shape} does not match subset {self.subset}"
            )
        excess = float(np.max(np.abs(comps))) - 1.0
        if excess > CORRELATION_EXCESS_ATOL:
            raise ValueError(f"tensor component exceeds 1 by {excess:.3e}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "subset", tuple(int(p) for p in self.subset))

    def sum_squares(self) -> float:
        return float(np.sum(self.components**2))


def correlation(rho: DensityMatrix, dirs) -> float:
    """E = tr(rho O) with sigma_u on every party keyed in ``dirs`` and
    identity elsewhere.  ``dirs`` maps 1-based party index to a direction.
    """
    n = rho.n_qubits
    if not dirs:
        raise ValueError("dirs must specify at least one party")
    keyed = {int(p): as_direction_array(d) for p, d in dirs.items()}
    normalize_subset(keyed.keys(), n)
    factors = []
    for party in range(1, n + 1):
        if party in keyed:
            ux, uy, uz = keyed[party]
            factors.append(ux * SIGMA_X + uy * SIGMA_Y + uz * SIGMA_Z)
        else:
            factors.append(IDENTITY_2)
    operator = reduce(np.kron, factors)
    value = np.trace(rho.matrix @ operator)
    if abs(value.imag) > IMAG_RESIDUE_ATOL:
        raise ValueError(f"correlation has imaginary residue {abs(value.imag):.3e}")
    return _clamp_correlations(value.real)


def _clamp_correlations(values):
    excess = float(np.max(np.abs(values))) - 1.0
    if excess > CORRELATION_EXCESS_ATOL:
        raise ValueError(f"correlation exceeds 1 by {excess:.3e}")
    return np.clip(values, -1.0, 1.0) if np.ndim(values) else float(np.clip(values, -1.0, 1.0))


def correlation_tensor(rho: DensityMatrix, subset, coefficients=None) -> CorrelationTensor:
    """Correlation tensor of ``subset``, computed by identity padding on
    the unmeasured parties.  Pass precomputed ``pauli_coefficients`` output
    to amortize work across subsets."""
    parties = normalize_subset(subset, rho.n_qubits)
    if coefficients is None:
        coefficients = pauli_coefficients(rho)
    index = tuple(
        slice(1, 4) if party in parties else 0 for party in range(1, rho.n_qubits + 1)
    )
    return CorrelationTensor(parties, coefficients[index].copy())


def correlation_tensors(rho: DensityMatrix, subsets) -> dict:
    """Correlation tensors for many subsets from one coefficient pass."""
    coefficients = pauli_coefficients(rho)
    return {
        normalize_subset(s, rho.n_qubits): correlation_tensor(rho, s, coefficients)
        for s in subsets
    }


def correlation_length(rho: DensityMatrix, subset) -> float:
    """Sum of squared correlation-tensor components over ``subset``."""
    return correlation_tensor(rho, subset).sum_squares()


def correlation_values(components: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Contract a (3,)*k tensor with per-sample directions (M, k, 3) -> (M,)."""
    k = components.ndim
    out = np.empty(directions.shape[0])
    for start in range(0, directions.shape[0], _CONTRACTION_CHUNK):
        block = directions[start : start + _CONTRACTION_CHUNK]
        vals = np.tensordot(block[:, 0, :], components, axes=(1, 0))
        for j in range(1, k):
            vals = np.einsum("mi...,mi->m...", vals, block[:, j, :])
        out[start : start + block.shape[0]] = vals
    return out


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Correlation values for independently drawn random direction tuples."""

    subset: tuple
    values: np.ndarray
    settings_count: int
    seed: RngStream | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.settings_count,):
            raise ValueError(
                f"expected {self.settings_count} values, got shape {vals.shape}"
            )
        if vals.size and (vals.min() < -1.0 or vals.max() > 1.0):
            raise ValueError("sample values outside [-1, 1]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "subset", tuple(int(p) for p in self.subset))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("sample_index,E\n")
            for i, e in enumerate(self.values):
                fh.write(f"{i},{e:.17g}\n")


def sample_distribution(rho: DensityMatrix, subset, m: int, rng) -> SampleSet:
    """Exact correlation values for ``m`` i.i.d. uniformly random direction
    tuples on ``subset``.  Deterministic given the stream."""
    if m < 1:
        raise ValueError(f"samples must satisfy M >= 1, got {m}")
    parties = normalize_subset(subset, rho.n_qubits)
    k = len(parties)
    tensor = correlation_tensor(rho, parties)
    directions = uniform_directions(rng, m * k).reshape(m, k, 3)
    values = correlation_values(tensor.components, directions)
    values = _clamp_correlations(values)
    provenance = rng if isinstance(rng, RngStream) else None
    return SampleSet(parties, values, m, provenance)


def histogram_table(values, bins: int = 81, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Histogram rows (bin_left, bin_right, count, density).

    The default odd bin count centers one bin at 0 so point masses at the
    origin land in a single bin.
    """
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    widths = np.diff(edges)
    total = max(1, len(np.asarray(values)))
    density = counts / (total * widths)
    return np.column_stack([edges[:-1], edges[1:], counts, density])


# ---------------------------------------------------------------------------
# Closed-form reference densities for two-qubit correlation distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationDensity:
    """Reference density of the correlation value E on [-1, 1].

    ``mixed_white`` is a point mass at 0 carried as a flag: its ``pdf`` is
    undefined and raises.
    """

    kind: str
    support: tuple
    is_delta: bool = False
    p: float | None = None

    def pdf(self, e):
        if self.is_delta:
            raise ValueError("point-mass density has no pdf; check is_delta")
        e = np.asarray(e, dtype=float)
        inside = (e >= self.support[0]) & (e <= self.support[1])
        if self.kind == "bell":
            out = np.where(inside, 0.5, 0.0)
        elif self.kind == "werner":
            out = np.where(inside, 1.0 / (2.0 * self.p), 0.0)
        elif self.kind == "product2":
            with np.errstate(divide="ignore"):
                out = np.where(inside, -0.5 * np.log(np.abs(e)), 0.0)
        else:  # pragma: no cover
            raise ValueError(f"unknown density kind {self.kind!r}")
        return out if out.ndim else float(out)

    def cdf(self, e):
        e = np.asarray(e, dtype=float)
        if self.is_delta:
            out = np.where(e >= 0.0, 1.0, 0.0)
        elif self.kind == "bell":
            out = np.clip((e + 1.0) / 2.0, 0.0, 1.0)
        elif self.kind == "werner":
            out = np.clip((e + self.p) / (2.0 * self.p), 0.0, 1.0)
        elif self.kind == "product2":
            ae = np.clip(np.abs(e), 0.0, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                tail = np.where(ae > 0.0, ae - ae * np.log(ae), 0.0)
            out = 0.5 + 0.5 * np.sign(e) * tail
        else:  # pragma: no cover
            raise ValueError(f"unknown density kind {self.kind!r}")
        return out if out.ndim else float(out)


def analytic_pdf(kind: str, p: float | None = None) -> CorrelationDensity:
    """Closed-form correlation density for the named two-qubit scenarios.

    kinds: ``product2`` (-(1/2) ln|E|), ``bell`` (flat 1/2), ``werner``
    (flat on [-p, p]; p = 0 degenerates to ``mixed_white``), and
    ``mixed_white`` (point mass at 0).
    """
    if kind == "product2":
        return CorrelationDensity("product2", (-1.0, 1.0))
    if kind == "bell":
        return CorrelationDensity("bell", (-1.0, 1.0))
    if kind == "mixed_white":
        return CorrelationDensity("mixed_white", (0.0, 0.0), is_delta=True)
    if kind == "werner":
        if p is None:
            raise ValueError("werner density requires the mixing parameter p")
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"parameter p must lie in [0, 1], got {p}")
        if p == 0.0:
            return CorrelationDensity("mixed_white", (0.0, 0.0), is_delta=True)
        return CorrelationDensity("werner", (-p, p), p=p)
    raise ValueError(
        f"unknown density kind {kind!r}; valid kinds: product2, bell, werner, mixed_white"
    )
