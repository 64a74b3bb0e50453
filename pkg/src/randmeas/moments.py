"""Moments of correlation distributions.

Four routes to the t-th moment of the distribution of E over random
directions: Monte Carlo over sampled correlations, exact contraction of
the correlation tensor (t = 2), exact summation over spherical-design
direction tuples, and unbiased estimation from finite measurement shots.
Second moments over all party subsets combine into the purity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .correlations import (
    SampleSet,
    correlation_tensor,
    normalize_subset,
    pauli_coefficients,
)
from .sampling import SphericalDesign, _generator, half_design, uniform_directions
from .states import DensityMatrix

METHODS = ("monte_carlo", "exact_tensor", "design", "finite_shot")
_EXACT_METHODS = ("exact_tensor", "design")

#: Largest number of design tuples a single exact sum may expand to.
MAX_DESIGN_TUPLES = 20_000_000

EVEN_MOMENT_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class MomentEstimate:
    """Value of the order-t moment for a party subset, with provenance.

    Exact methods carry ``std_error=None``.  ``samples`` is the number of
    direction settings M and ``shots`` the repetitions K where relevant.
    """

    subset: tuple
    order: int
    value: float
    std_error: float | None
    method: str
    samples: int | None = None
    shots: int | None = None
    seed: tuple | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method in _EXACT_METHODS and self.std_error is not None:
            raise ValueError(f"{self.method} estimates must carry std_error=None")
        if self.order % 2 == 0 and self.method != "finite_shot":
            # Even moments of a [-1, 1]-valued variable live in [0, 1].
            # Unbiased finite-shot estimates may leave that range.
            if not -EVEN_MOMENT_ATOL <= self.value <= 1.0 + EVEN_MOMENT_ATOL:
                raise ValueError(
                    f"even-order moment {self.value!r} outside [0, 1] tolerance"
                )
        object.__setattr__(self, "subset", tuple(int(p) for p in self.subset))

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "t": self.order,
            "value": float(self.value),
            "std_error": None if self.std_error is None else float(self.std_error),
            "method": self.method,
            "seed": None if self.seed is None else list(self.seed),
            "M": self.samples,
            "K": self.shots,
        }


def moment_mc(
    samples: SampleSet,
    t: int,
    bootstrap: bool = False,
    bootstrap_resamples: int = 1000,
    rng=None,
) -> MomentEstimate:
    """Monte-Carlo moment: sample mean of E^t with a plug-in standard error.

    With ``bootstrap=True`` the standard error is instead the spread of
    ``bootstrap_resamples`` resampled means (requires ``rng``).
    """
    t = _check_order(t)
    m = samples.settings_count
    if m < 2:
        raise ValueError(f"need M >= 2 samples for a standard error, got M={m}")
    powers = samples.values**t
    value = float(powers.mean())
    if bootstrap:
        if rng is None:
            raise ValueError("bootstrap standard errors require an rng")
        gen = _generator(rng)
        idx = gen.integers(0, m, size=(bootstrap_resamples, m))
        std_error = float(powers[idx].mean(axis=1).std(ddof=1))
    else:
        std_error = float(powers.std(ddof=1) / np.sqrt(m))
    seed = None
    if samples.seed is not None:
        seed = (samples.seed.seed, samples.seed.stream_id)
    return MomentEstimate(samples.subset, t, value, std_error, "monte_carlo", m, None, seed)


def moment_exact_t2(tensor) -> MomentEstimate:
    """Second moment from the correlation tensor: 3^(-k) * sum of squares."""
    k = len(tensor.subset)
    value = tensor.sum_squares() / 3.0**k
    return MomentEstimate(tensor.subset, 2, value, None, "exact_tensor")


def _design_grid_values(rho: DensityMatrix, subset, points: np.ndarray) -> np.ndarray:
    """Correlations for every direction tuple of the point set, raveled in
    lexicographic tuple order."""
    parties = normalize_subset(subset, rho.n_qubits)
    k = len(parties)
    length = points.shape[0]
    if length**k > MAX_DESIGN_TUPLES:
        raise ValueError(
            f"design sum over {length}^{k} tuples exceeds MAX_DESIGN_TUPLES"
        )
    grid = correlation_tensor(rho, parties).components
    for _ in range(k):
        # consume the leading site axis, appending its point axis at the end
        grid = np.tensordot(grid, points, axes=(0, 1))
    return grid.ravel()


def moment_design(rho: DensityMatrix, subset, t: int, design: SphericalDesign) -> MomentEstimate:
    """Exact order-t moment by summation over design direction tuples.

    E^t is a degree-t polynomial in each site's direction, so a design of
    degree >= t reproduces the sphere integral exactly.  Tuples are summed
    in lexicographic order with pairwise summation for reproducibility.
    """
    t = _check_order(t)
    if design.degree < t:
        raise ValueError(
            f"design order insufficient for requested moment: degree {design.degree} < t={t}"
        )
    values = _design_grid_values(rho, subset, design.as_array())
    moment = float(np.sum(values**t) / values.size)
    parties = normalize_subset(subset, rho.n_qubits)
    return MomentEstimate(parties, t, moment, None, "design")


def moment_design_half(
    rho: DensityMatrix, subset, t: int, design: SphericalDesign
) -> MomentEstimate:
    """Design moment using one direction per antipodal pair.

    Valid for even t only: even powers of E are parity-invariant per site.
    """
    t = _check_order(t)
    if t % 2:
        raise ValueError(f"half-design summation requires even t, got t={t}")
    if design.degree < t:
        raise ValueError(
            f"design order insufficient for requested moment: degree {design.degree} < t={t}"
        )
    points = np.array([p.as_array() for p in half_design(design)])
    values = _design_grid_values(rho, subset, points)
    moment = float(np.sum(values**t) / values.size)
    parties = normalize_subset(subset, rho.n_qubits)
    return MomentEstimate(parties, t, moment, None, "design")


# ---------------------------------------------------------------------------
# Finite-shot simulation and unbiased estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ShotTable:
    """Recorded +-1 outcomes for each of M direction settings.

    ``settings`` has shape (M, n, 3) and ``outcomes`` shape (M, K, n);
    every setting holds exactly K joint outcomes.
    """

    settings: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self):
        settings = np.asarray(self.settings, dtype=float)
        outcomes = np.asarray(self.outcomes, dtype=np.int8)
        if settings.ndim != 3 or settings.shape[2] != 3:
            raise ValueError(f"settings must have shape (M, n, 3), got {settings.shape}")
        if outcomes.ndim != 3 or outcomes.shape[0] != settings.shape[0] or outcomes.shape[2] != settings.shape[1]:
            raise ValueError(
                f"outcomes shape {outcomes.shape} inconsistent with settings {settings.shape}"
            )
        if outcomes.size and not np.all(np.abs(outcomes) == 1):
            raise ValueError("outcomes must be +-1")
        settings.setflags(write=False)
        outcomes.setflags(write=False)
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def n_settings(self) -> int:
        return self.settings.shape[0]

    @property
    def n_parties(self) -> int:
        return self.settings.shape[1]

    @property
    def shots_per_setting(self) -> int:
        return self.outcomes.shape[1]

    def to_csv(self, path) -> None:
        k = self.n_parties
        header = "setting_index,shot_index," + ",".join(f"s{j+1}" for j in range(k))
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for m in range(self.n_settings):
                for shot in range(self.shots_per_setting):
                    signs = ",".join(str(int(s)) for s in self.outcomes[m, shot])
                    fh.write(f"{m},{shot},{signs}\n")


def random_settings(n: int, m: int, rng) -> np.ndarray:
    """M uniformly random direction tuples for n parties, shape (M, n, 3)."""
    return uniform_directions(rng, m * n).reshape(m, n, 3)


def simulate_shots(rho: DensityMatrix, settings, k: int, rng) -> ShotTable:
    """Draw K joint projective outcomes per setting from the exact Born
    probabilities of all 2^n sign combinations.

    Sampling the joint distribution (rather than the product variable)
    keeps marginal-subset statistics extractable from the same table.
    """
    if k < 1:
        raise ValueError(f"shots must satisfy K >= 1, got {k}")
    settings = np.asarray(settings, dtype=float)
    if settings.ndim == 2:
        settings = settings[None, :, :]
    n = rho.n_qubits
    if settings.ndim != 3 or settings.shape[1:] != (n, 3):
        raise ValueError(
            f"settings must have shape (M, {n}, 3) for this state, got {settings.shape}"
        )
    m = settings.shape[0]
    coeffs = pauli_coefficients(rho)

    # Outcome distribution: p(s) = 2^-n sum_a c_a prod_j v_j[a_j] where
    # v_j = (1, s_j u_j) per party; evaluated for all sign tuples at once.
    paddings = np.empty((m, n, 2, 4))
    paddings[:, :, :, 0] = 1.0
    paddings[:, :, 0, 1:] = settings
    paddings[:, :, 1, 1:] = -settings
    letters = "abcdefgh"[:n]
    signs = "ABCDEFGH"[:n]
    subscripts = (
        letters
        + ","
        + ",".join(f"m{S}{a}" for S, a in zip(signs, letters))
        + f"->m{signs}"
    )
    operands = [coeffs] + [paddings[:, j] for j in range(n)]
    probs = np.einsum(subscripts, *operands, optimize=True).reshape(m, 2**n) / 2**n
    if float(probs.min()) < -1e-9:
        raise ValueError(f"negative Born probability {float(probs.min()):.3e}")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum(axis=1, keepdims=True)

    gen = _generator(rng)
    cumulative = np.cumsum(probs, axis=1)
    cumulative[:, -1] = 1.0
    draws = gen.random((m, k))
    indices = (draws[:, :, None] >= cumulative[:, None, :]).sum(axis=2)
    outcomes = np.empty((m, k, n), dtype=np.int8)
    for j in range(n):
        bits = (indices >> (n - 1 - j)) & 1
        outcomes[:, :, j] = 1 - 2 * bits
    return ShotTable(settings, outcomes)


def estimate_moment_from_shots(shots: ShotTable, t: int, parties=None) -> MomentEstimate:
    """Unbiased order-t moment from a shot table.

    Per setting, E^t is estimated by the order-t U-statistic: the average
    over all selections of t distinct shots of the product of their +-1
    outcome products.  With x_i = +-1 this reduces to e_t(x) / C(K, t)
    with e_t the elementary symmetric polynomial, a function of the count
    of +1 products only.  For t = 2 it equals (K Ehat^2 - 1) / (K - 1).
    The returned value is the mean over settings.
    """
    t = _check_order(t)
    k_shots = shots.shots_per_setting
    if k_shots < t:
        raise ValueError(
            f"need at least t shots per setting for unbiased order-{t} estimation, got K={k_shots}"
        )
    n = shots.n_parties
    if parties is None:
        columns = list(range(n))
        subset = tuple(range(1, n + 1))
    else:
        subset = normalize_subset(parties, n)
        columns = [p - 1 for p in subset]
    products = shots.outcomes[:, :, columns].prod(axis=2)
    plus_counts = ((products + 1) // 2).sum(axis=1)

    # e_t(x) = sum_j C(K+, j) C(K-, t-j) (-1)^(t-j), tabulated over K+.
    table = np.zeros(k_shots + 1)
    for kp in range(k_shots + 1):
        km = k_shots - kp
        e_t = sum(
            comb(kp, j) * comb(km, t - j) * (-1) ** (t - j)
            for j in range(max(0, t - km), min(t, kp) + 1)
        )
        table[kp] = e_t / comb(k_shots, t)
    per_setting = table[plus_counts]
    value = float(per_setting.mean())
    m = shots.n_settings
    std_error = float(per_setting.std(ddof=1) / np.sqrt(m)) if m >= 2 else None
    return MomentEstimate(subset, t, value, std_error, "finite_shot", m, k_shots)


# ---------------------------------------------------------------------------
# Purity from second moments
# ---------------------------------------------------------------------------

def all_subsets(n: int, min_size: int = 1) -> list:
    """All party subsets of {1..n} with at least ``min_size`` elements."""
    parties = range(1, n + 1)
    return [
        subset
        for size in range(min_size, n + 1)
        for subset in combinations(parties, size)
    ]


def exact_moment_map(rho: DensityMatrix) -> dict:
    """Exact second moments for every non-empty party subset."""
    coeffs = pauli_coefficients(rho)
    out = {}
    for subset in all_subsets(rho.n_qubits):
        tensor = correlation_tensor(rho, subset, coeffs)
        out[subset] = moment_exact_t2(tensor)
    return out


def moment_value(entry) -> float:
    """Numeric moment from a MomentEstimate or a plain number."""
    return float(entry.value) if isinstance(entry, MomentEstimate) else float(entry)


def purity_from_moments(moments, atol: float = 1e-6) -> float:
    """Purity as the 3^|A|-weighted sum of second moments over all subsets.

    ``moments`` must contain every non-empty subset of {1..n}; the empty
    set contributes 1 by normalization.  Values may be MomentEstimates or
    plain numbers and must be non-negative.
    """
    normalized = {}
    n = 0
    for subset, entry in moments.items():
        key = tuple(sorted(int(p) for p in subset))
        normalized[key] = entry
        n = max(n, max(key))
    if n == 0:
        raise ValueError("moments map is empty")
    exact_only = True
    total = 1.0
    for subset in all_subsets(n):
        if subset not in normalized:
            raise ValueError(f"missing subset {subset} in moments map")
        entry = normalized[subset]
        value = moment_value(entry)
        if value < 0.0:
            raise ValueError(f"moment for subset {subset} is negative ({value!r})")
        if isinstance(entry, MomentEstimate) and entry.std_error is not None:
            exact_only = False
        total += 3.0 ** len(subset) * value
    purity = total / 2.0**n
    if purity <= 0.0:
        raise ValueError(f"purity {purity!r} is not positive")
    if exact_only and purity > 1.0 + atol:
        raise ValueError(f"purity {purity!r} exceeds 1 beyond tolerance")
    return purity


def _check_order(t) -> int:
    if not isinstance(t, (int, np.integer)) or t < 1:
        raise ValueError(f"moment order t must be a positive integer, got {t!r}")
    return int(t)
