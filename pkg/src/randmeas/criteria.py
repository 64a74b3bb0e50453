"""Entanglement verdicts computed from correlation moments.

Each criterion returns a Verdict whose margin is oriented so that a
positive value always means "property detected / class excluded".
Exact inputs are decided against a small numerical floor; statistical
inputs additionally require the margin to clear z propagated standard
errors (z = 3 by default).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import sqrt

from .moments import MomentEstimate, all_subsets, exact_moment_map
from .states import DensityMatrix, partial_trace, purity_direct

#: Coefficients c_k of the biseparable bound M_k <= c_k (1 - tr rho^2).
#: The four-qubit constant 8/81 is the proven one; the two- and
#: three-qubit entries follow the same 8/3^k pattern and are configurable.
#: At purity 1 every entry degenerates to the always-valid pure-state
#: factorization test (threshold 0).
M_BOUND_COEFF = {2: 8.0 / 9.0, 3: 8.0 / 27.0, 4: 8.0 / 81.0}

DEFAULT_Z = 3.0
#: Exact-input detections must clear this floor, which absorbs float
#: noise in quantities that are analytically zero on boundary states.
DETECTION_ATOL = 1e-10


@dataclass(frozen=True)
class Verdict:
    """Outcome of one criterion: statistic vs threshold, margin oriented
    positive-means-detected."""

    criterion: str
    statistic: float
    threshold: float
    margin: float
    detected: bool
    std_error: float | None = None
    inputs_provenance: tuple = ()
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "margin": float(self.margin),
            "detected": self.detected,
            "std_error": None if self.std_error is None else float(self.std_error),
            "inputs_provenance": list(self.inputs_provenance),
            "note": self.note,
        }


def _decide(margin: float, std_error: float | None, z: float, atol: float) -> bool:
    if std_error is not None and std_error > 0.0:
        return margin > z * std_error
    return margin > atol


def _entry_stats(entry):
    if isinstance(entry, MomentEstimate):
        return float(entry.value), entry.std_error, entry.method
    return float(entry), None, "value"


def _normalize_moments(moments) -> dict:
    return {tuple(sorted(int(p) for p in key)): val for key, val in moments.items()}


def m_quantifier(moments, full_subset) -> float:
    """m_S minus half the sum of m_A * m_{S\\A} over proper non-empty A.

    For a pure state that is a product across some bipartition, the pair
    of terms from that bipartition exactly cancels the full moment.
    """
    value, _, _ = _m_quantifier_stats(moments, full_subset)
    return value


def _m_quantifier_stats(moments, full_subset):
    normalized = _normalize_moments(moments)
    full = tuple(sorted(int(p) for p in full_subset))
    if full not in normalized:
        raise ValueError(f"missing subset {full} in moments map")
    m_full, err_full, method_full = _entry_stats(normalized[full])
    value = m_full
    variance = 0.0 if err_full is None else err_full**2
    methods = {method_full}
    parts = set(full)
    for size in range(1, len(full)):
        for sub in combinations(full, size):
            comp = tuple(sorted(parts - set(sub)))
            if sub not in normalized:
                raise ValueError(f"missing subset {sub} in moments map")
            if comp not in normalized:
                raise ValueError(f"missing subset {comp} in moments map")
            m_a, err_a, method_a = _entry_stats(normalized[sub])
            m_b, _, _ = _entry_stats(normalized[comp])
            value -= 0.5 * m_a * m_b
            methods.add(method_a)
            if err_a is not None:
                # d/dm_A of the double-counted sum is -m_{S \ A}
                variance += (m_b * err_a) ** 2
    return value, variance, tuple(sorted(methods))


def gme_test_4(
    moments,
    purity: float,
    z: float = DEFAULT_Z,
    atol: float = DETECTION_ATOL,
) -> Verdict:
    """Genuine four-partite entanglement test: M_4 > (8/81)(1 - purity)."""
    normalized = _normalize_moments(moments)
    full = max(normalized, key=len)
    if len(full) != 4:
        raise ValueError(f"this bound applies to four qubits only, got {len(full)} parties")
    return _marginal_bound_verdict(
        normalized, full, purity, z=z, atol=atol, criterion="gme_moments_n4"
    )


def _marginal_bound_verdict(moments, subset, purity, z, atol, criterion):
    k = len(subset)
    if k not in M_BOUND_COEFF:
        raise ValueError(f"no bound coefficient configured for {k} parties")
    if not 0.0 < purity <= 1.0 + 1e-9:
        raise ValueError(f"purity must lie in (0, 1], got {purity!r}")
    value, variance, methods = _m_quantifier_stats(moments, subset)
    threshold = M_BOUND_COEFF[k] * max(0.0, 1.0 - purity)
    margin = value - threshold
    std_error = sqrt(variance) if variance > 0.0 else None
    return Verdict(
        criterion=criterion,
        statistic=value,
        threshold=threshold,
        margin=margin,
        detected=_decide(margin, std_error, z, atol),
        std_error=std_error,
        inputs_provenance=methods,
    )


@dataclass(frozen=True)
class StructureReport:
    """Marginal bound tests over every subset of size >= 2 plus the full set."""

    full_subset: tuple
    full: Verdict
    marginals: dict = field(default_factory=dict)

    def flagged(self) -> list:
        """Proper subsets whose marginal shows entanglement."""
        return sorted(s for s, v in self.marginals.items() if v.detected)

    def to_dict(self) -> dict:
        return {
            "full_subset": list(self.full_subset),
            "full": self.full.to_dict(),
            "marginals": {
                ",".join(str(p) for p in s): v.to_dict()
                for s, v in sorted(self.marginals.items())
            },
            "flagged": [list(s) for s in self.flagged()],
        }


def structure_report(
    moments,
    purities,
    z: float = DEFAULT_Z,
    atol: float = DETECTION_ATOL,
) -> StructureReport:
    """Apply the marginal bound to every subset of size >= 2.

    ``purities`` maps each such subset to the purity of its marginal;
    ``moments`` must hold second moments of every non-empty subset.
    """
    normalized = _normalize_moments(moments)
    full = max(normalized, key=len)
    n = len(full)
    purities = _normalize_moments(purities)
    marginals = {}
    full_verdict = None
    for subset in all_subsets(n, min_size=2):
        if subset not in purities:
            raise ValueError(f"missing purity for subset {subset}")
        sub_moments = {
            s: normalized[s] for s in normalized if set(s) <= set(subset)
        }
        verdict = _marginal_bound_verdict(
            sub_moments,
            subset,
            float(purities[subset]),
            z=z,
            atol=atol,
            criterion=f"marginal_bound_k{len(subset)}",
        )
        if subset == full:
            full_verdict = verdict
        else:
            marginals[subset] = verdict
    return StructureReport(full, full_verdict, marginals)


def structure_report_from_state(
    rho: DensityMatrix, z: float = DEFAULT_Z, atol: float = DETECTION_ATOL
) -> StructureReport:
    """Structure report from exact moments and marginal purities of a state."""
    moments = exact_moment_map(rho)
    purities = {
        subset: purity_direct(partial_trace(rho, subset))
        for subset in all_subsets(rho.n_qubits, min_size=2)
    }
    return structure_report(moments, purities, z=z, atol=atol)


def bisep_line_3(
    r2,
    r4,
    z: float = DEFAULT_Z,
    atol: float = DETECTION_ATOL,
) -> Verdict:
    """Three-qubit biseparability line in the (r2, r4) plane.

    Biseparable states satisfy r4 >= (972 r2^2 + 90 r2 - 5)/425; a fourth
    moment below that line certifies genuine tripartite entanglement.
    """
    r2_val, r2_err, r2_method = _entry_stats(r2)
    r4_val, r4_err, r4_method = _entry_stats(r4)
    for name, val in (("r2", r2_val), ("r4", r4_val)):
        if not -1e-9 <= val <= 1.0 + 1e-9:
            raise ValueError(f"{name} must lie in [0, 1], got {val!r}")
    rhs = (972.0 * r2_val**2 + 90.0 * r2_val - 5.0) / 425.0
    statistic = rhs - r4_val
    variance = 0.0
    if r2_err is not None:
        variance += ((1944.0 * r2_val + 90.0) / 425.0 * r2_err) ** 2
    if r4_err is not None:
        variance += r4_err**2
    std_error = sqrt(variance) if variance > 0.0 else None
    note = f"line value at r2: {rhs!r}"
    if rhs >= 1.0:
        note += "; line above the attainable range r4 <= 1, criterion vacuous here"
    return Verdict(
        criterion="three_qubit_biseparability_line",
        statistic=statistic,
        threshold=0.0,
        margin=statistic,
        detected=_decide(statistic, std_error, z, atol),
        std_error=std_error,
        inputs_provenance=(r2_method, r4_method),
        note=note,
    )


def w_class_chi(n: int) -> float:
    """Upper bound (5 - 4/n)/3^n on the second moment over the mixed W class."""
    if n < 3:
        raise ValueError(f"W class requires n >= 3 qubits, got n={n}")
    return (5.0 - 4.0 / n) / 3.0**n


def w_class_witness(
    r2,
    n: int,
    z: float = DEFAULT_Z,
    atol: float = DETECTION_ATOL,
) -> Verdict:
    """Exclusion from the mixed W class: r2 above chi(n) rules it out."""
    chi = w_class_chi(n)
    r2_val, r2_err, r2_method = _entry_stats(r2)
    if not -1e-9 <= r2_val <= 1.0 + 1e-9:
        raise ValueError(f"r2 must lie in [0, 1], got {r2_val!r}")
    margin = r2_val - chi
    return Verdict(
        criterion="w_class_exclusion",
        statistic=r2_val,
        threshold=chi,
        margin=margin,
        detected=_decide(margin, r2_err, z, atol),
        std_error=r2_err,
        inputs_provenance=(r2_method,),
        note=f"n={n}; excluded from the convex hull of the W class when detected",
    )


def entanglement_by_length(
    length,
    n: int | None = None,
    z: float = DEFAULT_Z,
    atol: float = DETECTION_ATOL,
) -> Verdict:
    """Correlation length above the product-state value 1 signals
    entanglement (not necessarily genuine multipartite)."""
    value, err, method = _entry_stats(length)
    if value < 0.0:
        raise ValueError(f"correlation length must be non-negative, got {value!r}")
    margin = value - 1.0
    note = "entanglement (not necessarily genuine multipartite)"
    if n is not None:
        note += f"; n={n}"
    return Verdict(
        criterion="correlation_length_threshold",
        statistic=value,
        threshold=1.0,
        margin=margin,
        detected=_decide(margin, err, z, atol),
        std_error=err,
        inputs_provenance=(method,),
        note=note,
    )
