"""Command-line front end.

Subcommands: ``sample`` (correlation distributions), ``moments``
(moment estimates with automatic oracle cross-checks), ``criteria``
(entanglement verdicts), ``design`` (direction sets).  Outputs are
plot-ready CSV tables plus a JSON file embedding the full run
configuration; identical command lines produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .correlations import (
    analytic_pdf,
    correlation_length,
    correlation_tensor,
    histogram_table,
    sample_distribution,
)
from .criteria import (
    bisep_line_3,
    entanglement_by_length,
    gme_test_4,
    structure_report_from_state,
    w_class_witness,
)
from .moments import (
    all_subsets,
    estimate_moment_from_shots,
    exact_moment_map,
    moment_design,
    moment_exact_t2,
    moment_mc,
    random_settings,
    simulate_shots,
)
from .sampling import RngStream, design_points, design_to_csv, validate_design
from .states import StateSpec, make_state, purity_direct

SEED_ENV_VAR = "RANDMEAS_SEED"

#: Stream-id blocks per purpose so random consumers never collide,
#: even when one run iterates over many subsets.
STREAM_SAMPLES = 0
STREAM_SETTINGS = 1_000_000
STREAM_SHOTS = 2_000_000
STREAM_BOOTSTRAP = 3_000_000


class CliError(Exception):
    """Input error reported to the user (exit status 1)."""


class CrossCheckError(Exception):
    """Internal oracle disagreement (exit status 1)."""


# ---------------------------------------------------------------------------
# State-spec mini-grammar: kind[:param[,param]]
# ---------------------------------------------------------------------------

_GRAMMAR = {
    # kind -> (param names, parser, defaults)
    "product_zero": (("n",), int, None),
    "bell": ((), None, None),
    "ghz": (("n",), int, None),
    "w": (("n",), int, None),
    "cluster_linear": (("n",), int, (4,)),
    "werner": (("p",), float, None),
    "trisep4": ((), None, None),
    "bisep4": (("phi",), float, (0.2,)),
}

_ALIASES = {"product2": ("product_zero", (2,)), "bell_psi_minus": ("bell", ())}


def parse_state(text: str) -> StateSpec:
    """Parse ``kind[:param[,param]]`` into a StateSpec."""
    text = text.strip()
    head, _, tail = text.partition(":")
    params: tuple = ()
    if head in _ALIASES:
        if tail:
            raise CliError(f"alias {head!r} takes no parameters")
        head, params = _ALIASES[head]
    elif head not in _GRAMMAR:
        raise CliError(
            f"unknown state kind {head!r}; valid kinds: "
            + ", ".join(sorted(list(_GRAMMAR) + list(_ALIASES)))
        )
    if not params:
        names, caster, defaults = _GRAMMAR[head]
        if tail:
            raw = tail.split(",")
            if len(raw) != len(names):
                raise CliError(
                    f"state kind {head!r} takes {len(names)} parameter(s) "
                    f"({', '.join(names)}), got {len(raw)}"
                )
            try:
                params = tuple(caster(r) for r in raw)
            except ValueError as exc:
                raise CliError(f"bad parameter for {head!r}: {exc}") from exc
        elif defaults is not None:
            params = defaults
        elif names:
            raise CliError(
                f"state kind {head!r} requires parameter(s): {', '.join(names)}"
            )
    return StateSpec(head, params)


def render_state(spec: StateSpec) -> str:
    """Canonical string form of a StateSpec (round-trips through parse)."""
    if not spec.params:
        return spec.kind
    rendered = ",".join(
        str(p) if isinstance(p, int) else repr(float(p)) for p in spec.params
    )
    return f"{spec.kind}:{rendered}"


def parse_subset(text: str, n: int) -> list:
    """``full`` -> the full party set, ``all`` -> every non-empty subset,
    otherwise a comma list of 1-based party indices."""
    text = text.strip().lower()
    if text == "full":
        return [tuple(range(1, n + 1))]
    if text == "all":
        return all_subsets(n)
    try:
        parties = tuple(sorted({int(p) for p in text.split(",")}))
    except ValueError as exc:
        raise CliError(f"bad subset {text!r}: expected 'full', 'all' or a comma list") from exc
    if not parties or parties[0] < 1 or parties[-1] > n:
        raise CliError(f"subset {text!r} outside parties 1..{n}")
    return [parties]


@dataclass
class RunConfig:
    """Everything that determines a run's output, embedded in every JSON."""

    command: str
    state: str | None = None
    subset: str = "full"
    samples: int = 10000
    shots: int = 0
    design: int = 0
    orders: tuple = (2,)
    seed: int = 0
    output: str = "randmeas-output"
    format: str = "json"
    bootstrap: bool = False
    test: str | None = None
    structure: bool = False

    def to_dict(self) -> dict:
        data = asdict(self)
        data["orders"] = list(self.orders)
        return data


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise CliError(f"environment variable {SEED_ENV_VAR}={env!r} is not an integer") from exc


def _out_dir(config: RunConfig) -> Path:
    path = Path(config.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_table(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    f"{v:.17g}" if isinstance(v, float) else str(v) for v in row
                )
                + "\n"
            )


def _metadata(config: RunConfig, **extra) -> dict:
    payload = {"tool": "randmeas", "version": __version__, "config": config.to_dict()}
    payload.update(extra)
    return payload


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

_DENSITY_KINDS = {
    ("product_zero", (2,)): ("product2", None),
    ("bell", ()): ("bell", None),
}


def _reference_density(spec: StateSpec, subset, n: int):
    if subset != tuple(range(1, n + 1)):
        return None
    if spec.kind == "werner":
        return analytic_pdf("werner", p=spec.params[0])
    key = (spec.kind, spec.params)
    if key in _DENSITY_KINDS:
        kind, p = _DENSITY_KINDS[key]
        return analytic_pdf(kind, p=p)
    return None


def cmd_sample(config: RunConfig) -> int:
    spec = parse_state(config.state)
    rho = make_state(spec)
    if config.samples < 1:
        raise CliError(f"samples must satisfy M >= 1, got {config.samples}")
    subsets = parse_subset(config.subset, rho.n_qubits)
    if len(subsets) != 1:
        raise CliError("sample expects a single subset (use 'full' or a comma list)")
    subset = subsets[0]
    stream = RngStream(config.seed, STREAM_SAMPLES)
    samples = sample_distribution(rho, subset, config.samples, stream)
    out = _out_dir(config)
    samples.to_csv(out / "samples.csv")
    hist = histogram_table(samples.values)
    _write_table(
        out / "histogram.csv",
        "bin_left,bin_right,count,density",
        [(float(l), float(r), int(c), float(d)) for l, r, c, d in hist],
    )
    files = ["samples.csv", "histogram.csv"]
    density_info = None
    density = _reference_density(spec, subset, rho.n_qubits)
    if density is not None:
        if density.is_delta:
            density_info = {"kind": density.kind, "point_mass_at": 0.0}
        else:
            edges = np.linspace(-1.0, 1.0, 82)
            cdf_vals = density.cdf(edges)
            rows = []
            for i in range(81):
                width = edges[i + 1] - edges[i]
                mean_density = (cdf_vals[i + 1] - cdf_vals[i]) / width
                center = 0.5 * (edges[i] + edges[i + 1])
                rows.append((float(edges[i]), float(edges[i + 1]), float(center), float(mean_density)))
            _write_table(out / "density.csv", "bin_left,bin_right,bin_center,mean_density", rows)
            files.append("density.csv")
            density_info = {"kind": density.kind, "support": list(density.support)}
    _write_json(
        out / "sample.json",
        _metadata(
            config,
            n_qubits=rho.n_qubits,
            subset=list(subset),
            samples=config.samples,
            seed=[config.seed, STREAM_SAMPLES],
            reference_density=density_info,
            files=sorted(files),
        ),
    )
    return 0


def _cross_check(rho, subset, estimate, design_cache) -> dict:
    """Compare an estimate against an independent exact oracle.

    Monte-Carlo values must agree within 4 standard errors (plus a tiny
    absolute floor); design values at t = 2 must match the tensor
    contraction to 1e-12.
    """
    t = estimate.order
    if t > 5:
        return {"checked": False, "reason": f"no exact oracle for t={t}"}
    degree = 3 if t <= 3 else 5
    if degree not in design_cache:
        design_cache[degree] = design_points(degree)
    exact = moment_design(rho, subset, t, design_cache[degree]).value
    if estimate.method == "design":
        tolerance = 1e-12
    else:
        tolerance = max(4.0 * (estimate.std_error or 0.0), 1e-9)
    deviation = abs(estimate.value - exact)
    ok = deviation <= tolerance
    result = {
        "checked": True,
        "exact_value": exact,
        "deviation": deviation,
        "tolerance": tolerance,
        "passed": bool(ok),
    }
    if not ok:
        raise CrossCheckError(
            f"oracle cross-check failed for subset {subset}, t={t}: "
            f"estimate {estimate.value!r} vs exact {exact!r} "
            f"(deviation {deviation:.3e} > tolerance {tolerance:.3e})"
        )
    return result


def cmd_moments(config: RunConfig) -> int:
    spec = parse_state(config.state)
    rho = make_state(spec)
    subsets = parse_subset(config.subset, rho.n_qubits)
    if not config.orders:
        raise CliError("at least one moment order is required")
    if config.design and config.shots:
        raise CliError("choose either --design or --shots, not both")
    if config.design:
        if config.design not in (3, 5):
            raise CliError(f"supported design orders are 3 and 5, got {config.design}")
        design = design_points(config.design)
        for t in config.orders:
            if design.degree < t:
                raise CliError(
                    f"design order insufficient: degree {design.degree} < t={t}"
                )

    estimates = []
    checks = []
    design_cache: dict = {}
    do_checks = rho.n_qubits <= 4 and config.shots == 0
    for subset_index, subset in enumerate(subsets):
        if config.shots:
            settings = random_settings(
                rho.n_qubits,
                config.samples,
                RngStream(config.seed, STREAM_SETTINGS + subset_index),
            )
            table = simulate_shots(
                rho, settings, config.shots, RngStream(config.seed, STREAM_SHOTS + subset_index)
            )
            for t in config.orders:
                est = estimate_moment_from_shots(table, t, parties=subset)
                estimates.append(est)
        elif config.design:
            for t in config.orders:
                est = moment_design(rho, subset, t, design_points(config.design))
                estimates.append(est)
                if do_checks and t == 2:
                    exact = moment_exact_t2(correlation_tensor(rho, subset)).value
                    deviation = abs(est.value - exact)
                    if deviation > 1e-12:
                        raise CrossCheckError(
                            f"design vs tensor cross-check failed for {subset}: "
                            f"deviation {deviation:.3e}"
                        )
                    checks.append(
                        {
                            "subset": list(subset),
                            "t": t,
                            "checked": True,
                            "exact_value": exact,
                            "deviation": deviation,
                            "tolerance": 1e-12,
                            "passed": True,
                        }
                    )
        else:
            stream = RngStream(config.seed, STREAM_SAMPLES + subset_index)
            samples = sample_distribution(rho, subset, config.samples, stream)
            for t in config.orders:
                if config.bootstrap:
                    est = moment_mc(
                        samples,
                        t,
                        bootstrap=True,
                        rng=RngStream(config.seed, STREAM_BOOTSTRAP + subset_index),
                    )
                else:
                    est = moment_mc(samples, t)
                estimates.append(est)
                if do_checks:
                    check = _cross_check(rho, subset, est, design_cache)
                    check.update({"subset": list(subset), "t": t})
                    checks.append(check)

    out = _out_dir(config)
    payload = _metadata(
        config,
        n_qubits=rho.n_qubits,
        moments=[e.to_dict() for e in estimates],
        cross_checks=checks,
    )
    _write_json(out / "moments.json", payload)
    if config.format == "csv":
        rows = []
        for e in estimates:
            rows.append(
                (
                    ";".join(str(p) for p in e.subset),
                    e.order,
                    float(e.value),
                    "" if e.std_error is None else float(e.std_error),
                    e.method,
                )
            )
        _write_table(out / "moments.csv", "subset,t,value,std_error,method", rows)
    return 0


def cmd_criteria(config: RunConfig) -> int:
    spec = parse_state(config.state)
    rho = make_state(spec)
    n = rho.n_qubits
    if config.test is None and not config.structure:
        raise CliError("choose a criterion with --test or request --structure")
    verdicts = []
    structure = None
    if config.test == "gme4":
        if n != 4:
            raise CliError(f"gme4 applies to 4-qubit states, got n={n}")
        verdicts.append(gme_test_4(exact_moment_map(rho), purity_direct(rho)))
    elif config.test == "wclass":
        if n < 3:
            raise CliError(f"wclass applies to n >= 3 qubits, got n={n}")
        full = tuple(range(1, n + 1))
        r2 = moment_exact_t2(correlation_tensor(rho, full))
        verdicts.append(w_class_witness(r2, n))
    elif config.test == "bisep3":
        if n != 3:
            raise CliError(f"bisep3 applies to 3-qubit states, got n={n}")
        full = (1, 2, 3)
        r2 = moment_exact_t2(correlation_tensor(rho, full))
        r4 = moment_design(rho, full, 4, design_points(5))
        verdicts.append(bisep_line_3(r2, r4))
    elif config.test == "length":
        full = tuple(range(1, n + 1))
        verdicts.append(entanglement_by_length(correlation_length(rho, full), n))
    elif config.test is not None:
        raise CliError(
            f"unknown criterion {config.test!r}; valid tests: gme4, wclass, bisep3, length"
        )
    if config.structure:
        structure = structure_report_from_state(rho)

    out = _out_dir(config)
    payload = _metadata(
        config,
        n_qubits=n,
        verdicts=[v.to_dict() for v in verdicts],
        structure=None if structure is None else structure.to_dict(),
    )
    _write_json(out / "criteria.json", payload)
    return 0


def cmd_design(config: RunConfig) -> int:
    if config.design not in (3, 5):
        raise CliError(f"supported design orders are 3 and 5, got {config.design}")
    design = design_points(config.design)
    report = validate_design(design, config.design)
    out = _out_dir(config)
    design_to_csv(design, out / "design.csv")
    _write_json(
        out / "design_validation.json",
        _metadata(config, validation=report.to_dict()),
    )
    if not report.passed:
        raise CrossCheckError(
            f"design validation failed (max deviation {report.max_abs_deviation:.3e})"
        )
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randmeas",
        description=(
            "Simulate random local measurements on few-qubit states: "
            "correlation distributions, moments, and entanglement criteria."
        ),
    )
    parser.add_argument("--version", action="version", version=f"randmeas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    state_help = (
        "state spec 'kind[:param[,param]]'; kinds: product_zero:n, bell, ghz:n, "
        "w:n, cluster_linear[:4], werner:p, trisep4, bisep4[:phi]; "
        "aliases: product2, bell_psi_minus"
    )

    def common(p, with_state=True):
        if with_state:
            p.add_argument("--state", required=True, help=state_help)
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")
        p.add_argument("--output", default="randmeas-output", help="output directory")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p_sample = sub.add_parser("sample", help="sample a correlation distribution")
    common(p_sample)
    p_sample.add_argument("--subset", default="full", help="parties, e.g. 'full' or '1,2'")
    p_sample.add_argument("--samples", type=int, default=10000, help="number of random settings M")

    p_moments = sub.add_parser("moments", help="estimate moments of a correlation distribution")
    common(p_moments)
    p_moments.add_argument("--subset", default="full", help="'full', 'all', or a comma list")
    p_moments.add_argument("--orders", default="2", help="comma list of moment orders t")
    p_moments.add_argument("--samples", type=int, default=10000, help="Monte-Carlo settings M")
    p_moments.add_argument("--shots", type=int, default=0, help="shots per setting K (0 = exact expectations)")
    p_moments.add_argument("--design", type=int, default=0, help="design order for exact sums (0 = Haar MC)")
    p_moments.add_argument("--bootstrap", action="store_true", help="bootstrap standard errors (1000 resamples)")

    p_criteria = sub.add_parser("criteria", help="evaluate entanglement criteria")
    common(p_criteria)
    p_criteria.add_argument("--test", default=None, help="criterion: gme4, wclass, bisep3, length")
    p_criteria.add_argument("--structure", action="store_true", help="also report all marginal bound tests")

    p_design = sub.add_parser("design", help="emit a direction set and its validation")
    common(p_design, with_state=False)
    p_design.add_argument("--order", type=int, required=True, help="design degree (3 or 5)")

    return parser


def _config_from_args(args) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    if seed < 0:
        raise CliError(f"seed must be non-negative, got {seed}")
    config = RunConfig(
        command=args.command,
        state=getattr(args, "state", None),
        subset=getattr(args, "subset", "full"),
        samples=getattr(args, "samples", 10000),
        shots=getattr(args, "shots", 0),
        design=getattr(args, "design", 0) or getattr(args, "order", 0),
        orders=tuple(
            int(t) for t in str(getattr(args, "orders", "2")).split(",") if t.strip()
        ),
        seed=seed,
        output=args.output,
        format=args.format,
        bootstrap=getattr(args, "bootstrap", False),
        test=getattr(args, "test", None),
        structure=getattr(args, "structure", False),
    )
    if config.state is not None:
        config.state = render_state(parse_state(config.state))
    return config


_COMMANDS = {
    "sample": cmd_sample,
    "moments": cmd_moments,
    "criteria": cmd_criteria,
    "design": cmd_design,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return _COMMANDS[args.command](config)
    except (CliError, CrossCheckError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
