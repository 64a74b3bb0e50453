import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from randmeas.cli import CliError, main, parse_state, parse_subset, render_state


def run_cli(args):
    return main([str(a) for a in args])


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# State-spec grammar
# ---------------------------------------------------------------------------

def test_parse_state_aliases_and_defaults():
    assert render_state(parse_state("product2")) == "product_zero:2"
    assert render_state(parse_state("bell_psi_minus")) == "bell"
    assert render_state(parse_state("bisep4")) == "bisep4:0.2"
    assert render_state(parse_state("cluster_linear")) == "cluster_linear:4"


def test_parse_state_rejects_unknown_kind():
    with pytest.raises(CliError, match="valid kinds"):
        parse_state("squeezed:2")


def test_parse_state_rejects_bad_arity():
    with pytest.raises(CliError, match="parameter"):
        parse_state("ghz")
    with pytest.raises(CliError, match="parameter"):
        parse_state("ghz:3,4")


state_strategy = st.one_of(
    st.just("bell"),
    st.just("trisep4"),
    st.builds(lambda n: f"ghz:{n}", st.integers(2, 6)),
    st.builds(lambda n: f"w:{n}", st.integers(2, 6)),
    st.builds(lambda n: f"product_zero:{n}", st.integers(1, 6)),
    st.builds(lambda p: f"werner:{p}", st.floats(0, 1, allow_nan=False)),
    st.builds(lambda x: f"bisep4:{x}", st.floats(-3, 3, allow_nan=False)),
)


@given(state_strategy)
def test_state_grammar_round_trips(text):
    canonical = render_state(parse_state(text))
    assert render_state(parse_state(canonical)) == canonical


def test_parse_subset_forms():
    assert parse_subset("full", 3) == [(1, 2, 3)]
    assert parse_subset("2,1", 3) == [(1, 2)]
    assert len(parse_subset("all", 3)) == 7
    with pytest.raises(CliError, match="outside"):
        parse_subset("5", 3)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def test_sample_unknown_state_exits_nonzero(tmp_path, capsys):
    rc = run_cli(["sample", "--state", "nope", "--output", tmp_path / "o"])
    assert rc == 1
    assert "valid kinds" in capsys.readouterr().err


def test_sample_rejects_zero_samples(tmp_path, capsys):
    rc = run_cli(
        ["sample", "--state", "product2", "--samples", 0, "--output", tmp_path / "o"]
    )
    assert rc == 1
    assert "M >= 1" in capsys.readouterr().err


def test_sample_bell_histogram_is_flat(tmp_path):
    out = tmp_path / "bell"
    rc = run_cli(
        ["sample", "--state", "bell", "--samples", 50_000, "--seed", 7, "--output", out]
    )
    assert rc == 0
    hist = np.loadtxt(out / "histogram.csv", delimiter=",", skiprows=1)
    counts = hist[:, 2]
    assert stats.chisquare(counts).pvalue > 1e-3
    meta = read_json(out / "sample.json")
    assert meta["config"]["state"] == "bell"
    assert meta["reference_density"]["kind"] == "bell"
    density = np.loadtxt(out / "density.csv", delimiter=",", skiprows=1)
    assert np.allclose(density[:, 3], 0.5)


def test_sample_werner_support(tmp_path):
    out = tmp_path / "werner"
    rc = run_cli(
        ["sample", "--state", "werner:0.577", "--samples", 20_000, "--seed", 3, "--output", out]
    )
    assert rc == 0
    values = np.loadtxt(out / "samples.csv", delimiter=",", skiprows=1)[:, 1]
    assert np.max(np.abs(values)) <= 0.578


def test_sample_marginal_subset(tmp_path):
    out = tmp_path / "wmarg"
    rc = run_cli(
        ["sample", "--state", "w:3", "--subset", "1,2", "--samples", 2_000, "--output", out]
    )
    assert rc == 0
    assert read_json(out / "sample.json")["subset"] == [1, 2]


def test_cli_outputs_are_byte_identical(tmp_path):
    out = tmp_path / "a"
    args = [
        "moments", "--state", "ghz:3", "--orders", "2", "--samples", 5_000,
        "--seed", 11, "--output", out,
    ]
    assert run_cli(args) == 0
    first = (out / "moments.json").read_bytes()
    assert run_cli(args) == 0
    assert (out / "moments.json").read_bytes() == first


def test_moments_design_values(tmp_path):
    out = tmp_path / "m"
    rc = run_cli(
        ["moments", "--state", "ghz:4", "--orders", "2", "--design", 3, "--subset", "full", "--output", out]
    )
    assert rc == 0
    data = read_json(out / "moments.json")
    assert abs(data["moments"][0]["value"] - 1.0 / 9.0) < 1e-12
    assert data["cross_checks"][0]["passed"]


def test_moments_ghz3_design5_orders_2_4(tmp_path):
    out = tmp_path / "g3"
    rc = run_cli(
        ["moments", "--state", "ghz:3", "--orders", "2,4", "--design", 5, "--output", out]
    )
    assert rc == 0
    values = {m["t"]: m["value"] for m in read_json(out / "moments.json")["moments"]}
    assert abs(values[2] - 4.0 / 27.0) < 1e-12
    assert abs(values[4] - 64.0 / 1125.0) < 1e-12


def test_moments_insufficient_design_order(tmp_path, capsys):
    rc = run_cli(
        ["moments", "--state", "bell", "--orders", "4", "--design", 3, "--output", tmp_path / "o"]
    )
    assert rc == 1
    assert "design order insufficient" in capsys.readouterr().err


def test_moments_monte_carlo_cross_check_passes(tmp_path):
    out = tmp_path / "mc"
    rc = run_cli(
        ["moments", "--state", "bell", "--orders", "2", "--samples", 20_000, "--seed", 5, "--output", out]
    )
    assert rc == 0
    data = read_json(out / "moments.json")
    assert data["cross_checks"][0]["passed"]
    assert abs(data["moments"][0]["value"] - 1.0 / 3.0) < 4 * data["moments"][0]["std_error"]


def test_moments_finite_shots(tmp_path):
    out = tmp_path / "shots"
    rc = run_cli(
        [
            "moments", "--state", "bell", "--orders", "2", "--samples", 20_000,
            "--shots", 2, "--seed", 9, "--output", out,
        ]
    )
    assert rc == 0
    est = read_json(out / "moments.json")["moments"][0]
    assert est["method"] == "finite_shot" and est["K"] == 2
    assert abs(est["value"] - 1.0 / 3.0) < 4 * est["std_error"]


def test_moments_csv_format(tmp_path):
    out = tmp_path / "csv"
    rc = run_cli(
        ["moments", "--state", "bell", "--orders", "2", "--design", 3, "--format", "csv", "--output", out]
    )
    assert rc == 0
    assert (out / "moments.csv").exists()


def test_moments_all_subsets(tmp_path):
    out = tmp_path / "all"
    rc = run_cli(
        ["moments", "--state", "ghz:3", "--subset", "all", "--design", 3, "--output", out]
    )
    assert rc == 0
    assert len(read_json(out / "moments.json")["moments"]) == 7


def test_criteria_gme4_ghz(tmp_path):
    out = tmp_path / "c"
    rc = run_cli(["criteria", "--state", "ghz:4", "--test", "gme4", "--output", out])
    assert rc == 0
    verdict = read_json(out / "criteria.json")["verdicts"][0]
    assert verdict["detected"]
    assert abs(verdict["statistic"] - 6.0 / 81.0) < 1e-10
    assert abs(verdict["threshold"]) < 1e-12


def test_criteria_bisep4_structure(tmp_path):
    out = tmp_path / "s"
    rc = run_cli(
        ["criteria", "--state", "bisep4:0.2", "--test", "gme4", "--structure", "--output", out]
    )
    assert rc == 0
    data = read_json(out / "criteria.json")
    assert not data["verdicts"][0]["detected"]
    assert data["structure"]["flagged"] == [[1, 2], [3, 4]]


def test_criteria_wclass_w4_margin_near_zero(tmp_path):
    out = tmp_path / "w"
    rc = run_cli(["criteria", "--state", "w:4", "--test", "wclass", "--output", out])
    assert rc == 0
    verdict = read_json(out / "criteria.json")["verdicts"][0]
    assert abs(verdict["threshold"] - 4.0 / 81.0) < 1e-15
    assert abs(verdict["margin"]) < 1e-12
    assert not verdict["detected"]


def test_criteria_mismatched_n(tmp_path, capsys):
    rc = run_cli(["criteria", "--state", "ghz:3", "--test", "gme4", "--output", tmp_path / "o"])
    assert rc == 1
    assert "4-qubit" in capsys.readouterr().err


def test_criteria_requires_test_or_structure(tmp_path, capsys):
    rc = run_cli(["criteria", "--state", "ghz:4", "--output", tmp_path / "o"])
    assert rc == 1
    assert "--test" in capsys.readouterr().err


def test_design_outputs(tmp_path):
    out3 = tmp_path / "d3"
    assert run_cli(["design", "--order", 3, "--output", out3]) == 0
    assert np.loadtxt(out3 / "design.csv", delimiter=",", skiprows=1).shape == (6, 3)
    assert read_json(out3 / "design_validation.json")["validation"]["passed"]

    out5 = tmp_path / "d5"
    assert run_cli(["design", "--order", 5, "--output", out5]) == 0
    assert np.loadtxt(out5 / "design.csv", delimiter=",", skiprows=1).shape == (12, 3)

    rc = run_cli(["design", "--order", 4, "--output", tmp_path / "d4"])
    assert rc == 1


def test_seed_env_var_default(tmp_path, monkeypatch):
    monkeypatch.setenv("RANDMEAS_SEED", "123")
    out_env = tmp_path / "env"
    out_flag = tmp_path / "flag"
    args = ["sample", "--state", "bell", "--samples", 500]
    assert run_cli(args + ["--output", out_env]) == 0
    assert run_cli(args + ["--seed", 123, "--output", out_flag]) == 0
    a = np.loadtxt(out_env / "samples.csv", delimiter=",", skiprows=1)
    b = np.loadtxt(out_flag / "samples.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(a, b)


def test_metadata_embeds_config_and_version(tmp_path):
    out = tmp_path / "meta"
    assert run_cli(["design", "--order", 3, "--output", out]) == 0
    meta = read_json(out / "design_validation.json")
    assert meta["version"]
    assert meta["config"]["command"] == "design"
