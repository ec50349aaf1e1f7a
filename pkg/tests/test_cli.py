"""Command line contract: outputs, exit codes, determinism."""

import pytest

from iwalab.cli import main

SCALAR = """{
  "p": 3,
  "k": 1,
  "precision_exp": 8,
  "degree_cap": 24,
  "summands": [{"kind": "poly", "coeffs": [-3, 1], "e": 1}]
}
"""

SQUARE = SCALAR.replace('"e": 1', '"e": 2')

MU = SCALAR.replace(
    '{"kind": "poly", "coeffs": [-3, 1], "e": 1}', '{"kind": "mu", "m": 1, "e": 1}'
)

T_ONLY = SCALAR.replace("[-3, 1]", "[0, 1]").replace('"precision_exp": 8', '"precision_exp": 4')


@pytest.fixture
def scalar_file(tmp_path):
    path = tmp_path / "scalar.json"
    path.write_text(SCALAR)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_prepare_factors_product(scalar_file, capsys):
    code, out, _ = run(["prepare", scalar_file, "--poly", "3", "4", "1"], capsys)
    assert code == 0
    assert "mu\t0" in out
    assert "P\t3,1" in out
    assert "residual\t0" in out
    assert out.rstrip().endswith("verdict\tPASS")


def test_prepare_zero_series_exhausts_precision(scalar_file, capsys):
    code, _, err = run(["prepare", scalar_file, "--poly", "0"], capsys)
    assert code == 3
    assert "precision" in err


def test_prepare_unit(scalar_file, capsys):
    code, out, _ = run(["prepare", scalar_file, "--poly", "5"], capsys)
    assert code == 0
    assert "lambda\t0" in out
    assert "u\t5" in out


def test_levels_factor_column(scalar_file, capsys):
    code, out, _ = run(["levels", scalar_file, "--from", "1", "--to", "4"], capsys)
    assert code == 0
    rows = out.strip().split("\n")
    assert rows[0] == "n\tinvariant_factors\te_n\trank\tflags"
    assert [r.split("\t")[1] for r in rows[1:]] == ["3", "9", "27", "81"]


def test_levels_mu_ranks(tmp_path, capsys):
    path = tmp_path / "mu.json"
    path.write_text(MU)
    code, out, _ = run(["levels", str(path), "--from", "1", "--to", "3"], capsys)
    assert code == 0
    rows = out.strip().split("\n")[1:]
    assert [r.split("\t")[3] for r in rows] == ["1", "3", "9"]


def test_levels_strict_flagged(tmp_path, capsys, monkeypatch):
    path = tmp_path / "t.json"
    path.write_text(T_ONLY)
    code, out, _ = run(["levels", str(path), "--from", "1", "--to", "2"], capsys)
    assert code == 0
    assert "flagged" in out
    code, _, _ = run(
        ["levels", str(path), "--from", "1", "--to", "2", "--strict"], capsys
    )
    assert code == 3
    monkeypatch.setenv("IWALAB_STRICT", "1")
    code, _, _ = run(["levels", str(path), "--from", "1", "--to", "2"], capsys)
    assert code == 3


def test_verify_circ_all_pass(scalar_file, capsys):
    code, out, _ = run(
        ["verify", scalar_file, "--suite", "circ", "--levels", "1..4"], capsys
    )
    assert code == 0
    assert out.count("\tPASS") == 4  # three pairs plus the verdict
    assert "verdict\tPASS" in out


def test_verify_propf_injected_counterexample(scalar_file, capsys):
    code, out, _ = run(
        ["verify", scalar_file, "--suite", "propf", "--levels", "1..3"], capsys
    )
    assert code == 0
    code, out, _ = run(
        [
            "verify", scalar_file, "--suite", "propf", "--levels", "1..3",
            "--inject-pc", "1",
        ],
        capsys,
    )
    assert code == 1
    assert "witness" in out
    assert "verdict\tFAIL" in out


def test_verify_unknown_suite_is_usage_error(scalar_file, capsys):
    with pytest.raises(SystemExit) as ex:
        main(["verify", scalar_file, "--suite", "nope", "--levels", "1..2"])
    assert ex.value.code == 2


def test_verify_requires_two_levels_for_pair_suites(scalar_file, capsys):
    code, _, err = run(
        ["verify", scalar_file, "--suite", "circ", "--levels", "2..2"], capsys
    )
    assert code == 2
    assert "two levels" in err


def test_verify_reversal_needs_single_summand(tmp_path, capsys):
    path = tmp_path / "two.json"
    path.write_text(
        SCALAR.replace(
            '[{"kind": "poly", "coeffs": [-3, 1], "e": 1}]',
            '[{"kind": "poly", "coeffs": [-3, 1], "e": 1},'
            ' {"kind": "poly", "coeffs": [-6, 1], "e": 1}]',
        )
    )
    code, _, err = run(
        ["verify", str(path), "--suite", "reversal", "--levels", "1..2"], capsys
    )
    assert code == 2
    assert "reversal" in err


def test_verify_reversal_square(tmp_path, capsys):
    path = tmp_path / "sq.json"
    path.write_text(SQUARE)
    code, out, _ = run(
        ["verify", str(path), "--suite", "reversal", "--levels", "2..2"], capsys
    )
    assert code == 0
    assert "vanish j+l>3" in out


def test_verify_suites_deterministic(tmp_path, capsys):
    path = tmp_path / "sq.json"
    path.write_text(SQUARE)
    outs = []
    for _ in range(2):
        code, out, _ = run(
            ["verify", str(path), "--suite", "pairing", "--levels", "1..2",
             "--seed", "9"],
            capsys,
        )
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_verify_sf_and_ab_skip_mu_modules(tmp_path, capsys):
    path = tmp_path / "mu.json"
    path.write_text(MU)
    for suite in ("ab", "sf"):
        code, out, _ = run(
            ["verify", str(path), "--suite", suite, "--levels", "1..3"], capsys
        )
        assert code == 0
        assert "SKIP" in out


def test_gen_deterministic_and_distinguished(capsys):
    code, out1, _ = run(
        ["gen", "--seed", "42", "--count", "3", "--max-deg", "2", "--allow-mu"],
        capsys,
    )
    assert code == 0
    _, out2, _ = run(
        ["gen", "--seed", "42", "--count", "3", "--max-deg", "2", "--allow-mu"],
        capsys,
    )
    assert out1 == out2
    assert out1.count('"p": 3') == 3


def test_gen_degree_one_shape(capsys):
    from iwalab.specfile import parse_spec_text

    code, out, _ = run(["gen", "--seed", "5", "--count", "5", "--max-deg", "1"], capsys)
    assert code == 0
    for doc in out.split("\n\n"):
        spec = parse_spec_text(doc)
        for s in spec.summands:
            assert s.kind == "poly" and len(s.coeffs) == 2


def test_gen_writes_files(tmp_path, capsys):
    out_dir = tmp_path / "gen"
    code, _, _ = run(
        ["gen", "--seed", "7", "--count", "2", "--max-deg", "2", "--out", str(out_dir)],
        capsys,
    )
    assert code == 0
    assert sorted(p.name for p in out_dir.iterdir()) == [
        "gen_7_0.json",
        "gen_7_1.json",
    ]


def test_fukuda_from_levels_pipeline(scalar_file, tmp_path, capsys):
    code, out, _ = run(["levels", scalar_file, "--from", "1", "--to", "5"], capsys)
    series = tmp_path / "series.tsv"
    series.write_text(out)
    code, out, _ = run(["fukuda", str(series)], capsys)
    assert code == 0
    assert "status\tStabilized" in out
    assert "lambda\t1" in out and "mu\t0" in out and "nu\t0" in out


def test_fukuda_frozen_series(tmp_path, capsys):
    series = tmp_path / "flat.tsv"
    series.write_text("n\te_n\n2\t5\n3\t5\n4\t5\n5\t5\n")
    code, out, _ = run(["fukuda", str(series)], capsys)
    assert code == 0
    assert "status\tSizeFrozen" in out


def test_fukuda_inconsistent_series(tmp_path, capsys):
    series = tmp_path / "bad.tsv"
    series.write_text("n\te_n\n1\t1\n2\t1\n3\t2\n")
    code, out, _ = run(["fukuda", str(series)], capsys)
    assert code == 1
    assert "InconsistentSeries" in out


def test_fukuda_malformed(tmp_path, capsys):
    series = tmp_path / "junk.tsv"
    series.write_text("a\tb\n1\t2\n")
    code, _, err = run(["fukuda", str(series)], capsys)
    assert code == 2
    assert "header" in err


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"p": 3}')
    code, _, err = run(["levels", str(path), "--from", "1", "--to", "2"], capsys)
    assert code == 2
    assert "missing" in err
