import json

import numpy as np
import pytest

from focktomo.cli import EXIT_NUMERICS, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from focktomo.simulator import read_dataset


def _simulate(tmp_path, name="run.txt", extra=()):
    path = tmp_path / name
    code = main(["simulate", "--n-vacuum", "5000", "--n-fock", "2000",
                 "--seed", "5", "-o", str(path), *extra])
    assert code == EXIT_OK
    return path


def _strip_timestamp(text: str) -> str:
    return "\n".join(line for line in text.splitlines()
                     if not line.startswith("generated_at="))


def test_simulate_writes_dataset(tmp_path, capsys):
    path = _simulate(tmp_path, extra=("--eta", "0.7"))
    out = capsys.readouterr().out
    assert "7000 samples" in out
    ds = read_dataset(path)
    assert ds.spec.eta_true == 0.7
    assert ds.spec.n_vacuum == 5000
    assert ds.spec.seed == 5


def test_simulate_is_deterministic(tmp_path):
    a = _simulate(tmp_path, "a.txt")
    b = _simulate(tmp_path, "b.txt")
    assert a.read_bytes() == b.read_bytes()


def test_reconstruct_outputs(tmp_path):
    path = _simulate(tmp_path)
    outdir = tmp_path / "out"
    assert main(["reconstruct", str(path), "-o", str(outdir)]) == EXIT_OK
    for name in ("report.txt", "report.json", "wigner_profile.txt",
                 "marginal_histogram.txt"):
        assert (outdir / name).exists()
    report = json.loads((outdir / "report.json").read_text())
    assert report["report_version"] == 1
    assert 0.0 <= report["efficiency"]["eta_hat"] <= 1.0
    assert report["analysis"]["source"] == "fock_block"
    assert "generated_at" in report["provenance"]
    # the text twin carries the same top-level keys as sections
    text = (outdir / "report.txt").read_text()
    assert "[efficiency]" in text
    assert "eta_hat=" in text


def test_reconstruct_deterministic_up_to_timestamp(tmp_path):
    path = _simulate(tmp_path)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["reconstruct", str(path), "-o", str(out1)]) == EXIT_OK
    assert main(["reconstruct", str(path), "-o", str(out2)]) == EXIT_OK
    t1 = _strip_timestamp((out1 / "report.txt").read_text())
    t2 = _strip_timestamp((out2 / "report.txt").read_text())
    assert t1 == t2
    assert (out1 / "wigner_profile.txt").read_bytes() == (out2 / "wigner_profile.txt").read_bytes()
    assert (out1 / "marginal_histogram.txt").read_bytes() == (out2 / "marginal_histogram.txt").read_bytes()


def test_reconstruct_flags_change_output(tmp_path):
    path = _simulate(tmp_path)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["reconstruct", str(path), "-o", str(out1)]) == EXIT_OK
    assert main(["reconstruct", str(path), "--bandwidth-scale", "2.0",
                 "-o", str(out2)]) == EXIT_OK
    r1 = json.loads((out1 / "report.json").read_text())
    r2 = json.loads((out2 / "report.json").read_text())
    assert r2["config"]["bandwidth"] == pytest.approx(2.0 * r1["config"]["bandwidth"], rel=1e-9)


def test_vacuum_only_reconstruct(tmp_path):
    path = tmp_path / "vac.txt"
    assert main(["simulate", "--n-vacuum", "20000", "--n-fock", "0",
                 "--seed", "3", "-o", str(path)]) == EXIT_OK
    outdir = tmp_path / "out"
    assert main(["reconstruct", str(path), "-o", str(outdir)]) == EXIT_OK
    report = json.loads((outdir / "report.json").read_text())
    assert report["analysis"]["source"] == "vacuum_control"
    assert report["efficiency"]["eta_hat"] == pytest.approx(0.0, abs=0.02)
    assert report["diagonals"]["rho_00"] == pytest.approx(1.0, abs=0.02)


def test_budget_stdout_and_file(tmp_path, capsys):
    out = tmp_path / "budget.txt"
    assert main(["budget", "-o", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert out.read_text() == printed
    values = dict(line.split("=", 1) for line in printed.splitlines() if "=" in line)
    assert float(values["eta_predicted"]) == pytest.approx(0.57722931, abs=1e-8)
    assert values["budget_format_version"] == "1"


def test_budget_custom_factors(tmp_path, capsys):
    factors = tmp_path / "factors.txt"
    factors.write_text("a 0.5 0 direct\nb 0.5 0 direct\n")
    assert main(["budget", "--factors", str(factors)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "eta_predicted=0.25" in printed


def test_report_merges_budget(tmp_path):
    path = _simulate(tmp_path)
    outdir = tmp_path / "out"
    assert main(["reconstruct", str(path), "-o", str(outdir)]) == EXIT_OK
    budget_file = tmp_path / "budget.txt"
    assert main(["budget", "-o", str(budget_file)]) == EXIT_OK
    merged_dir = tmp_path / "merged"
    assert main(["report", "--reconstruction", str(outdir / "report.json"),
                 "--budget", str(budget_file), "-o", str(merged_dir)]) == EXIT_OK
    merged = json.loads((merged_dir / "merged_report.json").read_text())
    assert "budget" in merged
    assert "agreement" in merged
    assert isinstance(merged["agreement"]["passed"], bool)
    text = (merged_dir / "merged_report.txt").read_text()
    assert "[agreement]" in text


def test_report_without_budget(tmp_path):
    path = _simulate(tmp_path)
    outdir = tmp_path / "out"
    assert main(["reconstruct", str(path), "-o", str(outdir)]) == EXIT_OK
    merged_dir = tmp_path / "merged"
    assert main(["report", "--reconstruction", str(outdir / "report.json"),
                 "-o", str(merged_dir)]) == EXIT_OK
    merged = json.loads((merged_dir / "merged_report.json").read_text())
    assert "budget" not in merged
    assert "agreement" not in merged


def test_report_rejects_version_mismatch(tmp_path, capsys):
    path = _simulate(tmp_path)
    outdir = tmp_path / "out"
    assert main(["reconstruct", str(path), "-o", str(outdir)]) == EXIT_OK
    doctored = json.loads((outdir / "report.json").read_text())
    doctored["report_version"] = 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doctored))
    code = main(["report", "--reconstruction", str(bad), "-o", str(tmp_path / "m")])
    assert code == EXIT_VALIDATION
    assert "report_version" in capsys.readouterr().err


def test_budget_version_mismatch(tmp_path, capsys):
    path = _simulate(tmp_path)
    outdir = tmp_path / "out"
    assert main(["reconstruct", str(path), "-o", str(outdir)]) == EXIT_OK
    budget_file = tmp_path / "budget.txt"
    assert main(["budget", "-o", str(budget_file)]) == EXIT_OK
    doctored = budget_file.read_text().replace("budget_format_version=1",
                                               "budget_format_version=9")
    budget_file.write_text(doctored)
    code = main(["report", "--reconstruction", str(outdir / "report.json"),
                 "--budget", str(budget_file), "-o", str(tmp_path / "m")])
    assert code == EXIT_VALIDATION
    assert "budget_format_version" in capsys.readouterr().err


def test_missing_dataset_is_validation_error(tmp_path, capsys):
    code = main(["reconstruct", str(tmp_path / "nope.txt"), "-o", str(tmp_path / "o")])
    assert code == EXIT_VALIDATION
    assert "error" in capsys.readouterr().err


def test_corrupt_dataset_is_validation_error(tmp_path, capsys):
    path = _simulate(tmp_path)
    lines = path.read_text().splitlines()
    lines[0] = "# format_version=99"
    path.write_text("\n".join(lines) + "\n")
    outdir = tmp_path / "o"
    code = main(["reconstruct", str(path), "-o", str(outdir)])
    assert code == EXIT_VALIDATION
    assert not outdir.exists()  # no partial output
    assert "format_version" in capsys.readouterr().err


def test_invalid_eta_is_validation_error(tmp_path, capsys):
    code = main(["simulate", "--eta", "1.5", "-o", str(tmp_path / "x.txt")])
    assert code == EXIT_VALIDATION
    assert "eta" in capsys.readouterr().err


def test_degenerate_dataset_is_numerics_error(tmp_path, capsys):
    path = _simulate(tmp_path)
    lines = path.read_text().splitlines()
    header, body = lines[:9], lines[9:]
    frozen = []
    for line in body:
        src, phase, _ = line.split()
        frozen.append(f"{src} {phase} 0.5")
    path.write_text("\n".join(header + frozen) + "\n")
    code = main(["reconstruct", str(path), "-o", str(tmp_path / "o")])
    assert code == EXIT_NUMERICS
    assert "variance" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE


def test_env_config_defaults(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("eta=0.3\nn_vacuum=4000\nn_fock=1000\n")
    monkeypatch.setenv("FOCKTOMO_CONFIG", str(cfg))
    path = tmp_path / "run.txt"
    assert main(["simulate", "--seed", "1", "-o", str(path)]) == EXIT_OK
    ds = read_dataset(path)
    assert ds.spec.eta_true == 0.3
    assert ds.spec.n_vacuum == 4000
    # explicit flags beat the config file
    path2 = tmp_path / "run2.txt"
    assert main(["simulate", "--seed", "1", "--eta", "0.9", "-o", str(path2)]) == EXIT_OK
    assert read_dataset(path2).spec.eta_true == 0.9


def test_env_config_rejects_unknown_key(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("not_a_key=1\n")
    monkeypatch.setenv("FOCKTOMO_CONFIG", str(cfg))
    code = main(["simulate", "-o", str(tmp_path / "x.txt")])
    assert code == EXIT_VALIDATION
    assert "unknown key" in capsys.readouterr().err


def test_default_run_parameters(tmp_path):
    # documented defaults: the reference run shape
    path = tmp_path / "run.txt"
    assert main(["simulate", "--n-vacuum", "1000", "--n-fock", "0",
                 "-o", str(path)]) == EXIT_OK
    ds = read_dataset(path)
    assert ds.spec.eta_true == 0.553
    assert ds.spec.seed == 42
    assert ds.spec.detector.scale == 1.0
    assert ds.spec.detector.dark_fraction == 0.0
