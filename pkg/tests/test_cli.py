from __future__ import annotations

import subprocess
import sys

import pytest

from empirical_o import cli, pipeline
from empirical_o.harness import ResponseTable, UniformK, WorkloadSpec, run_experiment
from empirical_o.report import key_values
from empirical_o.statfit import FULL, fit_ols
from empirical_o.verdict import Label


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_config(path, body: str):
    path.write_text(body, encoding="utf-8")
    return path


def test_generate_uniform(capsys):
    code, out, _ = run(["generate", "--family", "uniform", "-K", 1, "-n", 5], capsys)
    assert code == 0 and out == "1\n1\n1\n1\n1\n"


def test_generate_heavy_tail_round_trip(capsys):
    code, out, _ = run(["generate", "--family", "heavy-tail", "-n", 50, "--seed", 4], capsys)
    from empirical_o.workloads import HeavyTailSpec, gen_heavy_tail
    assert [float(x) for x in out.split()] == gen_heavy_tail(HeavyTailSpec(50), 4).tolist()


def test_generate_invalid_t_d(capsys):
    code, _, err = run(["generate", "--family", "tied", "--t-d", 50, "-n", 10], capsys)
    assert code == 2 and "tie density" in err


def test_sort_counts(tmp_path, capsys):
    f = tmp_path / "keys.txt"
    f.write_text("1\n1\n1\n1\n")
    code, out, _ = run(["sort", f, "--weights", "1,0,0"], capsys)
    assert code == 0
    assert "comparisons=6" in out and "weighted_cost=6.0" in out


def test_sort_bad_key(tmp_path, capsys):
    f = tmp_path / "keys.txt"
    f.write_text("1\nabc\n")
    code, _, err = run(["sort", f], capsys)
    assert code == 2 and "line 2" in err


def test_measure_then_fit_round_trip(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run(["measure", "--family", "uniform", "-K", 100, "--grid", "500:4000:500", "--trials-min", 3,
                      "--trials-max", 6, "--seed", 9, "-o", out], capsys)
    assert code == 0
    assert out.read_text().startswith("n,y,trials,stddev\n")
    spec = WorkloadSpec(UniformK(100), range(500, 4001, 500), trials_min=3, trials_max=6, seed=9)
    in_process = fit_ols(run_experiment(spec), FULL)
    code, text, _ = run(["fit", out, "--kv"], capsys)
    assert code == 0
    assert key_values(in_process) in text
    assert "Analysis of Variance" in text


def test_fit_plot_data(tmp_path, capsys):
    csv_path = tmp_path / "r.csv"
    csv_path.write_text("n,y\n" + "".join(f"{n},{n * n + 3 * n}\n" for n in range(1, 11)))
    plot = tmp_path / "plot.csv"
    code, _, _ = run(["fit", csv_path, "--terms", "Const,N,NSquared", "--plot-data", plot, "--residuals"], capsys)
    assert code == 0
    lines = plot.read_text().splitlines()
    assert lines[0] == "model,n,observed,fitted"
    assert {line.split(",")[0] for line in lines[1:]} == {"linear", "nlogn", "quadratic"}


def test_fit_malformed_row(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("n,y\n1,2\n2,3\n3,oops\n")
    code, _, err = run(["fit", f], capsys)
    assert code == 2
    assert "line 4" in err


def test_fit_missing_file(tmp_path, capsys):
    code, _, err = run(["fit", tmp_path / "nope.csv"], capsys)
    assert code == 2 and "cannot read" in err


def test_verdict_exit_codes(tmp_path, capsys):
    quad = tmp_path / "q.csv"
    quad.write_text("n,y\n" + "".join(f"{n},{n * n}\n" for n in range(1, 9)))
    flat = tmp_path / "f.csv"
    flat.write_text("n,y\n" + "".join(f"{n},5\n" for n in range(1, 9)))
    lin = tmp_path / "l.csv"
    lin.write_text("n,y\n" + "".join(f"{n},{100 * n}\n" for n in range(1, 9)))
    code, out, _ = run(["verdict", quad], capsys)
    assert code == 0 and out.startswith("verdict: Quadratic")
    code, out, _ = run(["verdict", flat], capsys)
    assert code == 3 and "Inconclusive" in out
    code, out, _ = run(["verdict", lin, quad], capsys)
    assert code == 0 and out.startswith("verdict: PseudoLinear")
    code, _, _ = run(["verdict", lin, quad, "--alpha", "2"], capsys)
    assert code == 2


def test_verdict_grid_mismatch(tmp_path, capsys):
    a = tmp_path / "a.csv"
    a.write_text("n,y\n" + "".join(f"{n},{100 * n}\n" for n in range(1, 9)))
    b = tmp_path / "b.csv"
    b.write_text("n,y\n" + "".join(f"{n},{n * n}\n" for n in range(2, 10)))
    code, _, err = run(["verdict", a, b], capsys)
    assert code == 2 and "grid" in err


def test_reproduce_paper_codes(capsys):
    code, out, _ = run(["reproduce-paper", "table2A"], capsys)
    assert code == 0 and out.startswith("PASS table2A")
    assert "S " in out and "0.0876502" in out
    code, out, _ = run(["reproduce-paper", "table5", "-q"], capsys)
    assert code == 4 and "FAIL table5" in out
    code, _, err = run(["reproduce-paper", "nosuch"], capsys)
    assert code == 2 and "unknown fixture" in err


def test_sweep_k(capsys):
    code, out, _ = run(["sweep-k", "-n", 1024, "--k-grid", "1,16,1024", "--trials-min", 2, "--trials-max", 2], capsys)
    assert code == 0
    t = ResponseTable.from_csv(out)
    assert t.key == "K" and t.n.tolist() == [1, 16, 1024]


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["measure"])
    assert info.value.code == 2


def test_run_quadratic_config(tmp_path, capsys):
    cfg = write_config(tmp_path / "k1.ini", f"""
[experiment]
family = uniform
K = 1
grid = 2^10:2^14:2^10
trials_min = 2
response = count

[output]
dir = {tmp_path / 'out'}
""")
    code, out, _ = run(["run", cfg], capsys)
    assert code == 0 and "verdict: Quadratic" in out
    for name in ("response.csv", "report.txt", "plot.csv"):
        assert (tmp_path / "out" / name).is_file()


def test_run_config_errors(tmp_path, capsys):
    cfg = write_config(tmp_path / "bad.ini", "[experiment]\nfamly = uniform\n")
    code, _, err = run(["run", cfg], capsys)
    assert code == 2 and "famly" in err
    cfg = write_config(tmp_path / "bad2.ini", "[plotting]\nx = 1\n")
    code, _, err = run(["run", cfg], capsys)
    assert code == 2 and "plotting" in err
    code, _, err = run(["run", tmp_path / "missing.ini"], capsys)
    assert code == 2


def test_run_stage_tagged_error(tmp_path, capsys):
    # four sizes cannot support the four-term model: the verdict stage fails
    cfg = write_config(tmp_path / "small.ini", f"[experiment]\ngrid = 10,20,30,40\ntrials_min = 1\n"
                                               f"[output]\ndir = {tmp_path}\n")
    code, _, err = run(["run", cfg], capsys)
    assert code == 2 and "[fit]" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "empirical_o", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "reproduce-paper" in proc.stdout


@pytest.mark.parametrize("text, grid", [
    ("1,2,3", (1, 2, 3)), ("2^10,2^11", (1024, 2048)), ("10:40:10", (10, 20, 30, 40)),
    ("2^10:2^13:*2", (1024, 2048, 4096, 8192)),
])
def test_parse_grid(text, grid):
    assert pipeline.parse_grid(text) == grid


@pytest.mark.parametrize("text", ["", "1:2", "a,b", "10:1:1", "1:10:0", "1:10:*1"])
def test_parse_grid_errors(text):
    with pytest.raises(Exception):
        pipeline.parse_grid(text)


def test_config_defaults():
    cfg = pipeline.ExperimentConfig.from_text("")
    assert cfg.workload.family == UniformK(1000)
    assert cfg.workload.trials_min == 30 and cfg.workload.trials_max == 500
    assert cfg.terms == FULL and cfg.reference is None
    assert cfg.policy.alpha == 0.05


def test_config_tied_n_and_reference():
    cfg = pipeline.ExperimentConfig.from_text("[experiment]\nfamily = tied\nt_d = n\n[reference]\nK = 16\n")
    assert cfg.workload.family.t_d is None
    assert cfg.reference == UniformK(16)


def test_end_to_end_nlogn_distinct_keys(tmp_path):
    cfg = pipeline.ExperimentConfig.from_text(f"""
[experiment]
K = 2^30
grid = 8192:131072:8192
trials_min = 10
seed = 0
[output]
dir = {tmp_path}
""")
    result = pipeline.end_to_end(cfg)
    assert result.verdict.label is Label.NLOGN
