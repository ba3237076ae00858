"""End-to-end command-line behavior and exit codes."""

import json
from pathlib import Path

import numpy as np

from smurf.cli import main
from smurf.weightio import read_coefficients

FIXTURE = Path(__file__).parent / "data" / "reference_distance_table.json"


def run(*argv):
    return main(list(argv))


class TestSynthesizeCommand:
    def test_constant_expression_writes_constant_table(self, tmp_path, capsys):
        out = tmp_path / "c.json"
        code = run("synthesize", "--expr", "0.5", "--arity", "2",
                   "--n-states", "4", "--out", str(out))
        assert code == 0
        table = read_coefficients(out)
        assert np.abs(table.weights - 0.5).max() <= 1e-6
        assert len(table.weights) == 16
        assert "solver:" in capsys.readouterr().out

    def test_builtin_target(self, tmp_path):
        out = tmp_path / "t.json"
        assert run("synthesize", "--target", "tanh_act", "--n-states", "4",
                   "--out", str(out)) == 0
        table = read_coefficients(out)
        assert table.target_name == "tanh_act"
        assert table.input_maps[0].lo == -2.0

    def test_distance_table_matches_reference(self, tmp_path):
        out = tmp_path / "dist.json"
        assert run("synthesize", "--target", "euclidean2_scaled",
                   "--n-states", "4", "--out", str(out)) == 0
        written = read_coefficients(out)
        reference = read_coefficients(FIXTURE)
        assert np.abs(written.weights - reference.weights).max() <= 0.05

    def test_boxed_expression_synthesis(self, tmp_path):
        out = tmp_path / "t.json"
        assert run("synthesize", "--expr", "tanh(x1)", "--input-box=-2,2",
                   "--output-box", "auto", "--n-states", "4",
                   "--out", str(out)) == 0
        table = read_coefficients(out)
        assert table.expression == "tanh(x1)"
        assert table.input_maps[0].lo == -2.0
        assert abs(table.output_map.hi - 0.9640275800758169) <= 1e-6

    def test_unknown_target_is_config_error(self, tmp_path):
        assert run("synthesize", "--target", "nope",
                   "--out", str(tmp_path / "x.json")) == 2

    def test_missing_out_is_config_error(self):
        assert run("synthesize", "--target", "tanh_act") == 2

    def test_bad_n_states_rejected(self, tmp_path):
        assert run("synthesize", "--target", "tanh_act", "--n-states", "1",
                   "--out", str(tmp_path / "x.json")) == 2

    def test_oversized_table_rejected(self, tmp_path):
        assert run("synthesize", "--expr", "x1*x2*x3", "--n-states", "17",
                   "--out", str(tmp_path / "x.json")) == 2

    def test_nonpositive_arity_rejected(self, tmp_path):
        assert run("synthesize", "--expr", "0.5", "--arity", "0",
                   "--n-states", "4", "--out", str(tmp_path / "x.json")) == 2

    def test_unwritable_path_is_io_error(self, tmp_path):
        assert run("synthesize", "--expr", "0.5", "--arity", "1",
                   "--n-states", "2",
                   "--out", str(tmp_path / "missing_dir" / "x.json")) == 4

    def test_config_file_supplies_flags(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        out = tmp_path / "w.json"
        cfg.write_text(json.dumps({
            "target": "tanh_act", "n_states": 2, "out": str(out)}))
        assert run("synthesize", "--config", str(cfg)) == 0
        assert read_coefficients(out).n_states == 2

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        out = tmp_path / "w.json"
        cfg.write_text(json.dumps({
            "target": "tanh_act", "n_states": 2, "out": str(out)}))
        assert run("synthesize", "--config", str(cfg), "--n-states", "3") == 0
        assert read_coefficients(out).n_states == 3

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"target": "tanh_act", "bogus": 1}))
        assert run("synthesize", "--config", str(cfg),
                   "--out", str(tmp_path / "w.json")) == 2


class TestEvalCommand:
    def test_eval_reference_fixture(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = run("eval", "--coeffs", str(FIXTURE), "--lengths", "16,64",
                   "--eval-grid", "5", "--seed", "7", "--out", str(out))
        assert code == 0
        stdout = capsys.readouterr().out
        assert "L=16:" in stdout and "L=64:" in stdout
        assert out.exists()

    def test_eval_csv_deterministic_under_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert run("eval", "--coeffs", str(FIXTURE), "--lengths", "32",
                       "--eval-grid", "4", "--seed", "11", "--out", str(path)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_dimension_mismatch_is_config_error(self):
        assert run("eval", "--coeffs", str(FIXTURE), "--n-states", "5") == 2

    def test_file_seed_used_when_flag_absent(self, tmp_path):
        src = tmp_path / "seeded.json"
        assert run("synthesize", "--expr", "x1", "--n-states", "2",
                   "--seed", "4242", "--out", str(src)) == 0
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run("eval", "--coeffs", str(src), "--lengths", "32",
                   "--eval-grid", "4", "--out", str(a)) == 0
        assert run("eval", "--coeffs", str(src), "--lengths", "32",
                   "--eval-grid", "4", "--seed", "4242", "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_corrupt_file_is_io_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"format_version": 9}')
        assert run("eval", "--coeffs", str(bad)) == 4

    def test_missing_file_is_io_error(self, tmp_path):
        assert run("eval", "--coeffs", str(tmp_path / "absent.json")) == 4

    def test_missing_coeffs_flag(self):
        assert run("eval") == 2


class TestSweepCommand:
    def test_sweep_over_state_counts(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        script = tmp_path / "sweep.gp"
        code = run("sweep", "--expr", "0.5", "--arity", "2",
                   "--n-states", "2,3", "--lengths", "8,16",
                   "--eval-grid", "3", "--seed", "5",
                   "--out", str(out), "--plot-script", str(script))
        assert code == 0
        assert "N=2 L=8:" in capsys.readouterr().out
        assert out.exists() and script.exists()
        data = [l for l in out.read_text().splitlines()
                if l and not l.startswith(("#", "n_states"))]
        assert len(data) == 4

    def test_unsorted_lengths_rejected(self):
        assert run("sweep", "--expr", "0.5", "--arity", "1",
                   "--n-states", "2", "--lengths", "64,16") == 2

    def test_sweep_existing_coeffs(self, tmp_path, capsys):
        code = run("sweep", "--coeffs", str(FIXTURE), "--lengths", "8,32",
                   "--eval-grid", "3", "--seed", "5")
        assert code == 0
        assert "N=4" in capsys.readouterr().out


class TestSteadyCommand:
    def test_chain_vector_printed(self, capsys):
        assert run("steady", "--n-states", "4", "--px", "0.7") == 0
        out = capsys.readouterr().out
        assert "state 0: 0.0465517241" in out
        assert "state 3: 0.5913793103" in out

    def test_two_state_curves_linear(self, tmp_path):
        out = tmp_path / "curves.csv"
        assert run("steady", "--n-states", "2", "--curves", "--out", str(out)) == 0
        rows = [l.split(",") for l in out.read_text().splitlines()[1:]]
        for row in rows:
            px, p0, p1 = map(float, row)
            assert abs(p0 - (1 - px)) <= 1e-12
            assert abs(p1 - px) <= 1e-12

    def test_uniform_at_half(self, capsys):
        assert run("steady", "--n-states", "5", "--px", "0.5") == 0
        assert capsys.readouterr().out.count("0.2000000000") == 5

    def test_joint_distribution(self, capsys):
        assert run("steady", "--n-states", "4", "--pxs", "0.5,0.5") == 0
        out = capsys.readouterr().out
        assert out.count("0.0625000000") == 16

    def test_missing_arguments(self):
        assert run("steady", "--n-states", "4") == 2


class TestShowCommand:
    def test_pretty_print(self, capsys):
        assert run("show", "--coeffs", str(FIXTURE)) == 0
        out = capsys.readouterr().out
        assert "N=4  M=2" in out
        assert "0.984600" in out

    def test_missing_file(self, tmp_path):
        assert run("show", "--coeffs", str(tmp_path / "none.json")) == 4


class TestUsage:
    def test_no_command_exits_2(self):
        assert run() == 2

    def test_help_exits_0(self):
        assert run("--help") == 0
