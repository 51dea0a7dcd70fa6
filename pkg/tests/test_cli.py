import csv
import json
from pathlib import Path

import pytest

from sepcont.cantor import CantorPoint, ClopenSet
from sepcont.cli import main
from sepcont.config import load_experiment, parse_function, parse_probe
from sepcont.errors import ConfigError
from sepcont.functions import PointwiseProduct
from sepcont.groups import get_group

CONFIGS = Path(__file__).parent.parent / "configs"
DYADIC = get_group("dyadic")


def write_config(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


MINIMAL = """
[experiment]
group = dyadic
function = const 1(0)
grid_depth = 2
n_max = 2
levels = 1
[probes]
p0 = (0) ; !{}
"""


class TestConfigParsing:
    def test_minimal_loads(self, tmp_path):
        exp = load_experiment(write_config(tmp_path, MINIMAL))
        assert exp.group is DYADIC
        assert exp.grid_depth == 2 and exp.n_max == 2
        assert len(exp.probes) == 1

    def test_function_grammar(self, tmp_path):
        for text in [
            "const 1(0)",
            "diag ones 1(0),01(0)",
            "diag ones-finite 1(0)",
            "diag cyl 0:1(0),10:01(0)",
            "prod(const 1(0), diag ones 1(0))",
            "inv(diag ones 1(0))",
            "quant(diag ones 1(0), 1)",
        ]:
            f = parse_function(text, DYADIC, tmp_path)
            assert f.group is DYADIC

    def test_nested_prod(self, tmp_path):
        f = parse_function("prod(prod(const 1(0), const 1(0)), inv(const 01(0)))", DYADIC, tmp_path)
        assert isinstance(f, PointwiseProduct)

    def test_probe_parsing(self):
        p = parse_probe("p", "(1) ; !{}")
        assert isinstance(p.kx, CantorPoint) and isinstance(p.ky, ClopenSet)
        q = parse_probe("q", "{0,10} ; 110(0)")
        assert isinstance(q.kx, ClopenSet) and isinstance(q.ky, CantorPoint)

    def test_bad_probe_rejected(self):
        with pytest.raises(ConfigError):
            parse_probe("p", "!{} ; !{}")  # no singleton side

    def test_missing_section(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write_config(tmp_path, "[probes]\np = (0) ; !{}\n"))

    def test_depth_and_nmax_limits(self, tmp_path):
        bad = MINIMAL.replace("n_max = 2", "n_max = 99")
        with pytest.raises(ConfigError):
            load_experiment(write_config(tmp_path, bad))
        bad2 = MINIMAL.replace("grid_depth = 2", "grid_depth = 40")
        with pytest.raises(ConfigError):
            load_experiment(write_config(tmp_path, bad2))

    def test_probe_deeper_than_grid_rejected(self, tmp_path):
        bad = MINIMAL.replace("p0 = (0) ; !{}", "p0 = (0) ; {0101}")
        with pytest.raises(ConfigError):
            load_experiment(write_config(tmp_path, bad))

    def test_random_probes_deterministic_per_seed(self, tmp_path):
        text = MINIMAL + "random = 3\n"
        a = load_experiment(write_config(tmp_path, text), seed=7)
        b = load_experiment(write_config(tmp_path, text), seed=7)
        c = load_experiment(write_config(tmp_path, text), seed=8)
        sig = lambda exp: [(str(p.kx), str(p.ky)) for p in exp.probes]
        assert sig(a) == sig(b)
        assert sig(a) != sig(c)

    def test_table_function_from_csv(self, tmp_path):
        (tmp_path / "t.csv").write_text("(0),1(0)\n1(0),(0)\n", encoding="utf-8")
        f = parse_function("table 1 t.csv", DYADIC, tmp_path)
        assert f.depth == 1


class TestExitCodes:
    def test_minimal_zerodim_exit_zero(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL)
        out = tmp_path / "rep"
        assert main(["approx-zerodim", "--config", str(cfg), "--out", str(out)]) == 0
        rows = list(csv.DictReader(open(out / "zerodim.csv")))
        assert all(r["cond2_sup"] == "0/2^0" for r in rows[1:])
        assert all(r["pass"] == "1" for r in rows)

    def test_parse_error_exit_two(self, tmp_path):
        bad = write_config(tmp_path, "not a config at all [")
        assert main(["nets", "--config", str(bad)]) == 2

    def test_missing_file_exit_two(self, tmp_path):
        assert main(["nets", "--config", str(tmp_path / "absent.cfg")]) == 2

    def test_fault_injection_exit_one(self, tmp_path):
        out = tmp_path / "rep"
        code = main(
            ["closure-probe", "--config", str(CONFIGS / "closure-fault.cfg"), "--out", str(out)]
        )
        assert code == 1
        rows = list(csv.DictReader(open(out / "closure.csv")))
        assert rows[3]["within"] == "0"
        assert all(r["within"] == "1" for i, r in enumerate(rows) if i != 3)

    def test_problem3_fail_exit_one(self, tmp_path):
        out = tmp_path / "rep"
        code = main(
            ["problem3", "--config", str(CONFIGS / "problem3-fail.cfg"), "--out", str(out)]
        )
        assert code == 1
        payload = json.load(open(out / "problem3.json"))
        assert payload["within"] is False and payload["witness_x"]

    def test_bad_ball_side_exit_two(self, tmp_path):
        text = MINIMAL + "[ball]\nb = side=zz; eps=1/2^1; candidate=const 1(0)\n"
        cfg = write_config(tmp_path, text)
        assert main(["ball", "--config", str(cfg), "--out", str(tmp_path / "rep")]) == 2

    def test_fault_stage_out_of_range_exit_two(self, tmp_path):
        text = MINIMAL + "[closure]\ninject_fault_at = 99\n"
        cfg = write_config(tmp_path, text)
        assert main(["closure-probe", "--config", str(cfg), "--out", str(tmp_path / "rep")]) == 2

    def test_depth_cap_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SEPCONT_MAX_DEPTH", "4")
        cfg = write_config(tmp_path, MINIMAL.replace("grid_depth = 2", "grid_depth = 6"))
        assert main(["nets", "--config", str(cfg), "--out", str(tmp_path / "rep")]) == 2
        monkeypatch.setenv("SEPCONT_MAX_DEPTH", "8")
        assert main(["nets", "--config", str(cfg), "--out", str(tmp_path / "rep")]) == 0


class TestReports:
    def test_header_only_certificate_csv(self, tmp_path):
        text = MINIMAL.replace("p0 = (0) ; !{}\n", "")
        cfg = write_config(tmp_path, text)
        out = tmp_path / "rep"
        assert main(["approx-discrete", "--config", str(cfg), "--out", str(out)]) == 0
        content = (out / "certificate.csv").read_text()
        assert content == "n,probe_id,in_nbhd,violation_witness\n"

    def test_zerodim_schema(self, tmp_path):
        out = tmp_path / "rep"
        main(["approx-zerodim", "--config", str(CONFIGS / "diag-dyadic.cfg"), "--out", str(out)])
        with open(out / "zerodim.csv") as fh:
            header = fh.readline().strip()
        assert header == "level,cond1,cond2_sup,cond3,diag_dist_sup,budget,pass"
        rows = list(csv.DictReader(open(out / "zerodim.csv")))
        assert len(rows) == 4  # levels 0..3

    def test_certificate_schema(self, tmp_path):
        out = tmp_path / "rep"
        main(["approx-discrete", "--config", str(CONFIGS / "diag-dyadic.cfg"), "--out", str(out)])
        with open(out / "certificate.csv") as fh:
            header = fh.readline().strip()
        assert header == "n,probe_id,in_nbhd,violation_witness"

    def test_ball_jsonl_one_record_per_probe(self, tmp_path):
        out = tmp_path / "rep"
        assert main(["ball", "--config", str(CONFIGS / "ball-suite.cfg"), "--out", str(out)]) == 0
        lines = (out / "ball.jsonl").read_text().splitlines()
        assert len(lines) == 7
        rec = json.loads(lines[0])
        assert set(rec) == {
            "probe_id", "side", "eps_num", "eps_log2_den", "member", "witness_x", "witness_y",
        }

    def test_nets_report(self, tmp_path):
        out = tmp_path / "rep"
        assert main(["nets", "--config", str(CONFIGS / "diag-dyadic.cfg"), "--out", str(out)]) == 0
        rows = list(csv.DictReader(open(out / "nets.csv")))
        assert [r["k"] for r in rows] == ["0", "1", "2", "3"]
        assert all(r["ball_ok"] == r["separation_ok"] == r["maximality_ok"] == "1" for r in rows)
        assert rows[1]["size"] == "8"

    def test_manifest_lists_report_checksums(self, tmp_path):
        out = tmp_path / "rep"
        main(["approx-zerodim", "--config", str(CONFIGS / "diag-dyadic.cfg"), "--out", str(out)])
        manifest = json.load(open(out / "manifest.json"))
        assert "zerodim.csv" in manifest["reports"]
        assert manifest["summary"]["passed"] is True
        assert "net" in manifest["net_indexing_note"]

    def test_quantizer_table_rows(self, tmp_path):
        out = tmp_path / "rep"
        assert (
            main(["approx-zerodim", "--config", str(CONFIGS / "diag-multi.cfg"), "--out", str(out)])
            == 0
        )
        rows = list(csv.DictReader(open(out / "zerodim.csv")))
        assert len(rows) == 7
        assert all(r["cond1"] == "1" and r["cond3"] == "1" for r in rows)


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert (
                main(
                    ["approx-zerodim", "--config", str(CONFIGS / "diag-dyadic.cfg"), "--out", str(out)]
                )
                == 0
            )
            outs.append((out / "zerodim.csv").read_bytes())
        assert outs[0] == outs[1]
