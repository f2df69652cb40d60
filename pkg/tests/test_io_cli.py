import csv
import json

import pytest

from meshsocial.cli import main
from meshsocial.io import (
    ATTACK_SCHEMA,
    CENTRALITY_SCHEMA,
    RunManifest,
    format_value,
    load_config,
    render_csv,
    write_csv,
)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def p3_file(tmp_path):
    p = tmp_path / "p3.txt"
    p.write_text("# path\na b\nb c\n", encoding="utf-8")
    return p


@pytest.fixture
def star5_file(tmp_path):
    p = tmp_path / "star.txt"
    p.write_text("".join(f"hub leaf{k}\n" for k in range(5)), encoding="utf-8")
    return p


class TestCsv:
    def test_empty_is_header_only(self, tmp_path):
        path = write_csv([], CENTRALITY_SCHEMA, tmp_path / "x.csv")
        assert path.read_bytes() == b"node_label,metric,value\r\n"

    def test_rows_sorted_on_keys(self):
        rows = [
            {"node_label": "b", "metric": "degree", "value": 1.0},
            {"node_label": "a", "metric": "degree", "value": 0.5},
            {"node_label": "a", "metric": "closeness", "value": 0.25},
        ]
        lines = render_csv(rows, CENTRALITY_SCHEMA).split("\r\n")
        assert lines[1:4] == ["a,closeness,0.250000", "a,degree,0.500000", "b,degree,1.000000"]

    def test_float_rounding(self):
        assert format_value(0.5555555) == "0.555556"
        assert format_value(None) == ""
        assert format_value(3) == "3"

    def test_quoting(self):
        text = render_csv([{"node_label": "x,y", "metric": "degree", "value": 1.0}], CENTRALITY_SCHEMA)
        assert '"x,y"' in text

    def test_missing_column(self):
        with pytest.raises(ValueError):
            render_csv([{"node_label": "a"}], CENTRALITY_SCHEMA)


class TestManifest:
    def test_round_trip(self):
        m = RunManifest("attack", {"trials": 3, "metrics": "degree"}, 7, "out", "0.1.0", {"t": "ab"})
        assert RunManifest.from_json(m.to_json()) == m

    def test_unknown_command(self):
        with pytest.raises(ValueError):
            RunManifest("plot", {}, 0, "out", "0")

    def test_plain_config(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{"trials": 2}')
        assert load_config(p) == (None, {"trials": 2})


class TestCli:
    def test_centrality_all_metrics(self, p3_file, tmp_path):
        out = tmp_path / "o"
        assert main(["centrality", "--topo", str(p3_file), "--out", str(out), "--quiet"]) == 0
        rows = read_rows(out / "centrality.csv")
        assert len(rows) == 12
        by = {(r["node_label"], r["metric"]): r["value"] for r in rows}
        assert by[("b", "degree")] == "1.000000"
        assert by[("a", "closeness")] == "0.666667"
        assert by[("b", "betweenness")] == "1.000000"
        assert (out / "manifest.json").exists()

    def test_gen_topo_deterministic(self, tmp_path):
        for d in ("a", "b"):
            assert main(["gen-topo", "--n", "30", "--seed", "4", "--out", str(tmp_path / d), "--quiet"]) == 0
        assert (tmp_path / "a" / "topology.txt").read_bytes() == (tmp_path / "b" / "topology.txt").read_bytes()

    def test_attack_on_star(self, star5_file, tmp_path):
        out = tmp_path / "o"
        args = ["attack", "--topo", str(star5_file), "--metrics", "degree", "--removals", "1"]
        assert main(args + ["--out", str(out), "--quiet"]) == 0
        rows = {(r["metric"], r["removed"]): r for r in read_rows(out / "attack.csv")}
        assert rows[("degree", "0")]["connected_pairs"] == "15"
        assert rows[("degree", "1")]["connected_pairs"] == "0"
        assert rows[("degree", "1")]["avg_hops"] == ""
        assert list(read_rows(out / "attack.csv")[0]) == list(ATTACK_SCHEMA.columns)

    def test_manifest_replay_is_byte_identical(self, p3_file, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["attack", "--topo", str(p3_file), "--trials", "4", "--seed", "9", "--removals", "2"]
        assert main(args + ["--out", str(a), "--quiet"]) == 0
        assert main(["--config", str(a / "manifest.json"), "--out", str(b), "--quiet"]) == 0
        assert (a / "attack.csv").read_bytes() == (b / "attack.csv").read_bytes()
        ma = json.loads((a / "manifest.json").read_text())
        mb = json.loads((b / "manifest.json").read_text())
        assert ma["config"] == mb["config"] and ma["inputs"] == mb["inputs"]

    def test_flag_overrides_config(self, p3_file, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"topo": str(p3_file), "metrics": "degree"}))
        out = tmp_path / "o"
        assert main(["centrality", "--config", str(cfg), "--metrics", "closeness", "--out", str(out), "--quiet"]) == 0
        assert {r["metric"] for r in read_rows(out / "centrality.csv")} == {"closeness"}

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"bogus": 1}')
        assert main(["centrality", "--config", str(cfg)]) == 2

    def test_env_output_dir(self, p3_file, tmp_path, monkeypatch):
        monkeypatch.setenv("MESHSOCIAL_OUTPUT_DIR", str(tmp_path / "env"))
        assert main(["centrality", "--topo", str(p3_file), "--quiet"]) == 0
        assert (tmp_path / "env" / "centrality.csv").exists()

    def test_quiet_silences_progress(self, p3_file, tmp_path, capsys):
        main(["centrality", "--topo", str(p3_file), "--out", str(tmp_path / "o"), "--quiet"])
        assert capsys.readouterr().err == ""

    def test_stdma_and_sweep(self, p3_file, tmp_path):
        out = tmp_path / "o"
        assert main(["stdma", "--topo", str(p3_file), "--duration", "1", "--out", str(out), "--quiet"]) == 0
        assert len(read_rows(out / "stdma.csv")) == 1
        args = ["sweep", "--nodes", "8", "--degree", "3", "--rates", "100:200:100", "--seeds", "2", "--duration", "0.5"]
        assert main(args + ["--out", str(out), "--quiet"]) == 0
        assert [(r["mode"], r["rate"]) for r in read_rows(out / "sweep.csv")] == [
            ("random", "100.000000"), ("random", "200.000000"), ("social", "100.000000"), ("social", "200.000000")
        ]

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["explode"],
            ["centrality", "--bogus"],
            ["centrality", "--topo", "/nonexistent/file.txt"],
            ["centrality"],
            ["attack", "--topo", "/nonexistent"],
        ],
    )
    def test_bad_invocations(self, argv, tmp_path, capsys):
        assert main(argv + ["--out", str(tmp_path / "o")] if argv else argv) != 0

    def test_malformed_topology(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("a b c\n")
        assert main(["centrality", "--topo", str(p), "--out", str(tmp_path / "o")]) == 2
