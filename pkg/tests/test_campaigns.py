import json

import numpy as np
import pandas as pd
import pytest

from campaigns import resolve_unit
from campaigns.schemas import DOCUMENT_MODELS
from core.abstract import CampaignSpecError
from core.constants import HISTORY_FILE_NAME, QUOTED_MULTIPLIER_DEPTH, SCHEMA_VERSION
from core.utils import Printter
from main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main


@pytest.fixture
def run(tmp_path):
    def _run(*args: str) -> int:
        return main([*args, "--settings", str(tmp_path / "settings.toml"), "--out", str(tmp_path)])

    return _run


def document(out_dir, kind: str) -> dict:
    paths = sorted(out_dir.glob(f"{kind}_*.json"))
    assert paths, f"no {kind} report in {out_dir}"
    raw = json.loads(paths[-1].read_text())
    DOCUMENT_MODELS[kind].model_validate(raw)
    return raw


def messages(doc: dict) -> list[str]:
    return [m["message"] for m in doc["messages"]]


class TestParser:
    def test_flags_before_and_after_the_subcommand(self):
        parser = build_parser()
        args = parser.parse_args(["--seed", "3", "scan", "--beta", "0.5"])
        assert (args.command, args.seed, args.beta) == ("scan", 3, 0.5)

    def test_unknown_flag(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["verify-mul", "--nope"])


class TestArtifacts:
    def test_export_netlist(self, run, tmp_path):
        assert run("export-netlist", "mux") == EXIT_OK
        netlist = json.loads((tmp_path / "MUX2.netlist.json").read_text())
        assert len(netlist["neurons"]) == 4
        assert "<graphml" in (tmp_path / "MUX2.graphml").read_text()
        doc = document(tmp_path, "export-netlist")
        assert doc["engine"] == "none"
        assert doc["resources"]["neurons"] == 4

    def test_unknown_unit(self, run):
        assert run("export-netlist", "nand3") == EXIT_USAGE
        with pytest.raises(CampaignSpecError):
            resolve_unit("nand3")

    @pytest.mark.parametrize("unit, neurons", [("fa", 9), ("XOR", 4), ("activation", 8)])
    def test_resolve_unit(self, unit, neurons):
        assert len(resolve_unit(unit).neurons) == neurons

    def test_code_table(self, run, tmp_path):
        assert run("code-table") == EXIT_OK
        table = pd.read_csv(tmp_path / "fp8_e4m3_codes.csv")
        assert len(table) == 256
        assert table.loc[0x38, "value"] == 1.0

    def test_schemas(self, run, tmp_path):
        assert run("schemas") == EXIT_OK
        files = sorted((tmp_path / "schemas").glob("*.schema.json"))
        assert len(files) == len(set(DOCUMENT_MODELS.values()))
        assert all(f"v{SCHEMA_VERSION}" in f.name for f in files)


class TestReports:
    def test_history_keeps_every_run(self, run, tmp_path):
        run("code-table")
        run("code-table")
        history = json.loads((tmp_path / HISTORY_FILE_NAME).read_text())
        assert len(history) == 2
        assert all(entry["kind"] == "code-table" and entry["passed"] for entry in history.values())

    def test_corrupt_history_is_kept_aside(self, run, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(Printter, "quiet", False)
        (tmp_path / HISTORY_FILE_NAME).write_text("{not json")
        assert run("code-table") == EXIT_OK
        assert "Unreadable history" in capsys.readouterr().out
        assert (tmp_path / f"{HISTORY_FILE_NAME}.corrupt").read_text() == "{not json"
        history = json.loads((tmp_path / HISTORY_FILE_NAME).read_text())
        assert len(history) == 1

    def test_corrupt_history_is_no_proof(self, run, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(Printter, "quiet", False)
        (tmp_path / HISTORY_FILE_NAME).write_text("[1, 2]")
        assert run("linear-bench", "--fast-check", "--d-in", "4", "--audit-d-in") == EXIT_OK
        assert "Unreadable history" in capsys.readouterr().out
        doc = document(tmp_path, "linear-bench")
        assert any("without a recorded exhaustive verification" in m for m in messages(doc))

    def test_csv_format(self, run, tmp_path):
        args = ["--fast-check", "--d-in", "1", "4", "--audit-d-in", "8", "--format", "csv"]
        assert run("linear-bench", *args) == EXIT_OK
        names = {p.name.split(".", 1)[1] for p in tmp_path.glob("linear-bench_*.csv")}
        assert {"messages.csv", "latency.csv", "audit.csv"} <= names

    def test_xlsx_format(self, run, tmp_path):
        assert run("code-table", "--format", "xlsx") == EXIT_OK
        workbook = next(tmp_path.glob("code-table_*.xlsx"))
        sheets = pd.read_excel(workbook, sheet_name=None)
        assert {"Report", "Stats"} <= set(sheets)

    def test_config_echo(self, run, tmp_path):
        run("code-table", "--seed", "77", "--saturate", "off")
        config = document(tmp_path, "code-table")["config"]
        assert (config["seed"], config["saturate"], config["fast_check"]) == (77, False, False)


class TestVerify:
    def test_disabled_correction_fails_with_counterexamples(self, run, tmp_path):
        assert run("verify-mul", "--no-sticky-extra") == EXIT_FAILED
        doc = document(tmp_path, "verify-mul")
        assert not doc["passed"]
        assert doc["failures"]
        assert doc["classes"][-1]["row"] == "Total"
        assert doc["classes"][-1]["total"] == 254 * 254
        assert doc["stats"]["mismatches"] > 0
        failed = {c["name"] for c in doc["criteria"] if not c["passed"]}
        assert "bit-exact" in failed
        # the depth is reported against the quoted bound, not gated on it
        assert doc["resources"]["quoted_depth"] == QUOTED_MULTIPLIER_DEPTH
        assert doc["resources"]["depth"] > QUOTED_MULTIPLIER_DEPTH
        assert any("above the quoted" in m for m in messages(doc))


class TestLinearBench:
    def test_fast_check_without_proof_warns(self, run, tmp_path):
        args = ["--fast-check", "--d-in", "1", "16", "256", "--audit-d-in", "16"]
        assert run("linear-bench", *args) == EXIT_OK
        doc = document(tmp_path, "linear-bench")
        assert doc["engine"] == "fast-check"
        assert any("without a recorded exhaustive verification" in m for m in messages(doc))
        assert all(c["passed"] for c in doc["criteria"])
        row = next(r for r in doc["rows"] if r["d_in"] == 256)
        assert (row["unit_tree"], row["unit_sequential"]) == (9, 256)
        assert row["circuit_speedup"] >= 17

    def test_fast_check_with_proof(self, run, tmp_path):
        history = {
            "verify-mul_1": {"kind": "verify-mul", "passed": True, "saturate": True},
            "verify-add_1": {"kind": "verify-add", "passed": True, "saturate": True},
        }
        (tmp_path / HISTORY_FILE_NAME).write_text(json.dumps(history))
        assert run("linear-bench", "--fast-check", "--d-in", "4", "--audit-d-in") == EXIT_OK
        doc = document(tmp_path, "linear-bench")
        assert not any("without a recorded exhaustive verification" in m for m in messages(doc))
        assert doc["audits"] == []

    def test_spiking_audit(self, run, tmp_path):
        assert run("linear-bench", "--d-in", "2", "--audit-d-in", "4") == EXIT_OK
        doc = document(tmp_path, "linear-bench")
        assert doc["engine"] == "spiking"
        assert doc["audits"][0]["d_in"] == 4


class TestMlpDemo:
    def test_synthetic_samples(self, run, tmp_path):
        assert run("mlp-demo", "--samples", "16", "--fast-check") == EXIT_OK
        doc = document(tmp_path, "mlp-demo")
        assert doc["data_source"] == "synthetic"
        assert doc["samples"] == 16
        assert doc["argmax_agreement"] == 1.0
        assert doc["layer_shapes"] == [[16, 8], [8, 4]]

    def test_missing_images_fall_back(self, run, tmp_path):
        assert run("mlp-demo", "--samples", "4", "--images", str(tmp_path / "nope.idx")) == EXIT_OK
        doc = document(tmp_path, "mlp-demo")
        assert doc["data_source"] == "synthetic"
        assert any("synthetic samples used" in m for m in messages(doc))

    def test_idx_images(self, run, tmp_path):
        images = np.random.default_rng(0).integers(0, 256, size=(5, 8, 8), dtype=np.uint8)
        path = tmp_path / "images.idx"
        path.write_bytes(
            bytes([0, 0, 0x08, 3]) + np.array(images.shape, dtype=">u4").tobytes() + images.tobytes()
        )
        assert run("mlp-demo", "--images", str(path), "--fast-check") == EXIT_OK
        doc = document(tmp_path, "mlp-demo")
        assert (doc["data_source"], doc["samples"]) == ("idx", 5)

    def test_bad_weights(self, run, tmp_path):
        weights = tmp_path / "weights.json"
        weights.write_text(json.dumps({"layers": [{"shape": [2, 3], "codes": [0, 1]}]}))
        assert run("mlp-demo", "--weights", str(weights)) == EXIT_USAGE


class TestScan:
    def test_small_scan(self, run, tmp_path):
        spec = tmp_path / "scan.json"
        spec.write_text(
            json.dumps(
                {
                    "name": "small",
                    "targets": ["AND", "XOR", "temporal-reference"],
                    "beta_grid": [1.0, 0.5],
                    "sigma_grid": [0.0, 0.15],
                    "trials": 50,
                    "seed": 1,
                }
            )
        )
        assert run("scan", str(spec)) == EXIT_OK
        doc = document(tmp_path, "scan")
        assert doc["name"] == "small"
        assert len(doc["points"]) == 12
        assert doc["first_failure_sigma"]["XOR"] is None
        assert doc["noise_clip"] == 3.0
        assert doc["clip_floor_sigma"] == pytest.approx(0.5 / 3)
        assert any("set by the noise clip" in m for m in messages(doc))
        assert set(doc["series"]) == {"beta", "sigma"}

    def test_only_sigma(self, run, tmp_path):
        spec = tmp_path / "scan.toml"
        spec.write_text('targets = ["OR"]\nsigma_grid = [0.1]\ntrials = 20\n')
        assert run("scan", str(spec), "--kinds", "sigma") == EXIT_OK
        assert set(document(tmp_path, "scan")["series"]) == {"sigma"}

    def test_invalid_spec(self, run, tmp_path):
        spec = tmp_path / "scan.json"
        spec.write_text(json.dumps({"targets": []}))
        assert run("scan", str(spec)) == EXIT_USAGE

    def test_missing_spec(self, run, tmp_path):
        assert run("scan", str(tmp_path / "missing.json")) == EXIT_USAGE
