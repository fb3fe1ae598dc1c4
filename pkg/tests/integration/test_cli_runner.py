"""
Integration tests for the suite runner and the command-line entry point.
Runs small configs end to end, including report files and exit codes.
"""

import json

import pandas as pd
import pytest

from resolvent_lab import main as cli_module
from resolvent_lab.api import run_experiment, write_report
from resolvent_lab.core.errors import ConfigurationError
from resolvent_lab.main import EXIT_CONFIG, EXIT_OK, EXIT_TIMEOUT, load_document, main
from resolvent_lab.schemas import experiment_adapter
from resolvent_lab.schemas.experiment import OutputSpec
from tests.conftest import CONFIG_DIR, load_config


def _write(path, document: dict):
    path.write_text(json.dumps(document))
    return path


@pytest.mark.integration
class TestRunner:
    """run_experiment and write_report."""

    @pytest.mark.asyncio
    async def test_free_lattice_passes(self):
        config = experiment_adapter.validate_python(load_config("lattice_free"))
        report = await run_experiment(config, threads=2)
        assert report.command == "lattice"
        assert not report.failures
        assert "lattice/free_energies" in [r.name for r in report.records]
        assert [row["sites"] for row in report.series["free_energies"]] == [1, 2]

    @pytest.mark.asyncio
    async def test_records_keep_suite_order(self):
        config = experiment_adapter.validate_python(load_config("lattice_free"))
        report = await run_experiment(config, threads=3)
        names = [r.name for r in report.records]
        assert names[:4] == ["lattice/free_energies", "lattice/ground_states", "lattice/scale_monotone", "lattice/superadditivity"]

    @pytest.mark.asyncio
    async def test_seed_argument_overrides_config(self):
        config = experiment_adapter.validate_python(
            {
                "command": "decompose",
                "seed": 1,
                "space": {"standard": 2},
                "regular": [[1, 0, 0, 0], [0, 1, 0, 0]],
                "trivial": [[1, 0, 0, 0]],
                "random_forms": 5,
                "max_random_dim": 4,
            }
        )
        report = await run_experiment(config, seed=9)
        assert report.seed == 9
        assert not report.failures

    @pytest.mark.asyncio
    async def test_randomized_suite_needs_seed(self):
        config = experiment_adapter.validate_python({"command": "relations", "instances": 1})
        with pytest.raises(ConfigurationError):
            await run_experiment(config)

    @pytest.mark.asyncio
    async def test_thread_count_must_be_positive(self):
        config = experiment_adapter.validate_python(load_config("lattice_free"))
        with pytest.raises(ConfigurationError):
            await run_experiment(config, threads=0)

    @pytest.mark.asyncio
    async def test_time_budget(self):
        config = experiment_adapter.validate_python(load_config("lattice_free"))
        with pytest.raises(TimeoutError):
            await run_experiment(config, threads=1, time_budget=1e-4)

    @pytest.mark.asyncio
    async def test_report_files(self, temp_out_dir):
        config = experiment_adapter.validate_python(load_config("lattice_free"))
        report = await run_experiment(config)
        written = write_report(report, temp_out_dir, OutputSpec(report="r.json", table="r.txt", series_dir="csv"))

        document = json.loads(written["report"].read_text())
        assert document["schema"] == 1
        assert document["command"] == "lattice"
        assert written["table"].read_text().startswith("lattice (schema 1")
        frame = pd.read_csv(temp_out_dir / "csv" / "free_energies.csv")
        assert list(frame["sites"]) == [1, 2]
        assert frame["energy"].tolist() == pytest.approx([1.0, 2.0])


@pytest.mark.integration
class TestCommandLine:
    """Exit codes and outputs of main()."""

    def test_successful_run(self, temp_out_dir, capsys):
        code = main(["lattice", "--config", str(CONFIG_DIR / "lattice_free.json"), "--out", str(temp_out_dir)])
        assert code == EXIT_OK
        assert (temp_out_dir / "report.json").exists()
        assert (temp_out_dir / "series" / "sandwich.csv").exists()
        assert "fail=0" in capsys.readouterr().out

    def test_odd_dimensional_form(self, temp_out_dir):
        code = main(["decompose", "--config", str(CONFIG_DIR / "malformed_odd_dim.json"), "--out", str(temp_out_dir)])
        assert code == EXIT_CONFIG
        assert not (temp_out_dir / "report.json").exists()

    def test_command_mismatch(self, temp_out_dir):
        code = main(["rep", "--config", str(CONFIG_DIR / "lattice_free.json"), "--out", str(temp_out_dir)])
        assert code == EXIT_CONFIG

    def test_unknown_key(self, temp_out_dir):
        path = _write(temp_out_dir / "bad.json", {"command": "lattice", "site": 2})
        assert main(["lattice", "--config", str(path), "--out", str(temp_out_dir)]) == EXIT_CONFIG

    def test_missing_seed(self, temp_out_dir):
        path = _write(temp_out_dir / "relations.json", {"command": "relations", "instances": 2})
        assert main(["relations", "--config", str(path), "--out", str(temp_out_dir)]) == EXIT_CONFIG

    def test_missing_file(self, temp_out_dir):
        assert main(["rep", "--config", str(temp_out_dir / "absent.json")]) == EXIT_CONFIG

    def test_invalid_json(self, temp_out_dir):
        path = temp_out_dir / "broken.json"
        path.write_text("{not json")
        assert main(["rep", "--config", str(path)]) == EXIT_CONFIG

    def test_load_document_fills_command(self, temp_out_dir):
        path = _write(temp_out_dir / "plain.json", {"sites": 2})
        assert load_document("lattice", path) == {"sites": 2, "command": "lattice"}
        assert load_document("rep", None) == {"command": "rep"}

    def test_time_budget_flag(self, temp_out_dir):
        args = ["lattice", "--config", str(CONFIG_DIR / "lattice_free.json"), "--out", str(temp_out_dir)]
        assert main([*args, "--time-budget", "1e-4", "--threads", "1"]) == EXIT_TIMEOUT
        assert not (temp_out_dir / "report.json").exists()

    def test_nonpositive_time_budget(self, temp_out_dir):
        args = ["lattice", "--config", str(CONFIG_DIR / "lattice_free.json"), "--out", str(temp_out_dir)]
        assert main([*args, "--time-budget", "0"]) == EXIT_CONFIG

    def test_timeout_exits_without_joining_workers(self, monkeypatch):
        exits = []

        def fake_exit(code):
            exits.append(code)
            raise SystemExit(code)

        monkeypatch.setattr(cli_module, "main", lambda: EXIT_TIMEOUT)
        monkeypatch.setattr(cli_module.os, "_exit", fake_exit)
        monkeypatch.setattr(cli_module.logging, "shutdown", lambda: None)
        with pytest.raises(SystemExit):
            cli_module.cli()
        assert exits == [EXIT_TIMEOUT]

    def test_other_codes_exit_normally(self, monkeypatch):
        monkeypatch.setattr(cli_module, "main", lambda: EXIT_CONFIG)
        monkeypatch.setattr(cli_module.os, "_exit", lambda code: pytest.fail("hard exit on a config error"))
        with pytest.raises(SystemExit) as exc:
            cli_module.cli()
        assert exc.value.code == EXIT_CONFIG
