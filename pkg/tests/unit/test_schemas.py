"""
Unit tests for configuration documents, report schemas and tolerance resolution.
"""

import json
import math

import pytest
from pydantic import ValidationError

from resolvent_lab.core.config import Settings, Tolerances
from resolvent_lab.models.algebra import ResolventPoly
from resolvent_lab.schemas import CheckRecord, PolySchema, Report, experiment_adapter, parse_config

from tests.conftest import load_config


@pytest.mark.unit
class TestExperimentConfig:
    """Validation of experiment documents."""

    def test_defaults_fill_in(self):
        config = experiment_adapter.validate_python({"command": "lattice"})
        assert config.sites == 3
        assert config.potential.kind == "bump"
        assert config.outputs.report == "report.json"

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "rep", "cutof": 64})

    def test_unknown_command_is_rejected(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "integrate"})

    def test_unknown_tolerance_key_is_rejected(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "rep", "tolerances": {"oracle": 1e-3}})

    def test_non_square_form_is_rejected(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "decompose", "space": {"dim": 2, "form": [[0, 1]]}})

    def test_nonpositive_mu_is_rejected(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "lattice", "mus": [1.0, 0.0]})

    def test_cutoff_pairs_must_increase(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "rep", "weyl_cutoffs": [128, 64]})

    def test_hs_cutoffs_must_be_halvable(self):
        with pytest.raises(ValidationError):
            experiment_adapter.validate_python({"command": "rep", "hs_cutoffs": [2, 8]})
        assert experiment_adapter.validate_python({"command": "rep", "hs_cutoffs": [4, 8]}).hs_cutoffs == [4, 8]

    def test_seed_requirements(self):
        assert experiment_adapter.validate_python({"command": "relations"}).needs_seed()
        assert not experiment_adapter.validate_python({"command": "rep"}).needs_seed()
        decompose = {"command": "decompose", "space": {"standard": 1}}
        assert not experiment_adapter.validate_python(decompose).needs_seed()
        assert experiment_adapter.validate_python({**decompose, "random_forms": 5}).needs_seed()

    def test_potential_discriminator(self):
        config = parse_config(json.dumps({"command": "lattice", "potential": {"kind": "hermite-gaussian", "order": 2}}))
        assert config.potential.build().params == {"order": 2, "scale": 1.0}

    @pytest.mark.parametrize(
        "name",
        ["relations", "rep", "laplace", "quasifree", "dirac", "cocycle", "lattice", "lattice_free", "decompose"],
    )
    def test_shipped_configs_validate(self, name):
        config = experiment_adapter.validate_python(load_config(name))
        assert config.command == name.split("_")[0]

    def test_malformed_example_builds_no_space(self):
        config = experiment_adapter.validate_python(load_config("malformed_odd_dim"))
        with pytest.raises(ValueError):
            config.space.build()


@pytest.mark.unit
class TestPolySchema:
    """JSON term trees."""

    def test_term_tree_layout(self, plane):
        poly = ResolventPoly.generator(complex(1.0, 0.5), plane.unit(0), coeff=2j)
        dumped = PolySchema.from_poly(poly).model_dump()
        assert dumped == {"terms": [{"coeff": [0.0, 2.0], "factors": [{"z": [1.0, 0.5], "f": [1.0, 0.0]}]}]}

    def test_tree_rebuilds_poly(self, plane):
        poly = ResolventPoly.generator(1.0, plane.unit(0)) * ResolventPoly.generator(-2.0, plane.unit(1)) + ResolventPoly.identity(3.0)
        rebuilt = PolySchema.model_validate_json(PolySchema.from_poly(poly).model_dump_json()).to_poly()
        assert rebuilt.structurally_equal(poly)

    def test_malformed_factor_is_rejected(self):
        with pytest.raises(ValidationError):
            PolySchema.model_validate({"terms": [{"coeff": [1.0, 0.0], "factors": [{"z": [1.0], "f": [1.0, 0.0]}]}]})


@pytest.mark.unit
class TestReport:
    """Versioned JSON report and text table."""

    def test_json_carries_schema_version(self):
        report = Report(command="rep", seed=3, records=[CheckRecord(name="rep/x", verdict="pass", values={"norm": 0.5})])
        document = json.loads(report.to_json())
        assert document["schema"] == 1
        assert document["records"][0]["values"] == {"norm": 0.5}

    def test_infinite_values_serialize(self):
        report = Report(command="cocycle", records=[CheckRecord(name="c", verdict="flagged", values={"norm": math.inf})])
        assert json.loads(report.to_json())["records"][0]["values"]["norm"] == "Infinity"

    def test_text_table_summary(self):
        report = Report(
            command="lattice",
            records=[
                CheckRecord(name="a", verdict="pass"),
                CheckRecord(name="b", verdict="fail", values={"energy": 1.25}),
                CheckRecord(name="c", verdict="pass"),
            ],
        )
        table = report.text_table()
        assert table.startswith("lattice (schema 1, seed None)")
        assert "pass=2, fail=1, inconclusive=0, flagged=0" in table
        assert "energy=1.250e+00" in table
        assert [r.name for r in report.failures] == ["b"]

    def test_empty_report_table(self):
        assert "(no records)" in Report(command="rep").text_table()


@pytest.mark.unit
class TestTolerances:
    """Settings defaults, per-run overrides and global scaling."""

    def test_environment_overrides_settings(self, monkeypatch):
        monkeypatch.setenv("ORACLE_TOL", "1e-4")
        assert Tolerances.from_settings(Settings()).oracle_tol == 1e-4

    def test_scaling_leaves_structural_tolerances(self, tolerances):
        scaled = tolerances.scaled(10.0)
        assert scaled.oracle_tol == pytest.approx(10.0 * tolerances.oracle_tol)
        assert scaled.rank_rtol == tolerances.rank_rtol
        assert scaled.merge_tol == tolerances.merge_tol

    def test_nonpositive_scale_is_rejected(self, tolerances):
        with pytest.raises(ValueError):
            tolerances.scaled(0.0)

    def test_overrides(self, tolerances):
        assert tolerances.with_overrides({"sparse_tol": 1e-6}).sparse_tol == 1e-6
        with pytest.raises(ValueError):
            tolerances.with_overrides({"sparse": 1e-6})
