import json
import sys
import tempfile
from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest

# Add src to Python path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from resolvent_lab.core.config import Tolerances, settings
from resolvent_lab.models.symplectic import SymplecticSpace
from resolvent_lab.services import fockrep

CONFIG_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture
def plane() -> SymplecticSpace:
    """ℝ² with σ(e₁, e₂) = 1."""
    return SymplecticSpace.standard(1)


@pytest.fixture
def space4() -> SymplecticSpace:
    """Standard ℝ⁴, two modes."""
    return SymplecticSpace.standard(2)


@pytest.fixture
def rep32(plane):
    """One-mode Fock representation at 32 levels; yields (rep, q, p)."""
    rep = fockrep.build_rep(plane, cutoff=32)
    q, p = rep.basis
    return rep, q, p


@pytest.fixture
def tolerances() -> Tolerances:
    return Tolerances.from_settings()


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so randomized tests are reproducible."""
    return np.random.default_rng(20240601)


@pytest.fixture
def temp_out_dir() -> Generator[Path]:
    """Create a temporary directory for reports."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture(autouse=True)
def isolated_log_dir(monkeypatch, tmp_path):
    """Keep log files out of the working tree."""
    monkeypatch.setattr(settings, "LOG_DIR", str(tmp_path / "logs"))


def load_config(name: str) -> dict:
    """Load one of the shipped example configs."""
    return json.loads((CONFIG_DIR / f"{name}.json").read_text())
