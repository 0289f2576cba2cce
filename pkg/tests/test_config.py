from pathlib import Path

import pytest

from aperiodica.config import RunConfig
from aperiodica.errors import ConfigValidationError
from aperiodica.geometry import Region
from aperiodica.hullbuilder import TowerBudget
from aperiodica.pointsets import build_source
from aperiodica.scalar import PHI, SQRT5, QuadNum


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch):
    for name in ("SOURCE", "MAX_I", "SEED", "RHO", "FAMILY"):
        monkeypatch.delenv(f"APERIODICA_{name}", raising=False)


def test_defaults():
    cfg = RunConfig()
    assert cfg.source == "latticeZ"
    assert cfg.family == "centered"
    assert cfg.max_i == 20
    assert cfg.eps == [QuadNum(1)]
    assert cfg.rho == "auto"
    assert cfg.workers == 1
    assert cfg.tower == TowerBudget()


def test_literal_fields():
    cfg = RunConfig(regions=["[0,1]u[3,4]"], window="[0,100]", c_values=["1", "phi"], ell="1/2")
    assert cfg.regions[0].measure() == 2
    assert cfg.window == Region.interval(0, 100)
    assert cfg.c_values == [QuadNum(1), PHI]
    assert cfg.ell == QuadNum(1) / 2


def test_validation():
    for bad in ({"family": "square"}, {"rho": "-1"}, {"rho": "abc"}, {"workers": 0}, {"max_i": 0}):
        with pytest.raises(ConfigValidationError):
            RunConfig(**bad)
    with pytest.raises(ConfigValidationError):
        RunConfig(regions=["[0,2]u[1,3]"])


def test_environment(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("APERIODICA_SOURCE", "fib")
    monkeypatch.setenv("APERIODICA_MAX_I", "5")
    cfg = RunConfig()
    assert cfg.source == "fib"
    assert cfg.max_i == 5
    assert RunConfig(source="exampleL").source == "exampleL"


def test_config_hash():
    base = RunConfig(source="fib", seed=3)
    assert base.config_hash() == RunConfig(source="fib", seed=3).config_hash()
    assert base.config_hash() == RunConfig(source="fib", seed=3, output=Path("out.csv")).config_hash()
    assert base.config_hash() != RunConfig(source="fib", seed=4).config_hash()
    assert len(base.config_hash()) == 64


def test_family_regions():
    assert RunConfig(max_i=3).family_regions()[-1] == Region.interval(-3, 3)
    assert len(RunConfig(family="Qi", max_i=4).family_regions()) == 4


def test_resolve_rho():
    assert RunConfig(rho="1/2").resolve_rho(build_source("latticeZ")) == QuadNum(1) / 2
    assert RunConfig().resolve_rho(build_source("fib")) == PHI / SQRT5
    estimate = RunConfig(family="fibonacci", max_i=16).resolve_rho(build_source("sub"))
    assert isinstance(estimate, float)
    assert estimate == pytest.approx(float(PHI / SQRT5), abs=1e-2)
