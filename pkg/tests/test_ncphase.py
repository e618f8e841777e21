import pytest
from tests.conftest import *

import ncphase
from ncphase.errors import ValidationError


def test_testing():
    assert ncphase.is_testing()
    assert len(ncphase.config_paths()) == 1


def test_load_config():
    config = ncphase.get_config("nc")
    assert config["eta"] == 2.0
    assert config["theta"] == 0.0
    assert ncphase.get_config("wigner") == {"a": 3.0}
    assert ncphase.get_config("bogus") == {}


def test_environment_config(monkeypatch):
    '''Test that environment variables override the package configuration.'''
    monkeypatch.setenv("NCPHASE_NC_ETA", "0.5")
    monkeypatch.setenv("NCPHASE_NC_LABEL", "test")
    monkeypatch.setenv("NCPHASE_SERIES_MAX_TERMS", "100")
    config = ncphase.get_config("nc")
    assert config["eta"] == 0.5
    assert config["label"] == "test"
    assert ncphase.get_config("series")["max_terms"] == 100


def test_max_workers(monkeypatch):
    monkeypatch.setattr(ncphase, "_max_workers", None)
    monkeypatch.delenv("NCPHASE_JOBS", raising=False)
    assert 1 <= ncphase.max_workers() <= ncphase.MAX_WORKERS
    assert ncphase.set_max_workers(1) == 1
    assert ncphase.set_max_workers(0) == 1
    assert ncphase.set_max_workers(64, force=True) == 64
    assert ncphase.max_workers() == 64


def test_max_workers_environment(monkeypatch):
    monkeypatch.setattr(ncphase, "_max_workers", None)
    monkeypatch.setenv("NCPHASE_JOBS", "1")
    assert ncphase.set_max_workers() == 1
    monkeypatch.setenv("NCPHASE_JOBS", "many")
    with pytest.raises(ValidationError):
        ncphase.set_max_workers()
