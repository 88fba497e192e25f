import pytest


@pytest.fixture(autouse=True)
def _cache_in_tmp(tmp_path, monkeypatch):
    # keep the default on-disk density cache out of the working tree
    monkeypatch.setenv("WEILFORMS_CACHE_DIR", str(tmp_path / "density-cache"))
