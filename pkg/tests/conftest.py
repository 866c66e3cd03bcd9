import json
from pathlib import Path
import pytest
from begfad.utils.settings import Settings

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the long statistical checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """
    Keeps a user settings file or seed override from leaking into the tests.
    """
    monkeypatch.setenv("BEGFAD_SETTINGS", str(tmp_path / "missing-settings.json"))
    monkeypatch.delenv("BEGFAD_SEED", raising=False)
    from begfad.io import FileManager
    FileManager.instance = None
    Settings.reload()
    yield
    FileManager.instance = None
    Settings.reload()


@pytest.fixture(scope="session")
def oracle_fixture():
    with open(FIXTURES / "oracle.json", "r") as file:
        return json.load(file)
