import pytest

from tigerhunt.cli import main
from tigerhunt.serializers import JsonSerializer


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")


@pytest.fixture
def run_cli(capsys):
    """Runs ``tigerhunt`` in process, returning the exit status and captured streams."""

    def run(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return run


@pytest.fixture
def run_json(run_cli):
    def run(*argv):
        code, out, err = run_cli(*argv, "--json")
        return code, JsonSerializer().loads(out)

    return run
