import pytest

from pinwheel.pipeline import Pipeline, RunConfig

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE[n] = (bool(ok), detail)
    return ok


@pytest.fixture(scope="session")
def pipe():
    """Everything computed from scratch once per session, without the disk cache."""
    return Pipeline(config=RunConfig(cache_dir=None, use_cache=False))


@pytest.fixture(scope="session")
def rule(pipe):
    return pipe.rule


@pytest.fixture(scope="session")
def enum(pipe):
    return pipe.enumeration


@pytest.fixture(scope="session")
def A(pipe):
    return pipe.matrix


@pytest.fixture(scope="session")
def pd(pipe):
    return pipe.perron


@pytest.fixture(scope="session")
def adjacency(pipe):
    return pipe.adjacency


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def b0(pipe):
    return pipe.complex(0, "simplicial")


@pytest.fixture(scope="session")
def b1(pipe):
    return pipe.complex(1, "simplicial")


@pytest.fixture(scope="session")
def k0(pipe):
    return pipe.complex(0, "polygonal")


@pytest.fixture(scope="session")
def k1(pipe):
    return pipe.complex(1, "polygonal")
