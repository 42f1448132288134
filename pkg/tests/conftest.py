import numpy as np
import pytest

from eyefresh import synthetic

ACCEPTANCE_RESULTS: list[tuple[str, bool | None, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def synthetic_root(tmp_path_factory):
    """Small three-class dataset of generated eye images, 4 per class."""
    return synthetic.write_dataset(tmp_path_factory.mktemp("synth") / "data", n_per_class=4, size=64, seed=3)


@pytest.fixture
def record_criterion():
    def record(name: str, ok: bool | None, detail: str = ""):
        ACCEPTANCE_RESULTS.append((name, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}")
