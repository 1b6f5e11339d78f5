import pytest

from truncobs import FeatureModel

ACCEPTANCE_RESULTS = []


def reference_model(sigma1=1.0, sigma=0.0, M=1):
    """Negative class N(0, 1), positive class N(0.75, sigma1^2), identical features."""
    return FeatureModel.from_arrays([0.0] * M, [1.0] * M, [0.75] * M, [sigma1] * M, sigma)


@pytest.fixture
def model():
    return reference_model()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
