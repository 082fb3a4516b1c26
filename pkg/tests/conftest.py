import numpy as np
import pytest

# criterion label -> (outcome, measured detail) collected from tests marked `criterion`
_CRITERIA: dict[str, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion covered by the test")
    config.addinivalue_line("markers", "slow: long-running experiment reproduction")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    label = props.get("criterion")
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        prev = _CRITERIA.get(label)
        # a criterion split over several tests passes only if every part does
        if prev is None or prev[0] == "PASS" or (prev[0] == "SKIP" and outcome == "FAIL"):
            _CRITERIA[label] = [outcome, props.get("measured", "")]
        elif props.get("measured"):
            prev[1] = "; ".join(filter(None, [prev[1], props["measured"]]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0][2:])):
        outcome, measured = _CRITERIA[label]
        line = f"{outcome} {label}"
        if measured:
            line += f"  [{measured}]"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_square():
    return np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
