import numpy as np
import pytest

from clusterpredict.corpus_io import Label, LabeledDocument

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): exit criterion of the build")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        _acceptance.append((marker[0], marker[1], report.outcome, report.duration))


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        item.user_properties.append(("acceptance", marker.args))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, outcome, duration in sorted(_acceptance, key=lambda r: r[0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {text} ({duration:.1f}s)")


def docs_from(pairs):
    return [LabeledDocument(i, text, Label(label)) for i, (text, label) in enumerate(pairs)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_docs():
    return docs_from([
        ("great phone love the camera", 1),
        ("hate the battery it dies", 0),
        ("love love the screen", 1),
        ("battery dies again freak", 0),
        ("camera is great", 1),
        ("freak this phone hate it", 0),
    ])
