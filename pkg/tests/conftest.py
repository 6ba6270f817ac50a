import numpy as np
import pytest

_results: dict[int, tuple[str, list[bool]]] = {}


def kron_expect(vec: np.ndarray, ops) -> complex:
    """Reference expectation with an explicitly formed Kronecker product."""
    full = np.ones((1, 1), dtype=complex)
    for op in ops:
        full = np.kron(full, np.asarray(op, dtype=complex))
    return complex(np.vdot(vec, full @ vec))


def basis_vector(bits, dim: int = 2) -> np.ndarray:
    vec = np.ones(1, dtype=complex)
    for b in bits:
        e = np.zeros(dim, dtype=complex)
        e[b] = 1
        vec = np.kron(vec, e)
    return vec


def pytest_runtest_logreport(report):
    if report.when != "call" and not report.failed:
        return
    for key, value in report.user_properties:
        if key == "criterion":
            number, title = value
            _results.setdefault(number, (title, []))[1].append(report.passed)


@pytest.fixture(autouse=True)
def _record_criterion(request):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        request.node.user_properties.append(("criterion", tuple(marker.args)))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, outcomes = _results[number]
        status = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}  ({sum(outcomes)}/{len(outcomes)} checks)")
