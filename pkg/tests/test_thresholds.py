import math

import pytest

from multisteer import Experiment, LossModel
from multisteer.errors import MultisteerError, ThresholdError
from multisteer.thresholds import (
    ANY,
    NONE,
    agree,
    bisection_threshold,
    cabello_reference,
    cv_steering_template,
    cv_steering_threshold,
    cv_t2_threshold,
    figure_rows,
    mabk_threshold,
    qubit_template,
    qubit_threshold,
)
from multisteer.criteria import CriterionReport


def test_cv_closed_forms():
    assert cv_steering_threshold(3, 1).eta_min == pytest.approx(2**0.5 / 2, abs=1e-15)
    # the r = 1 form tends to one half
    assert cv_steering_threshold(200, 1).eta_min == pytest.approx(0.5, abs=2e-3)
    # real root of 2 eta^3 - eta - 1/2
    res = cv_steering_threshold(4, 2)
    assert res.eta_min == pytest.approx(0.88464618, abs=1e-8)
    assert 2 * res.eta_min**3 - res.eta_min - 0.5 == pytest.approx(0, abs=1e-12)


def test_cv_closed_form_without_solution():
    res = cv_steering_threshold(3, 3)
    assert res.status == NONE and res.eta_min is None


def test_cv_closed_form_validation():
    with pytest.raises(MultisteerError):
        cv_steering_threshold(2, 1)


def test_qubit_closed_forms():
    for N in range(2, 11):
        assert qubit_threshold(N, 1).eta_min == pytest.approx(2**-0.5, abs=1e-15)
    assert qubit_threshold(2, 0).eta_min == 1.0
    assert qubit_threshold(3, 0).eta_min == pytest.approx(2 ** (-1 / 6), abs=1e-15)
    assert mabk_threshold(3).eta_min == pytest.approx(2 ** (-1 / 3), abs=1e-15)
    with pytest.raises(ThresholdError, match="no untrusted site"):
        qubit_threshold(3, 3)


def test_cabello():
    assert cabello_reference(2) == 1.0
    assert cabello_reference(3) == 0.75
    assert cabello_reference(10**6) == pytest.approx(0.5, abs=1e-6)


def test_bisection_examples():
    assert bisection_threshold(cv_steering_template(3)).eta_min == pytest.approx(0.7071068, abs=1e-6)
    assert bisection_threshold(qubit_template(3, 1)).eta_min == pytest.approx(0.7071068, abs=1e-6)
    res = bisection_threshold(qubit_template(4, 0, "Re+Im"))
    assert res.eta_min == pytest.approx(2**-0.25, abs=1e-6)
    assert res.residual < 1e-9


def test_bisection_against_tight_bell_bound():
    # Ardehali at even N against the square bound: 2^{(1-N)/(2N)}
    res = bisection_threshold(qubit_template(4, 0, "Re+Im", bell_bound="mabk"))
    assert res.eta_min == pytest.approx(2 ** (-3 / 8), abs=1e-6)
    assert agree(res, mabk_threshold(4))


def test_bisection_none_and_any():
    res = bisection_threshold(Experiment("cv-fock", 3, 1, loss=LossModel()))
    assert res.status == NONE
    res = bisection_threshold(Experiment("dual-rail", 3, 3, trusted=(0, 1, 2), loss=LossModel()))
    assert res.status == ANY and res.eta_min == 0.0


def test_bisection_rejects_non_monotone():
    def evaluate(eta):
        return CriterionReport("fake", 1.0, 0.0 if 0.3 < eta < 0.6 else 2.0, 3, 1)

    with pytest.raises(ThresholdError, match="not monotone"):
        bisection_threshold(qubit_template(3, 1), evaluate=evaluate)


@pytest.mark.parametrize("N", range(3, 11))
def test_cv_bisection_matches_closed_form(N):
    assert agree(bisection_threshold(cv_steering_template(N)), cv_steering_threshold(N, 1))


@pytest.mark.parametrize("N,r", [(4, 2), (5, 2), (6, 3)])
def test_cv_general_r_matches(N, r):
    assert agree(bisection_threshold(cv_steering_template(N, r)), cv_steering_threshold(N, r))


@pytest.mark.parametrize("N", range(2, 11))
def test_qubit_bisection_matches_closed_form(N):
    for T in range(N):
        closed = qubit_threshold(N, T)
        for sel in ("Re", "Re+Im"):
            assert agree(bisection_threshold(qubit_template(N, T, sel)), closed)


@pytest.mark.parametrize("N", [3, 6, 9])
def test_cv_threshold_ignores_trusted_loss(N):
    values = [bisection_threshold(cv_steering_template(N, eta_t=e)).eta_min for e in (0.2, 0.6, 1.0)]
    assert max(values) - min(values) < 1e-9


@pytest.mark.parametrize("N,T", [(3, 1), (4, 2), (5, 1)])
def test_qubit_threshold_ignores_trusted_loss(N, T):
    values = [bisection_threshold(qubit_template(N, T, eta_t=e)).eta_min for e in (0.2, 0.6, 1.0)]
    assert max(values) - min(values) < 1e-9


@pytest.mark.parametrize("N,T", [(4, 2), (5, 3), (6, 2)])
def test_two_trusted_any_efficiency(N, T):
    res = cv_t2_threshold(N, T, 2)
    assert res.status == ANY and res.eta_min == 0.0 and res.residual > 0


def test_two_trusted_r1_falls_back_to_bisection():
    res = cv_t2_threshold(4, 2, 1)
    assert res.method == "bisection"
    # bisection on the same family, evaluated independently
    template = Experiment("cv-fock", 4, 1, trusted=(0, 1), loss=LossModel())
    assert agree(res, bisection_threshold(template))


def test_threshold_monotone_in_trust():
    for N in range(2, 11):
        etas = [qubit_threshold(N, T).eta_min for T in range(N)]
        assert all(b <= a + 1e-12 for a, b in zip(etas, etas[1:]))


def test_threshold_monotone_in_N_low_trust():
    # holds for T <= 1; for T >= 2 the closed form increases with N
    for T in (0, 1):
        etas = [qubit_threshold(N, T).eta_min for N in range(max(2, T + 1), 11)]
        assert all(b <= a + 1e-12 for a, b in zip(etas, etas[1:]))
    cv = [cv_steering_threshold(N).eta_min for N in range(3, 11)]
    assert all(b < a for a, b in zip(cv, cv[1:]))


def test_threshold_increases_in_N_for_two_trusted():
    assert qubit_threshold(4, 2).eta_min < qubit_threshold(6, 2).eta_min


def test_figure_rows_qubit():
    rows = figure_rows("qubit", range(2, 5), range(0, 3))
    assert [(r["N"], r["T"]) for r in rows] == [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2), (4, 0), (4, 1), (4, 2)]
    for r in rows:
        assert math.isclose(r["eta_min"], r["eta_closed"], abs_tol=1e-6)
        assert r["cabello"] == r["N"] / (2 * r["N"] - 2)


def test_figure_rows_cv():
    rows = figure_rows("cv", [4], range(0, 3))
    by_t = {r["T"]: r for r in rows}
    assert by_t[0]["status"] == NONE
    assert by_t[1]["eta_min"] == pytest.approx(2 ** (1 / 3) / 2, abs=1e-6)
    assert by_t[2]["status"] == ANY
