"""Minimum detection efficiencies for each level of nonlocality.

Each threshold is available two ways: from its analytic form and by
root-finding on the simulated criterion as the untrusted efficiency varies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .criteria import CriterionReport
from .errors import MultisteerError, ThresholdError
from .experiment import Experiment
from .ghz import Encoding, straddle_order
from .loss import LossModel
from .observables import Selector

BRACKET = (1e-4, 1.0)
ROOT_ATOL = 1e-12

THRESHOLD = "threshold"
ANY = "any"
NONE = "none"


@dataclass(frozen=True)
class ThresholdResult:
    """``eta_min`` is ``0.0`` when status is ``"any"`` and ``None`` when ``"none"``."""

    eta_min: float | None
    method: str
    status: str = THRESHOLD
    residual: float = 0.0
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "eta_min": self.eta_min,
            "status": self.status,
            "method": self.method,
            "residual": self.residual,
            **self.inputs,
        }


def agree(a: ThresholdResult, b: ThresholdResult, tol: float = 1e-6) -> bool:
    if a.status != b.status:
        return False
    if a.status != THRESHOLD:
        return True
    return abs(a.eta_min - b.eta_min) <= tol


# -- closed forms -----------------------------------------------------------


def cv_steering_threshold(N: int, r: int = 1) -> ThresholdResult:
    """Untrusted efficiency above which one trusted mode in the flipped block sees steering.

    Solves ``eta^{N-1} > 2^{r-N+1} (eta + 1/2)^{r-1}``; for ``r = 1`` this is
    ``eta > 2^{1/(N-1)} / 2``. The left/right ratio of the inequality grows
    monotonically in ``eta``, so there is at most one crossing.
    """
    if N < 3 or not 1 <= r <= N:
        raise MultisteerError(f"need N >= 3 and 1 <= r <= N, got N={N}, r={r}")
    inputs = {"N": N, "T": 1, "r": r, "encoding": Encoding.CV_FOCK.value}
    if r == 1:
        return ThresholdResult(2 ** (1 / (N - 1)) / 2, "closed-form", inputs=inputs)

    def gap(eta):
        return eta ** (N - 1) - 2.0 ** (r - N + 1) * (eta + 0.5) ** (r - 1)

    lo, hi = BRACKET
    if gap(hi) <= 0:
        return ThresholdResult(None, "closed-form", NONE, inputs=inputs)
    root = brentq(gap, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return ThresholdResult(root, "closed-form", residual=abs(gap(root)), inputs=inputs)


def qubit_threshold(N: int, T: int) -> ThresholdResult:
    """``2^{(2-N-T) / (2(N-T))}`` for dual-rail GHZ with ``r = N``.

    Comes from the disc-shaped bound ``2^{(N-T)/2} eta_t^T`` (also used at
    ``T = 0``); the trusted efficiency cancels.
    """
    if not 0 <= T < N:
        raise ThresholdError("no untrusted site: qubit threshold needs T < N")
    inputs = {"N": N, "T": T, "r": N, "encoding": Encoding.DUAL_RAIL.value}
    return ThresholdResult(2 ** ((2 - N - T) / (2 * (N - T))), "closed-form", inputs=inputs)


def mabk_threshold(N: int) -> ThresholdResult:
    """Uniform-efficiency threshold against the tight Mermin/Ardehali bound: ``2^{(1-N)/(2N)}``."""
    if N < 2:
        raise MultisteerError("need N >= 2")
    inputs = {"N": N, "T": 0, "r": N, "encoding": Encoding.DUAL_RAIL.value}
    return ThresholdResult(2 ** ((1 - N) / (2 * N)), "closed-form", inputs=inputs)


def cabello_reference(N: int) -> float:
    if N < 2:
        raise MultisteerError("need N >= 2")
    return N / (2 * N - 2)


# -- numerical thresholds ---------------------------------------------------


def bisection_threshold(
    template: Experiment,
    tol: float = 1e-7,
    bracket: tuple[float, float] = BRACKET,
    evaluate: Callable[[float], CriterionReport] | None = None,
) -> ThresholdResult:
    """Smallest untrusted efficiency at which the template's criterion is violated.

    The criterion is first sampled at 16 points of the bracket; violation
    must switch on at most once. The crossing of ``left - bound`` is then
    located to within ``tol``.
    """
    lo, hi = bracket
    if evaluate is None:
        evaluate = lambda eta: template.with_eta_u(eta).evaluate()  # noqa: E731
    inputs = {
        "N": template.N,
        "T": template.T,
        "r": template.ghz_spec().r,
        "encoding": template.encoding.value,
        "selector": template.selector.value,
    }
    samples = np.linspace(lo, hi, 16)
    flags = [evaluate(float(e)).violated for e in samples]
    if any(a and not b for a, b in zip(flags, flags[1:])):
        raise ThresholdError(
            f"violation is not monotone in eta_u on [{lo}, {hi}] (samples: {flags}); analyse manually"
        )
    top = evaluate(hi)
    if flags[0]:
        return ThresholdResult(0.0, "bisection", ANY, residual=evaluate(lo).margin, inputs=inputs)
    if top.margin < -ROOT_ATOL:
        return ThresholdResult(None, "bisection", NONE, residual=abs(top.margin), inputs=inputs)
    if abs(top.margin) <= ROOT_ATOL:
        return ThresholdResult(hi, "bisection", residual=abs(top.margin), inputs=inputs)
    root = brentq(lambda e: evaluate(e).margin, lo, hi, xtol=min(tol, 1e-13), rtol=4 * np.finfo(float).eps)
    return ThresholdResult(root, "bisection", residual=abs(evaluate(root).margin), inputs=inputs)


def cv_steering_template(N: int, r: int = 1, eta_t: float = 1.0, trusted_site: int = 0) -> Experiment:
    """One trusted mode inside the flipped block of a cv-fock GHZ state."""
    if not 0 <= trusted_site < r:
        raise MultisteerError("the trusted site must lie in the flipped block (first r sites)")
    return Experiment(
        Encoding.CV_FOCK, N, r, trusted=(trusted_site,), loss=LossModel(eta_t, 1.0)
    )


def qubit_template(N: int, T: int, selector=Selector.RE, eta_t: float = 1.0, bell_bound: str = "circle") -> Experiment:
    settings = "ardehali" if Selector(selector) is Selector.RE_PLUS_IM else "mermin"
    return Experiment(
        Encoding.DUAL_RAIL,
        N,
        N,
        trusted=tuple(range(T)),
        settings=settings,
        selector=selector,
        loss=LossModel(eta_t, 1.0),
        bell_bound=bell_bound,
    )


def cv_t2_threshold(N: int, T: int, r: int, site_order=None, eta_t: float = 1.0) -> ThresholdResult:
    """Threshold for ``T >= 2`` trusted cv-fock modes; trusted sites are the first ``T``.

    When both GHZ terms hold a trusted mode in ``|0>`` the bound vanishes and
    any nonzero efficiency violates; this is confirmed at ``eta = 0.01``.
    Other layouts go through :func:`bisection_threshold`.
    """
    trusted = tuple(range(T))
    if T < 2:
        raise MultisteerError("cv_t2_threshold needs T >= 2")
    if site_order is None and r >= 2 and r <= N - 1:
        site_order = straddle_order(N, r, trusted)
    template = Experiment(
        Encoding.CV_FOCK, N, r, trusted=trusted, site_order=site_order, loss=LossModel(eta_t, 1.0)
    )
    zero_bound = template.evaluate().bound == 0.0
    if r >= 2 and zero_bound:
        probe = template.replace(loss=LossModel(0.01, 0.01)).evaluate()
        if not probe.violated:
            raise ThresholdError("expected a violation at eta = 0.01 but found none")
        return ThresholdResult(
            0.0, "closed-form", ANY, residual=probe.margin,
            inputs={"N": N, "T": T, "r": r, "encoding": Encoding.CV_FOCK.value},
        )
    return bisection_threshold(template)


def figure_rows(kind: str, Ns, Ts, selector=Selector.RE) -> list[dict]:
    """Threshold table over an ``N x T`` grid (cells with ``T > N`` skipped).

    ``kind`` is ``"cv"`` or ``"qubit"``. cv cells use ``r = 1`` for ``T <= 1``
    except ``T = 0`` where ``r = N // 2``, and ``r = 2`` with a straddling site
    order for ``T >= 2``.
    """
    rows = []
    for N in Ns:
        for T in Ts:
            if T > N or (kind == "qubit" and T == N):
                continue
            closed = None
            if kind == "qubit":
                closed = qubit_threshold(N, T)
                num = bisection_threshold(qubit_template(N, T, selector))
            elif T == 0:
                num = bisection_threshold(Experiment(Encoding.CV_FOCK, N, max(1, N // 2), loss=LossModel()))
            elif T == 1:
                if N < 3:
                    continue
                closed = cv_steering_threshold(N, 1)
                num = bisection_threshold(cv_steering_template(N, 1))
            else:
                if N < 3:
                    continue
                num = cv_t2_threshold(N, T, 2)
            rows.append(
                {
                    "N": N,
                    "T": T,
                    "eta_min": num.eta_min,
                    "status": num.status,
                    "eta_closed": None if closed is None else closed.eta_min,
                    "cabello": cabello_reference(N) if kind == "qubit" else None,
                }
            )
    return rows

