"""LHS(T, N) nonlocality criteria and their classification.

Out of ``N`` sites, the ``T`` trusted ones are held to local quantum
uncertainty relations while the rest may follow arbitrary hidden-variable
statistics. Every criterion compares a measured left side with a classical
bound that depends on ``N`` and ``T``; a violation rules out the
corresponding model.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import EncodingError, MultisteerError
from .ghz import Encoding, GhzSpec, build_ghz
from .loss import LossModel, per_site_kraus
from .observables import (
    SettingBundle,
    Selector,
    ladder,
    number,
    pi_complex,
)
from .tensor import RankTwoState, factorized_moment

VIOLATION_TOL = 1e-9

ENTANGLEMENT = "entanglement"
ENTANGLEMENT_UNTRUSTED = "entanglement-with-untrusted"
STEERING = "multipartite-EPR-steering"
BELL = "Bell-nonlocality"


@dataclass(frozen=True)
class Scenario:
    """``N`` sites of which ``trusted`` (0-based indices) are trusted."""

    N: int
    trusted: frozenset[int] = frozenset()
    encoding: Encoding = Encoding.IDEAL_QUBIT
    loss: LossModel | None = None

    def __post_init__(self):
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        trusted = frozenset(int(j) for j in self.trusted)
        object.__setattr__(self, "trusted", trusted)
        if int(self.N) != self.N or self.N < 1:
            raise MultisteerError(f"scenario needs N >= 1 sites, got {self.N}")
        bad = [j + 1 for j in trusted if not 0 <= j < self.N]
        if bad:
            raise MultisteerError(f"trusted sites {bad} outside 1..{self.N}")

    @property
    def T(self) -> int:
        return len(self.trusted)

    def channels(self):
        if self.loss is None:
            return None
        return per_site_kraus(self.loss, self)

    def trusted_efficiency(self) -> float:
        """Product of the trusted sites' efficiencies (``eta_t^T`` without overrides)."""
        if self.loss is None:
            return 1.0
        etas = self.loss.site_efficiencies(self.N, self.trusted)
        return float(np.prod([etas[j] for j in sorted(self.trusted)]))


def classify(N: int, T: int) -> str:
    if T == 0:
        return BELL
    if T == N:
        return ENTANGLEMENT
    if T == 1:
        return STEERING
    return ENTANGLEMENT_UNTRUSTED


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    left: float
    bound: float
    N: int
    T: int
    bound_source: str = "closed-form"
    ratio: float = field(init=False)
    violated: bool = field(init=False)
    nonlocality: str = field(init=False)

    def __post_init__(self):
        if self.bound > 0:
            ratio = self.left / self.bound
        elif self.left > VIOLATION_TOL:
            ratio = math.inf
        else:
            ratio = math.nan
        object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "violated", bool(self.left > self.bound + VIOLATION_TOL))
        object.__setattr__(self, "nonlocality", classify(self.N, self.T))

    @property
    def margin(self) -> float:
        return self.left - self.bound

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class"] = d.pop("nonlocality")
        return d


# -- continuous-variable criteria -------------------------------------------


def _require(scenario: Scenario, *encodings: Encoding) -> None:
    if scenario.encoding not in encodings:
        names = ", ".join(e.value for e in encodings)
        raise EncodingError(f"criterion needs encoding {names}, scenario has {scenario.encoding.value}")


def cv_signs(state: RankTwoState) -> tuple[int, ...]:
    """Signs making ``prod a^{s_j}`` map the first GHZ term onto the second.

    ``+`` (creation) where the first term holds no photon, ``-`` elsewhere.
    """
    signs = []
    for j, (u, v) in enumerate(zip(state.term1, state.term2)):
        if abs(u[0]) == 1 and abs(v[1]) == 1:
            signs.append(1)
        elif abs(u[1]) == 1 and abs(v[0]) == 1:
            signs.append(-1)
        else:
            raise MultisteerError(f"site {j + 1}: cannot infer a ladder sign; pass signs explicitly")
    return tuple(signs)


def cv_left(state: RankTwoState, scenario: Scenario, signs: Sequence | None = None) -> float:
    """``|<a_1^{s_1} ... a_N^{s_N}>|`` for the detected fields."""
    _require(scenario, Encoding.CV_FOCK)
    if signs is None:
        signs = cv_signs(state)
    if len(signs) != scenario.N:
        raise MultisteerError(f"got {len(signs)} signs for {scenario.N} sites")
    obs = [ladder(s) for s in signs]
    return abs(factorized_moment(state, obs, scenario.channels()))


def cv_right(state: RankTwoState, scenario: Scenario) -> float:
    """``<prod_trusted n_j  prod_untrusted (n_j + 1/2)>^{1/2}``."""
    _require(scenario, Encoding.CV_FOCK)
    n = number()
    half = n + 0.5 * np.eye(2)
    obs = [n if j in scenario.trusted else half for j in range(scenario.N)]
    value = factorized_moment(state, obs, scenario.channels()).real
    if value < -1e-10:
        raise MultisteerError(f"number-operator moment is negative ({value})")
    return math.sqrt(max(value, 0.0))


def general_right(
    state: RankTwoState,
    quad_sums: Sequence,
    constants: Sequence[float],
    trusted,
    channels=None,
) -> float:
    """``<prod_trusted (Q_j - C_j) prod_untrusted Q_j>^{1/2}`` with ``Q_j = X_j^2 + Y_j^2``.

    ``quad_sums[j]`` is the local operator ``X_j^2 + Y_j^2`` and ``constants[j]``
    the lower bound of ``Var X_j + Var Y_j`` on trusted sites.
    """
    trusted = set(trusted)
    obs = []
    for j, q in enumerate(quad_sums):
        q = np.asarray(q, dtype=complex)
        obs.append(q - constants[j] * np.eye(q.shape[0]) if j in trusted else q)
    value = factorized_moment(state, obs, channels).real
    if value < -1e-10:
        raise MultisteerError(f"right-side moment is negative ({value})")
    return math.sqrt(max(value, 0.0))


def cv_criterion(state: RankTwoState | GhzSpec, scenario: Scenario, signs: Sequence | None = None) -> CriterionReport:
    if isinstance(state, GhzSpec):
        if state.encoding is not Encoding.CV_FOCK or state.N != scenario.N:
            raise MultisteerError("GHZ spec must be cv-fock with the scenario's N")
        state = build_ghz(state)
    return CriterionReport(
        criterion="cv-moment",
        left=cv_left(state, scenario, signs),
        bound=cv_right(state, scenario),
        N=scenario.N,
        T=scenario.T,
    )


# -- dichotomic (qubit / dual-rail) criteria --------------------------------


@functools.lru_cache(maxsize=None)
def _bell_square_verified(N: int, selector: Selector) -> bool:
    from .oracle import ORACLE_CAP, lhv_max

    if N > ORACLE_CAP:
        return False
    return abs(lhv_max(N, selector) - _square_bound(N, selector)) <= 1e-9


def _square_bound(N: int, selector: Selector) -> float:
    # corners of the LHV square sit at 2^{N/2} e^{i(2k+1) pi/4} (odd # of
    # pi/4 steps) or 2^{N/2} i^k; pick the edge value for each functional
    if selector is Selector.MOD:
        return 2 ** (N / 2)
    if selector is Selector.RE_PLUS_IM:
        return 2 ** (N / 2) if N % 2 == 0 else 2 ** ((N + 1) / 2)
    return 2 ** ((N - 1) / 2) if N % 2 == 1 else 2 ** (N / 2)


def qubit_bound(N: int, T: int, selector=Selector.RE, eta_t: float | None = None, bell_bound: str = "mabk") -> float:
    """Classical bound on the selected part of ``<prod F_j>`` for two-outcome sites.

    For ``T >= 1`` trusted sites the local-quantum set of ``<F_j>`` is a disc,
    giving ``2^{(N-T)/2}`` on Re, Im or the modulus and ``2^{(N-T+1)/2}`` on
    Re + Im, multiplied by ``eta_t^T`` under loss. For ``T = 0`` with
    ``bell_bound="mabk"`` the hidden-variable set is a square and its edges give
    the tighter Mermin (odd N) and Ardehali (even N) bounds; ``"circle"``
    keeps the disc formula at ``T = 0``.
    """
    sel = Selector(selector)
    if not 0 <= T <= N:
        raise MultisteerError(f"need 0 <= T <= N, got T={T}, N={N}")
    if bell_bound not in ("mabk", "circle"):
        raise MultisteerError(f"bell_bound must be 'mabk' or 'circle', got {bell_bound!r}")
    if T == 0 and bell_bound == "mabk":
        return _square_bound(N, sel)
    base = 2 ** ((N - T + 1) / 2) if sel is Selector.RE_PLUS_IM else 2 ** ((N - T) / 2)
    if eta_t is not None and T > 0:
        base *= eta_t**T
    return base


def qubit_bound_source(N: int, T: int, selector=Selector.RE, bell_bound: str = "mabk") -> str:
    sel = Selector(selector)
    if T > 0 or bell_bound == "circle":
        return "closed-form"
    printed = (sel in (Selector.RE, Selector.IM) and N % 2 == 1) or (sel is Selector.RE_PLUS_IM and N % 2 == 0)
    if printed:
        return "closed-form"
    return "oracle-verified" if _bell_square_verified(N, sel) else "unverified"


def qubit_criterion(
    state: RankTwoState,
    scenario: Scenario,
    bundle: SettingBundle,
    selector=Selector.RE,
    bell_bound: str = "mabk",
) -> CriterionReport:
    """Compare ``|selector(<prod F_j>)|`` with :func:`qubit_bound`.

    The absolute value is taken because flipping both outcomes at one site
    negates the product, so every bound holds for ``-selector`` as well.
    Under loss the trusted-efficiency factor is the product of the trusted
    sites' efficiencies.
    """
    sel = Selector(selector)
    _require(scenario, Encoding.IDEAL_QUBIT, Encoding.DUAL_RAIL)
    if scenario.encoding is Encoding.IDEAL_QUBIT and scenario.loss is not None:
        raise EncodingError("loss is not modelled for the ideal-qubit encoding; use dual-rail")
    if bundle.n_sites != scenario.N:
        raise MultisteerError(f"bundle has {bundle.n_sites} sites, scenario has {scenario.N}")
    if bundle.encoding is not scenario.encoding:
        bundle = bundle.with_encoding(scenario.encoding)
    z = pi_complex(state, bundle, scenario.channels())
    bound = qubit_bound(scenario.N, scenario.T, sel, None, bell_bound)
    if scenario.T > 0:
        bound *= scenario.trusted_efficiency()
    return CriterionReport(
        criterion=f"qubit-{sel.value}",
        left=abs(float(sel.apply(z))),
        bound=bound,
        N=scenario.N,
        T=scenario.T,
        bound_source=qubit_bound_source(scenario.N, scenario.T, sel, bell_bound),
    )
