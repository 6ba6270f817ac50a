"""A complete evaluation setup: state, trust pattern, settings and loss."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .criteria import CriterionReport, Scenario, cv_criterion, qubit_criterion
from .errors import MultisteerError
from .ghz import Encoding, GhzSpec, build_ghz
from .loss import LossModel
from .observables import FSpec, Selector, SettingBundle, ardehali_settings, mermin_settings


@dataclass(frozen=True)
class Experiment:
    """Everything needed to evaluate one criterion.

    ``trusted`` and ``site_order`` use 0-based site indices. ``settings`` is
    ``"mermin"``, ``"ardehali"`` or an explicit tuple of :class:`FSpec`; for
    the cv-fock encoding only the signs of an explicit tuple are used, and
    the default picks the signs that connect the two GHZ terms.
    """

    encoding: Encoding = Encoding.IDEAL_QUBIT
    N: int = 3
    r: int | None = None
    phi: float = 0.0
    trusted: tuple[int, ...] = ()
    site_order: tuple[int, ...] | None = None
    settings: str | tuple[FSpec, ...] = "mermin"
    selector: Selector = Selector.RE
    loss: LossModel | None = None
    bell_bound: str = "mabk"

    def __post_init__(self):
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        object.__setattr__(self, "selector", Selector(self.selector))
        object.__setattr__(self, "trusted", tuple(sorted(set(int(j) for j in self.trusted))))
        if isinstance(self.settings, str):
            if self.settings not in ("mermin", "ardehali"):
                raise MultisteerError(f"unknown settings {self.settings!r}")
        else:
            specs = tuple(self.settings)
            if len(specs) != self.N:
                raise MultisteerError(f"{len(specs)} explicit settings for {self.N} sites")
            object.__setattr__(self, "settings", specs)
        # validate eagerly so bad inputs fail at construction
        self.ghz_spec()
        self.scenario()

    @property
    def T(self) -> int:
        return len(self.trusted)

    def ghz_spec(self) -> GhzSpec:
        return GhzSpec(self.N, self.r, self.phi, self.encoding, self.site_order)

    def scenario(self) -> Scenario:
        return Scenario(self.N, frozenset(self.trusted), self.encoding, self.loss)

    def bundle(self) -> SettingBundle:
        if self.settings == "mermin":
            return mermin_settings(self.N, encoding=self.encoding)
        if self.settings == "ardehali":
            return ardehali_settings(self.N, encoding=self.encoding)
        return SettingBundle(self.settings, self.encoding)

    def replace(self, **changes) -> "Experiment":
        return dataclasses.replace(self, **changes)

    def with_eta_u(self, eta_u: float) -> "Experiment":
        base = self.loss or LossModel()
        return self.replace(loss=dataclasses.replace(base, eta_untrusted=eta_u))

    def with_eta_t(self, eta_t: float) -> "Experiment":
        base = self.loss or LossModel()
        return self.replace(loss=dataclasses.replace(base, eta_trusted=eta_t))

    def evaluate(self) -> CriterionReport:
        state = build_ghz(self.ghz_spec())
        scenario = self.scenario()
        if self.encoding is Encoding.CV_FOCK:
            signs = None if isinstance(self.settings, str) else [s.sign for s in self.settings]
            return cv_criterion(state, scenario, signs)
        return qubit_criterion(state, scenario, self.bundle(), self.selector, self.bell_bound)

