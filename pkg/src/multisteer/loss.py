"""Beam-splitter loss as per-site Kraus channels.

A mode passing a beam splitter of transmissivity ``eta`` (the other port in
vacuum) keeps each photon with probability ``eta``. States here carry at most
one photon per mode, so the channel closes on the truncated local space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import EncodingError, MultisteerError
from .ghz import DOWN, UP, VAC, Encoding


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise MultisteerError(f"efficiency must lie in [0, 1], got {eta}")
    return eta


def fock_loss_kraus(eta: float) -> list[np.ndarray]:
    """Amplitude damping on ``{|0>, |1>}``: ``a -> sqrt(eta) a`` in the Heisenberg picture."""
    eta = _check_eta(eta)
    k0 = np.diag([1.0, np.sqrt(eta)]).astype(complex)
    k1 = np.zeros((2, 2), dtype=complex)
    k1[0, 1] = np.sqrt(1 - eta)
    return [k0, k1]


def dual_rail_loss_kraus(eta: float) -> list[np.ndarray]:
    """Photon loss on ``{|vac>, |up>, |down>}``.

    Losing the photon from the ``+`` or ``-`` mode leaves the reservoir in
    distinguishable states, hence two separate jump operators.
    """
    eta = _check_eta(eta)
    k0 = np.zeros((3, 3), dtype=complex)
    k0[VAC, VAC] = 1.0
    k0[UP, UP] = k0[DOWN, DOWN] = np.sqrt(eta)
    k1 = np.zeros((3, 3), dtype=complex)
    k1[VAC, UP] = np.sqrt(1 - eta)
    k2 = np.zeros((3, 3), dtype=complex)
    k2[VAC, DOWN] = np.sqrt(1 - eta)
    return [k0, k1, k2]


def loss_kraus(eta: float, encoding: Encoding | str) -> list[np.ndarray]:
    enc = Encoding(encoding)
    if enc is Encoding.CV_FOCK:
        return fock_loss_kraus(eta)
    if enc is Encoding.DUAL_RAIL:
        return dual_rail_loss_kraus(eta)
    raise EncodingError(
        "loss is not modelled for the ideal-qubit encoding; use the dual-rail encoding"
    )


@dataclass(frozen=True)
class LossModel:
    """Efficiencies at trusted and untrusted sites, with optional per-site overrides.

    ``overrides`` maps 0-based site indices to an efficiency.
    """

    eta_trusted: float = 1.0
    eta_untrusted: float = 1.0
    overrides: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        _check_eta(self.eta_trusted)
        _check_eta(self.eta_untrusted)
        for eta in self.overrides.values():
            _check_eta(eta)

    def site_efficiencies(self, n_sites: int, trusted) -> list[float]:
        for site in self.overrides:
            if not 0 <= site < n_sites:
                raise MultisteerError(f"loss override on nonexistent site {site + 1}")
        trusted = set(trusted)
        return [
            float(self.overrides.get(j, self.eta_trusted if j in trusted else self.eta_untrusted))
            for j in range(n_sites)
        ]


def per_site_kraus(model: LossModel, scenario) -> list[list[np.ndarray]]:
    """Kraus sets for every site of ``scenario`` (anything with ``N``, ``trusted``, ``encoding``)."""
    if scenario.N < 1:
        raise MultisteerError("scenario has no sites")
    etas = model.site_efficiencies(scenario.N, scenario.trusted)
    return [loss_kraus(eta, scenario.encoding) for eta in etas]
