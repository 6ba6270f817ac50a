"""Local operators and the complex correlators built from them.

Each site contributes ``F = X + s i Y`` with ``s = +1`` or ``-1``. For qubits
``X = sigma^theta`` and ``Y = sigma^{theta + pi/2}``; for dual-rail sites the
Schwinger spin components take their place, and for a bosonic mode ``F`` is
``sqrt(2)`` times a creation (``s = +1``) or annihilation (``s = -1``)
operator. The expectation of the product ``prod_j F_j`` is a complex number
whose real and imaginary parts are measurable correlator sums.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EncodingError, MultisteerError
from .ghz import DOWN, UP, VAC, Encoding
from .tensor import RankTwoState, factorized_moment

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class Selector(str, enum.Enum):
    """Which real functional of ``z = <prod F>`` a criterion tests."""

    RE = "Re"
    IM = "Im"
    RE_PLUS_IM = "Re+Im"
    MOD = "mod"

    def apply(self, z):
        if self is Selector.RE:
            return np.real(z)
        if self is Selector.IM:
            return np.imag(z)
        if self is Selector.RE_PLUS_IM:
            return np.real(z) + np.imag(z)
        return np.abs(z)


def _sign(sign) -> int:
    if sign in ("+", 1, +1.0):
        return 1
    if sign in ("-", -1, -1.0):
        return -1
    raise MultisteerError(f"sign must be '+' or '-', got {sign!r}")


def ladder(sign="-") -> np.ndarray:
    """``a`` (sign ``-``) or ``a^dag`` (sign ``+``) truncated to ``{|0>, |1>}``.

    ``a^dag |1>`` is set to zero; moments are exact on states that never
    hold more than one photon per mode.
    """
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    return a.conj().T if _sign(sign) > 0 else a


def number() -> np.ndarray:
    return np.diag([0.0, 1.0]).astype(complex)


def pauli_theta(theta: float) -> np.ndarray:
    return np.cos(theta) * SIGMA_X + np.sin(theta) * SIGMA_Y


def schwinger(component: str, theta: float | None = None) -> np.ndarray:
    """Schwinger spin on the dual-rail space ``{|vac>, |up>, |down>}``.

    ``component`` is ``"x"``, ``"y"``, ``"z"`` or ``"theta"`` (then
    ``s^theta = cos(theta) s^x + sin(theta) s^y``). Every component gives 0
    on the vacuum.
    """
    s = np.zeros((3, 3), dtype=complex)
    block = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
    if component == "theta":
        if theta is None:
            raise MultisteerError("schwinger('theta') needs an angle")
        m = pauli_theta(theta)
    elif component in block:
        m = block[component]
    else:
        raise MultisteerError(f"unknown Schwinger component {component!r}")
    idx = [UP, DOWN]
    s[np.ix_(idx, idx)] = m
    return s


def photon_projector() -> np.ndarray:
    p = np.eye(3, dtype=complex)
    p[VAC, VAC] = 0
    return p


@dataclass(frozen=True)
class FSpec:
    """One site's ``F = X + sign * i * Y``; ``Y`` sits at ``y_theta`` (default ``theta + pi/2``)."""

    sign: int = 1
    theta: float = 0.0
    y_theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "sign", _sign(self.sign))

    @property
    def angles(self) -> tuple[float, float]:
        y = self.theta + np.pi / 2 if self.y_theta is None else self.y_theta
        return self.theta, y


def f_operator(spec: FSpec, encoding: Encoding | str) -> np.ndarray:
    enc = Encoding(encoding)
    if enc is Encoding.CV_FOCK:
        return np.sqrt(2) * ladder(spec.sign)
    tx, ty = spec.angles
    if enc is Encoding.IDEAL_QUBIT:
        return pauli_theta(tx) + spec.sign * 1j * pauli_theta(ty)
    return schwinger("theta", tx) + spec.sign * 1j * schwinger("theta", ty)


@dataclass(frozen=True)
class SettingBundle:
    specs: tuple[FSpec, ...]
    encoding: Encoding = Encoding.IDEAL_QUBIT

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if not self.specs:
            raise MultisteerError("a setting bundle needs at least one site")

    @property
    def n_sites(self) -> int:
        return len(self.specs)

    def operators(self) -> list[np.ndarray]:
        return [f_operator(s, self.encoding) for s in self.specs]

    def with_encoding(self, encoding) -> "SettingBundle":
        return SettingBundle(self.specs, encoding)


def mermin_settings(N: int, sign="+", encoding=Encoding.IDEAL_QUBIT) -> SettingBundle:
    """``F_j = X_j +/- i Y_j`` with ``X = sigma^x`` at every site."""
    if N < 2:
        raise MultisteerError("Mermin settings need N >= 2")
    return SettingBundle(tuple(FSpec(sign, 0.0) for _ in range(N)), encoding)


def ardehali_settings(N: int, sign="+", encoding=Encoding.IDEAL_QUBIT) -> SettingBundle:
    """Sites ``1..N-1`` use ``sigma^x + sign i sigma^y``; site ``N`` uses
    ``sigma^{-pi/4} + i sigma^{pi/4}``.

    With ``sign="+"`` every factor raises the same way and the GHZ state with
    ``r = N`` reaches ``Re + Im = 2^{N - 1/2}``. ``sign="-"`` mixes lowering and
    raising factors; that bundle reaches the same value on the ``r = N - 1``
    state instead and gives zero on ``r = N``.
    """
    if N < 2:
        raise MultisteerError("Ardehali settings need N >= 2")
    specs = [FSpec(sign, 0.0) for _ in range(N - 1)]
    specs.append(FSpec(+1, -np.pi / 4))
    return SettingBundle(tuple(specs), encoding)


def pi_moment(state: RankTwoState, bundle: SettingBundle, selector=Selector.RE, channels=None) -> float:
    z = factorized_moment(state, bundle.operators(), channels)
    return float(Selector(selector).apply(z))


def pi_complex(state: RankTwoState, bundle: SettingBundle, channels=None) -> complex:
    return factorized_moment(state, bundle.operators(), channels)


def pauli_expansion(bundle: SettingBundle, selector=Selector.RE) -> list[tuple[float, tuple[float, ...]]]:
    """Expand the selected Hermitian part of ``prod_j F_j`` into correlators.

    Returns ``(coefficient, angles)`` pairs where ``angles[j]`` is the axis
    of ``sigma^theta`` measured at site ``j``. Terms with zero coefficient are
    dropped; order follows the X/Y choice per site, X first.
    """
    sel = Selector(selector)
    if sel is Selector.MOD:
        raise MultisteerError("the modulus is not a linear combination of correlators")
    if bundle.encoding is Encoding.CV_FOCK:
        raise EncodingError("Pauli expansion applies to qubit settings only")
    terms = []
    for choice in itertools.product((0, 1), repeat=bundle.n_sites):
        coeff = 1 + 0j
        angles = []
        for pick, spec in zip(choice, bundle.specs):
            tx, ty = spec.angles
            if pick:
                coeff *= 1j * spec.sign
                angles.append(ty)
            else:
                angles.append(tx)
        value = float(sel.apply(coeff))
        if value != 0:
            terms.append((value, tuple(angles)))
    return terms


def correlator_sum(state: RankTwoState, expansion, encoding=Encoding.IDEAL_QUBIT, channels=None) -> float:
    """Sum of measured correlators ``sum_k c_k <prod_j sigma^{theta_kj}>``."""
    local = pauli_theta if Encoding(encoding) is Encoding.IDEAL_QUBIT else (lambda t: schwinger("theta", t))
    total = 0.0
    for coeff, angles in expansion:
        z = factorized_moment(state, [local(t) for t in angles], channels)
        total += coeff * z.real
    return total


def axis_label(theta: float) -> str:
    t = float(np.mod(theta, 2 * np.pi))
    for name, ref in (("x", 0.0), ("y", np.pi / 2), ("-x", np.pi), ("-y", 3 * np.pi / 2)):
        if np.isclose(t, ref, atol=1e-12) or (ref == 0.0 and np.isclose(t, 2 * np.pi, atol=1e-12)):
            return name
    return f"theta={theta:.6g}"
