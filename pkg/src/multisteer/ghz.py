"""GHZ-type states ``(|0..0 1..1> + e^{i phi} |1..1 0..0>) / sqrt(2)``.

The first ``r`` sites of the first term are in ``|0>`` and the remaining
``N - r`` in ``|1>``; the second term is the bit-flip of the first. A site
permutation may be applied so that the flipped block does not have to
occupy the leading sites.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MultisteerError
from .tensor import RankTwoState


class Encoding(str, enum.Enum):
    CV_FOCK = "cv-fock"
    DUAL_RAIL = "dual-rail"
    IDEAL_QUBIT = "ideal-qubit"

    @property
    def dim(self) -> int:
        return 3 if self is Encoding.DUAL_RAIL else 2


# dual-rail local basis ordering
VAC, UP, DOWN = 0, 1, 2


def logical_vector(bit: int, encoding: Encoding | str) -> np.ndarray:
    """Local vector carrying logical ``|bit>`` in the given encoding.

    cv-fock and ideal-qubit use the computational basis directly (for the
    qubit, ``|0>`` is the ``+1`` eigenstate of sigma^z). dual-rail maps
    ``|0> -> |0>_+ |1>_-`` (DOWN) and ``|1> -> |1>_+ |0>_-`` (UP).
    """
    enc = Encoding(encoding)
    vec = np.zeros(enc.dim, dtype=complex)
    if enc is Encoding.DUAL_RAIL:
        vec[DOWN if bit == 0 else UP] = 1.0
    else:
        vec[bit] = 1.0
    return vec


@dataclass(frozen=True)
class GhzSpec:
    N: int
    r: int | None = None
    phi: float = 0.0
    encoding: Encoding = Encoding.IDEAL_QUBIT
    site_order: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if self.r is None:
            object.__setattr__(self, "r", self.N)
        if int(self.N) != self.N or self.N < 2:
            raise MultisteerError(f"N must be an integer >= 2, got {self.N}")
        if int(self.r) != self.r or not 1 <= self.r <= self.N:
            raise MultisteerError(f"r must be in 1..{self.N}, got {self.r}")
        if self.site_order is not None:
            order = tuple(int(k) for k in self.site_order)
            if sorted(order) != list(range(self.N)):
                raise MultisteerError(f"site_order {order} is not a permutation of 0..{self.N - 1}")
            object.__setattr__(self, "site_order", order)

    def bits(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Logical bit strings of the two terms after the site permutation."""
        first = [0] * self.r + [1] * (self.N - self.r)
        order = self.site_order or tuple(range(self.N))
        t1 = tuple(first[k] for k in order)
        return t1, tuple(1 - b for b in t1)


def build_ghz(spec: GhzSpec) -> RankTwoState:
    b1, b2 = spec.bits()
    return RankTwoState(
        1 / np.sqrt(2),
        np.exp(1j * spec.phi) / np.sqrt(2),
        tuple(logical_vector(b, spec.encoding) for b in b1),
        tuple(logical_vector(b, spec.encoding) for b in b2),
    )


def straddle_order(N: int, r: int, trusted: Sequence[int]) -> tuple[int, ...]:
    """Site order placing trusted sites in both blocks of the first term.

    With at least one trusted site in ``|0>`` in each term, every term is
    annihilated by the trusted number operators. ``trusted`` holds 0-based
    site indices; needs ``len(trusted) >= 2`` and ``1 <= r <= N - 1``.
    """
    trusted = sorted(set(trusted))
    if len(trusted) < 2:
        raise MultisteerError("need at least two trusted sites to straddle both blocks")
    if not 1 <= r <= N - 1:
        raise MultisteerError("both blocks must be nonempty (1 <= r <= N - 1)")
    # physical trusted[0] gets canonical site 0 (block r), trusted[1] gets
    # canonical site r (block N - r); everything else fills in ascending order
    order: list[int | None] = [None] * N
    order[trusted[0]] = 0
    order[trusted[1]] = r
    rest = iter(k for k in range(N) if k not in (0, r))
    for j in range(N):
        if order[j] is None:
            order[j] = next(rest)
    return tuple(order)  # type: ignore[arg-type]
