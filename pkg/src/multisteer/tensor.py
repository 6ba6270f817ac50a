"""Expectation values of site-local product observables.

Two evaluation paths are provided:

* :func:`factorized_moment` works on :class:`RankTwoState`, a superposition of
  two product states, and never forms the full Hilbert space. Its cost is
  linear in the number of sites.
* :func:`dense_moment` works on :class:`DenseState` (vector or density matrix
  over the whole product space) and exists as a cross-check.

Local operators are plain ``numpy`` arrays of shape ``(d, d)``; a product
observable is a sequence with one such array per site.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DenseCapExceeded, DimensionMismatch, KrausError, MultisteerError

NORM_TOL = 1e-12
PSD_TOL = 1e-10
DENSE_CAP = 3**10

Kraus = Sequence[np.ndarray]


def as_local_operator(op, dim: int | None = None, site: int = 0) -> np.ndarray:
    """Validate and return ``op`` as a complex ``(d, d)`` array."""
    mat = np.asarray(op, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise MultisteerError(f"site {site + 1}: local operator must be square, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise MultisteerError(f"site {site + 1}: local operator has non-finite entries")
    if dim is not None and mat.shape[0] != dim:
        raise DimensionMismatch(site, dim, mat.shape[0])
    return mat


def check_kraus(kraus: Kraus, dim: int | None = None, site: int = 0, atol: float = PSD_TOL) -> list[np.ndarray]:
    """Return the Kraus set as arrays after checking sum_k K^dag K = 1."""
    ops = [as_local_operator(k, dim, site) for k in kraus]
    if not ops:
        raise KrausError(f"site {site + 1}: empty Kraus set")
    d = ops[0].shape[0]
    total = sum(k.conj().T @ k for k in ops)
    if not np.allclose(total, np.eye(d), atol=atol, rtol=0):
        raise KrausError(f"site {site + 1}: Kraus set is not complete (sum K^dag K != 1)")
    return ops


def heisenberg(op: np.ndarray, kraus: Kraus) -> np.ndarray:
    """Adjoint channel action ``sum_k K^dag op K``."""
    return sum(k.conj().T @ op @ k for k in kraus)


@dataclass(frozen=True)
class RankTwoState:
    """``amp1 |term1> + amp2 |term2>`` with both terms stored as per-site vectors."""

    amp1: complex
    amp2: complex
    term1: tuple[np.ndarray, ...]
    term2: tuple[np.ndarray, ...]

    def __post_init__(self):
        t1 = tuple(np.asarray(v, dtype=complex) for v in self.term1)
        t2 = tuple(np.asarray(v, dtype=complex) for v in self.term2)
        if len(t1) != len(t2) or not t1:
            raise MultisteerError("both product terms need the same, nonzero number of sites")
        for j, (a, b) in enumerate(zip(t1, t2)):
            if a.ndim != 1 or a.shape != b.shape:
                raise DimensionMismatch(j, a.shape[0], b.shape[0], what="term2 vector")
            for v in (a, b):
                if abs(np.vdot(v, v).real - 1.0) > NORM_TOL:
                    raise MultisteerError(f"site {j + 1}: local vector is not normalized")
        object.__setattr__(self, "term1", t1)
        object.__setattr__(self, "term2", t2)
        object.__setattr__(self, "amp1", complex(self.amp1))
        object.__setattr__(self, "amp2", complex(self.amp2))
        if abs(self.norm_squared() - 1.0) > NORM_TOL:
            raise MultisteerError(f"state is not normalized (norm^2 = {self.norm_squared()!r})")

    @property
    def n_sites(self) -> int:
        return len(self.term1)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.shape[0] for v in self.term1)

    def overlap(self) -> complex:
        return complex(np.prod([np.vdot(a, b) for a, b in zip(self.term1, self.term2)]))

    def norm_squared(self) -> float:
        cross = np.conj(self.amp1) * self.amp2 * self.overlap()
        return abs(self.amp1) ** 2 + abs(self.amp2) ** 2 + 2 * cross.real

    def permuted(self, order: Sequence[int]) -> "RankTwoState":
        """Relabel sites: physical site ``j`` receives the factor at ``order[j]``."""
        order = list(order)
        if sorted(order) != list(range(self.n_sites)):
            raise MultisteerError(f"invalid permutation {order}")
        return RankTwoState(
            self.amp1,
            self.amp2,
            tuple(self.term1[k] for k in order),
            tuple(self.term2[k] for k in order),
        )

    def to_dense(self) -> "DenseState":
        vec = self.amp1 * _kron_vectors(self.term1) + self.amp2 * _kron_vectors(self.term2)
        return DenseState(self.dims, vec)


def _kron_vectors(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def _site_channels(channels, n_sites: int, dims: Sequence[int]):
    if channels is None:
        return [None] * n_sites
    if len(channels) != n_sites:
        raise MultisteerError(f"channel list covers {len(channels)} sites, state has {n_sites}")
    return [None if k is None else check_kraus(k, dims[j], j) for j, k in enumerate(channels)]


def factorized_moment(state: RankTwoState, obs: Sequence, channels: Sequence[Kraus | None] | None = None) -> complex:
    """Expectation of a product observable, optionally after per-site channels.

    Evaluates ``sum_{u,v} conj(amp_u) amp_v prod_j <term_u_j| E_j^dag(O_j) |term_v_j>``
    where ``E_j^dag`` is the adjoint of the site-``j`` channel (identity if
    absent). ``channels[j]`` may be ``None`` for a noiseless site.
    """
    n = state.n_sites
    if len(obs) != n:
        raise MultisteerError(f"observable has {len(obs)} factors, state has {n} sites")
    dims = state.dims
    kraus = _site_channels(channels, n, dims)
    amps = (state.amp1, state.amp2)
    terms = (state.term1, state.term2)
    total = 0j
    heis = []
    for j in range(n):
        op = as_local_operator(obs[j], dims[j], j)
        heis.append(op if kraus[j] is None else heisenberg(op, kraus[j]))
    for u in range(2):
        for v in range(2):
            coeff = np.conj(amps[u]) * amps[v]
            if coeff == 0:
                continue
            prod = 1.0 + 0j
            for j in range(n):
                prod *= np.vdot(terms[u][j], heis[j] @ terms[v][j])
                if prod == 0:
                    break
            total += coeff * prod
    return complex(total)


@dataclass(frozen=True)
class DenseState:
    """State over the full product space: a vector (pure) or a density matrix."""

    dims: tuple[int, ...]
    data: np.ndarray = field(repr=False)
    # channel outputs skip the eigenvalue check: CPTP maps keep positivity
    check_psd: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        total = int(np.prod(dims))
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        if data.ndim == 1:
            if data.shape != (total,):
                raise MultisteerError(f"state vector length {data.shape[0]} != {total}")
            if abs(np.vdot(data, data).real - 1.0) > NORM_TOL:
                raise MultisteerError("pure state is not normalized")
        elif data.ndim == 2:
            if data.shape != (total, total):
                raise MultisteerError(f"density matrix shape {data.shape} != ({total}, {total})")
            if not np.allclose(data, data.conj().T, atol=PSD_TOL, rtol=0):
                raise MultisteerError("density matrix is not Hermitian")
            if abs(np.trace(data).real - 1.0) > NORM_TOL:
                raise MultisteerError("density matrix trace != 1")
            if self.check_psd and np.linalg.eigvalsh(data).min() < -PSD_TOL:
                raise MultisteerError("density matrix is not positive semidefinite")
        else:
            raise MultisteerError("state data must be a vector or a matrix")

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DenseState":
        total = int(np.prod(dims))
        return cls(tuple(dims), np.eye(total, dtype=complex) / total)


def _check_cap(dims: Sequence[int], cap: int) -> None:
    total = int(np.prod(dims))
    if total > cap:
        raise DenseCapExceeded(
            f"total dimension {total} exceeds dense cap {cap}; use the factorized path"
        )


def _apply_local(tensor: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    """Contract ``op`` (acting on its column index) into ``tensor`` along ``axis``."""
    out = np.tensordot(op, tensor, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def dense_moment(state: DenseState, obs: Sequence, cap: int = DENSE_CAP) -> complex:
    """Expectation ``<O_1 x ... x O_N>`` on the full product space."""
    _check_cap(state.dims, cap)
    n = state.n_sites
    if len(obs) != n:
        raise MultisteerError(f"observable has {len(obs)} factors, state has {n} sites")
    ops = [as_local_operator(o, state.dims[j], j) for j, o in enumerate(obs)]
    if state.is_pure:
        psi = state.data.reshape(state.dims)
        phi = psi
        for j, op in enumerate(ops):
            phi = _apply_local(phi, op, j)
        return complex(np.vdot(psi, phi))
    rho = state.data.reshape(state.dims + state.dims)
    for j, op in enumerate(ops):
        rho = _apply_local(rho, op, j)
    total = int(np.prod(state.dims))
    return complex(np.trace(rho.reshape(total, total)))


def apply_channel_dense(state: DenseState, site: int, kraus: Kraus, cap: int = DENSE_CAP) -> DenseState:
    """Apply a Kraus channel to one site; the result is always a density matrix."""
    _check_cap(state.dims, cap)
    if not 0 <= site < state.n_sites:
        raise MultisteerError(f"site index {site} out of range")
    ops = check_kraus(kraus, state.dims[site], site)
    n = state.n_sites
    rho = state.density_matrix().reshape(state.dims + state.dims)
    out = np.zeros_like(rho)
    for k in ops:
        term = _apply_local(rho, k, site)
        term = _apply_local(term, k.conj(), n + site)
        out += term
    total = int(np.prod(state.dims))
    out = out.reshape(total, total)
    out = (out + out.conj().T) / 2
    return DenseState(state.dims, out, check_psd=False)
