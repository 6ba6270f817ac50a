"""Brute-force checks of the classical bounds and of the moment evaluators.

None of this goes through the criteria or tensor evaluators: the bounds are
found by enumerating deterministic strategies, and :func:`independent_moment`
works from sparse amplitude dictionaries and sums Kraus branches explicitly.

Strategy indices are lexicographic over sites (site 1 most significant);
digit ``d`` at an untrusted site stands for the outcome pair
``(X, Y) = DIGITS[d]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DenseCapExceeded, MultisteerError
from .observables import Selector

ORACLE_CAP = 12
INDEPENDENT_CAP = 3**10
DIGITS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_SITE_VALUES = np.array([x + 1j * y for x, y in DIGITS])
_BLOCK = 1 << 20


@dataclass(frozen=True)
class Strategy:
    """A deterministic assignment: ``(X, Y)`` per untrusted site, ``<F>`` phase per trusted site."""

    untrusted: Mapping[int, tuple[int, int]]
    trusted_phases: Mapping[int, float]

    def value(self) -> complex:
        z = 1 + 0j
        for x, y in self.untrusted.values():
            z *= x + 1j * y
        for phase in self.trusted_phases.values():
            z *= np.exp(1j * phase)
        return complex(z)


def strategy_from_index(N: int, index: int) -> Strategy:
    picks = {}
    for j in reversed(range(N)):
        index, d = divmod(index, 4)
        picks[j] = DIGITS[d]
    return Strategy(dict(sorted(picks.items())), {})


def _products(n: int) -> np.ndarray:
    """``prod_j (X_j + i Y_j)`` for all ``4^n`` strategies, lexicographic order."""
    out = np.ones(1, dtype=complex)
    for _ in range(n):
        out = np.multiply.outer(out, _SITE_VALUES).ravel()
    return out


def _scan(N: int, selector: Selector, keep: bool, tol: float):
    if N > ORACLE_CAP:
        raise DenseCapExceeded(f"N = {N} exceeds the enumeration cap of {ORACLE_CAP} sites")
    if N < 1:
        raise MultisteerError("need at least one site")
    head_n = N // 2
    head, tail = _products(head_n), _products(N - head_n)
    step = max(1, _BLOCK // tail.size)
    best = -np.inf
    candidates: list[tuple[np.ndarray, np.ndarray]] = []
    for start in range(0, head.size, step):
        vals = selector.apply(np.multiply.outer(head[start : start + step], tail)).ravel()
        m = vals.max()
        if keep and m >= best - tol:
            idx = np.flatnonzero(vals >= m - tol)
            candidates.append((idx + start * tail.size, vals[idx]))
        best = max(best, m)
    if not keep:
        return float(best), None
    idx = np.concatenate([i for i, _ in candidates])
    vals = np.concatenate([v for _, v in candidates])
    return float(best), idx[vals >= best - tol]


def lhv_max(N: int, selector=Selector.RE) -> float:
    """Maximum of the selected functional over all ``4^N`` deterministic strategies."""
    return _scan(N, Selector(selector), False, 0.0)[0]


def lhv_maximizers(N: int, selector=Selector.RE, tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Maximum and the sorted indices of every strategy attaining it (ties kept)."""
    best, idx = _scan(N, Selector(selector), True, tol)
    return best, np.sort(idx)


def lhs_max(N: int, T: int, selector=Selector.RE, phase_resolution: int = 256) -> float:
    """Maximum with ``T`` trusted sites whose ``<F_j>`` range over the unit disc.

    Trusted factors only rescale by at most 1 and rotate, so they collapse
    into one aggregate phase. The phase is scanned on a grid and the best
    grid point refined by a bounded scalar search.
    """
    sel = Selector(selector)
    if not 0 <= T <= N:
        raise MultisteerError(f"need 0 <= T <= N, got T={T}, N={N}")
    if N - T > ORACLE_CAP:
        raise DenseCapExceeded(f"{N - T} untrusted sites exceed the enumeration cap of {ORACLE_CAP}")
    if phase_resolution < 256:
        raise MultisteerError("phase_resolution must be at least 256")
    if T == 0:
        return lhv_max(N, sel)
    products = _products(N - T)
    # distinct values only; every strategy is still enumerated above
    distinct = np.unique(np.round(products, 12))
    grid = 2 * np.pi * np.arange(phase_resolution) / phase_resolution
    vals = sel.apply(np.multiply.outer(distinct, np.exp(1j * grid)))
    i, k = np.unravel_index(np.argmax(vals), vals.shape)
    u = distinct[i]
    width = 2 * np.pi / phase_resolution
    res = minimize_scalar(
        lambda a: -float(sel.apply(u * np.exp(1j * a))),
        bounds=(grid[k] - width, grid[k] + width),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(vals[i, k], -res.fun))


# -- independent moment evaluator -------------------------------------------


def expand_product_terms(amplitudes: Sequence[complex], terms: Sequence[Sequence[np.ndarray]]) -> dict:
    """Sparse amplitude dictionary of ``sum_u amp_u (x)_j terms[u][j]``."""
    out: dict[tuple[int, ...], complex] = {}
    for amp, vectors in zip(amplitudes, terms):
        supports = [[(b, complex(c)) for b, c in enumerate(v) if c != 0] for v in vectors]
        for combo in itertools.product(*supports):
            key = tuple(b for b, _ in combo)
            coeff = complex(amp)
            for _, c in combo:
                coeff *= c
            out[key] = out.get(key, 0j) + coeff
    return {k: v for k, v in out.items() if v != 0}


def _on_axis(op: np.ndarray, psi: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi, axes=(1, axis)), 0, axis)


def independent_moment(
    amplitudes: Mapping[tuple[int, ...], complex],
    dims: Sequence[int],
    observable: Sequence,
    kraus: Sequence[Sequence[np.ndarray] | None] | None = None,
) -> complex:
    """``Tr[O E(|psi><psi|)]`` as a sum over Kraus branches.

    The channel is applied in the Schrodinger picture: every tuple of Kraus
    indices gives an unnormalised branch amplitude array (one axis per
    site), the product observable is applied to it, and the branch
    expectations are added. Branches are built site by site and dropped as
    soon as they vanish.
    """
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) > INDEPENDENT_CAP:
        raise DenseCapExceeded(f"total dimension {int(np.prod(dims))} exceeds {INDEPENDENT_CAP}")
    ops = [np.asarray(o, dtype=complex) for o in observable]
    if len(ops) != len(dims):
        raise MultisteerError("observable length does not match the number of sites")
    psi = np.zeros(dims, dtype=complex)
    for basis, amp in amplitudes.items():
        psi[tuple(basis)] += amp
    eye = [[np.eye(d, dtype=complex)] for d in dims]
    sets = eye if kraus is None else [eye[j] if k is None else [np.asarray(m, dtype=complex) for m in k] for j, k in enumerate(kraus)]

    def branches(vec, site):
        if site == len(dims):
            yield vec
            return
        for k in sets[site]:
            nxt = _on_axis(k, vec, site)
            if np.any(nxt):
                yield from branches(nxt, site + 1)

    total = 0j
    for branch in branches(psi, 0):
        image = branch
        for j, op in enumerate(ops):
            image = _on_axis(op, image, j)
        total += np.vdot(branch, image)
    return complex(total)
