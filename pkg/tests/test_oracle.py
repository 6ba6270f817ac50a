import itertools

import numpy as np
import pytest

from multisteer import lhs_max, lhv_max, lhv_maximizers, qubit_bound
from multisteer.errors import DenseCapExceeded
from multisteer.oracle import DIGITS, expand_product_terms, independent_moment, strategy_from_index
from multisteer.observables import SIGMA_Z, mermin_settings


def brute(N, fn):
    return max(fn(np.prod([x + 1j * y for x, y in combo])) for combo in itertools.product(DIGITS, repeat=N))


def test_lhv_examples():
    assert lhv_max(3, "Re") == pytest.approx(2.0)
    assert lhv_max(2, "Re+Im") == pytest.approx(2.0)
    assert brute(2, abs) == pytest.approx(2.0)
    assert lhv_max(2, "mod") == pytest.approx(2.0)


@pytest.mark.parametrize("N", range(1, 7))
def test_lhv_against_itertools(N):
    assert lhv_max(N, "Re") == pytest.approx(brute(N, np.real))
    assert lhv_max(N, "Re+Im") == pytest.approx(brute(N, lambda z: z.real + z.imag))


@pytest.mark.parametrize("N", range(1, 13))
def test_lhv_parity_pattern(N):
    if N % 2:
        assert lhv_max(N, "Re") == pytest.approx(2 ** ((N - 1) / 2), abs=1e-12)
        assert lhv_max(N, "Re+Im") == pytest.approx(2 ** ((N + 1) / 2), abs=1e-12)
    else:
        assert lhv_max(N, "Re") == pytest.approx(2 ** (N / 2), abs=1e-12)
        assert lhv_max(N, "Re+Im") == pytest.approx(2 ** (N / 2), abs=1e-12)


def test_lhv_cap():
    with pytest.raises(DenseCapExceeded):
        lhv_max(13, "Re")
    with pytest.raises(DenseCapExceeded):
        lhs_max(14, 1, "Re")


@pytest.mark.parametrize("N", [1, 3, 5, 7])
def test_odd_maximizers_sit_at_quarter_phases(N):
    best, idx = lhv_maximizers(N, "Re")
    assert idx.size > 0
    for i in idx:
        z = strategy_from_index(N, int(i)).value()
        assert z.real == pytest.approx(best)
        phase = np.angle(z)
        assert min(abs(phase - np.pi / 4), abs(phase + np.pi / 4)) <= 1e-12


def test_maximizers_cover_all_ties():
    best, idx = lhv_maximizers(3, "Re")
    everything = [strategy_from_index(3, i).value().real for i in range(64)]
    assert list(idx) == [i for i, v in enumerate(everything) if v >= best - 1e-9]


def test_lhs_examples():
    assert lhs_max(2, 1, "Re") == pytest.approx(np.sqrt(2), abs=1e-6)
    assert lhs_max(3, 1, "Re+Im") == pytest.approx(2 * np.sqrt(2), abs=1e-6)
    assert lhs_max(2, 2, "Re") == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("N", range(2, 9))
def test_lhs_matches_disc_bound(N):
    for T in range(1, N + 1):
        for sel in ("Re", "Re+Im"):
            assert abs(lhs_max(N, T, sel) - qubit_bound(N, T, sel)) <= 1e-6


def test_lhs_odd_resolution_still_exact():
    # grid misses the optimum; the refinement step must recover it
    assert lhs_max(3, 1, "Re+Im", phase_resolution=257) == pytest.approx(2 * np.sqrt(2), abs=1e-9)


def test_independent_moment_examples():
    assert independent_moment({(0, 1): 1.0}, (2, 2), [np.eye(2)] * 2) == pytest.approx(1.0)
    assert independent_moment({(0,): 1.0}, (2,), [SIGMA_Z]) == pytest.approx(1.0)
    ghz = {(0, 0, 0): 2**-0.5, (1, 1, 1): 2**-0.5}
    z = independent_moment(ghz, (2, 2, 2), mermin_settings(3).operators())
    assert z.real == pytest.approx(4.0)


def test_expand_product_terms():
    e0, e1 = np.array([1, 0]), np.array([0, 1])
    amps = expand_product_terms([2**-0.5, 2**-0.5], [(e0, e1), (e1, e0)])
    assert amps == pytest.approx({(0, 1): 2**-0.5, (1, 0): 2**-0.5})


def test_independent_cap():
    with pytest.raises(DenseCapExceeded):
        independent_moment({(0,) * 11: 1.0}, (3,) * 11, [np.eye(3)] * 11)
