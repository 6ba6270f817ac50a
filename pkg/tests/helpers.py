"""Random test instances shared across modules."""

import numpy as np

from multisteer import RankTwoState
from multisteer.loss import dual_rail_loss_kraus, fock_loss_kraus


def random_unit(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_state(rng, n_sites, dim):
    t1 = tuple(random_unit(rng, dim) for _ in range(n_sites))
    t2 = tuple(random_unit(rng, dim) for _ in range(n_sites))
    a1, a2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    overlap = np.prod([np.vdot(u, v) for u, v in zip(t1, t2)])
    norm2 = abs(a1) ** 2 + abs(a2) ** 2 + 2 * (np.conj(a1) * a2 * overlap).real
    scale = 1 / np.sqrt(norm2)
    return RankTwoState(a1 * scale, a2 * scale, t1, t2)


def random_instance(rng, max_sites=6, channel=True):
    """A random rank-two state, product observable and (optional) loss channel."""
    n = int(rng.integers(1, max_sites + 1))
    dim = int(rng.choice([2, 3]))
    state = random_state(rng, n, dim)
    obs = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(n)]
    channels = None
    if channel:
        make = fock_loss_kraus if dim == 2 else dual_rail_loss_kraus
        channels = [make(float(rng.uniform(0, 1))) for _ in range(n)]
    return state, obs, channels
