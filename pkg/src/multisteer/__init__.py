"""Multipartite nonlocality criteria with partially trusted parties.

Evaluates the LHS(T, N) family of inequalities -- entanglement (all sites
trusted), multipartite EPR steering (one trusted site) and Bell
nonlocality (none trusted) -- on GHZ-type states, with and without
detection loss.
"""

from .criteria import (
    CriterionReport,
    Scenario,
    classify,
    cv_criterion,
    cv_left,
    cv_right,
    general_right,
    qubit_bound,
    qubit_criterion,
)
from .errors import (
    DenseCapExceeded,
    DimensionMismatch,
    EncodingError,
    KrausError,
    MultisteerError,
    ThresholdError,
)
from .experiment import Experiment
from .ghz import Encoding, GhzSpec, build_ghz, straddle_order
from .loss import LossModel, dual_rail_loss_kraus, fock_loss_kraus, per_site_kraus
from .observables import (
    FSpec,
    Selector,
    SettingBundle,
    ardehali_settings,
    f_operator,
    ladder,
    mermin_settings,
    number,
    pauli_expansion,
    pauli_theta,
    pi_complex,
    pi_moment,
    schwinger,
)
from .oracle import independent_moment, lhs_max, lhv_max, lhv_maximizers
from .tensor import DenseState, RankTwoState, apply_channel_dense, dense_moment, factorized_moment
from .thresholds import (
    ThresholdResult,
    bisection_threshold,
    cabello_reference,
    cv_steering_threshold,
    cv_t2_threshold,
    qubit_threshold,
)

__version__ = "0.1.0"
