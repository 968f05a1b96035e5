"""Partner hamiltonians on truncated Fock spaces.

Builds h2 = x^dag h1 x from a hermitian h1 and an intertwiner x with
[h1, x x^dag] = 0, labels the joint eigensystem, verifies the eigenvalue
product law eps2 = eps1 * nu, and extends the whole construction to
crypto-hermitian operators dressed by a positive metric.
"""

from .linalg import (
    DEFAULT_TOL,
    EigResult,
    HermiticityError,
    PositivityError,
    ShapeMismatchError,
    ToleranceConfig,
    adjoint,
    commutator,
    fro_norm,
    gram,
    hermitian_eig,
    kernel_basis,
    positive_powers,
    q_commutator,
    rank_of,
)
from .models import (
    ModelInstance,
    Oracles,
    SpaceDescriptor,
    boson_lowering,
    make_invertible_model,
    make_model,
    quon_eps,
    quon_lowering,
    quon_nu,
    swap_j,
    two_mode_ops,
)
from .transform import (
    CommutationError,
    LabeledEigensystem,
    MappedFamily,
    ModelInvariantError,
    SingularOperatorError,
    TransformResult,
    build_transform,
    check_relations,
    completeness_defect,
    joint_eigenbasis,
    map_family,
    recover_f1,
    run_transform,
    tilde_h2,
)
from .cryptoherm import (
    CryptoFamily,
    CryptoHermiticityError,
    KernelConditionError,
    MetricBundle,
    MetricConditionError,
    TruncatedLevel2,
    build_g1,
    build_g2,
    ddagger,
    dress,
    intertwining_checks,
    is_crypto_hermitian,
    make_crypto_scenario,
    truncated_g2,
    undress,
)
from .report import CheckEntry, CheckReport, EigenRow, ErratumNote, RunConfig, render
from .runner import CATALOGUE, catalogue_names, run_scenario, verify_all

__version__ = "0.1.0"
