"""Exact noncommutative symmetric systems of differential operators."""
from .autgroup import (
    DLog,
    Automorphism,
    compose,
    dlog,
    exp_derivation,
    invert,
    is_graded_form,
    random_automorphism,
)
from .diffop import (
    DiffOp,
    Derivation,
    TDiffOp,
    apply_derivation,
    apply_op,
    bplus,
    exp_tdiffop,
    log_tdiffop,
    op_equal,
    taylor_operator,
    triangle,
)
from .ncs import (
    NcsSystem,
    Report,
    SeparationInconclusive,
    SeparationWitness,
    Specialization,
    action_hopf_checks,
    build_omega,
    cm_sequence,
    correspondence_check,
    graded_check,
    group_hom_check,
    jacobian,
    psi_xi_special,
    separate,
    specialize,
    verify_ncs,
)
from .nsym import (
    NSymElem,
    NSymGenFn,
    PiSystem,
    TensorElem,
    abelianize,
    antipode,
    coproduct,
    counit,
    from_psi_basis,
    omega_lambda,
    solve_pi,
    to_psi_basis,
    verify_pi,
)
from .series import ContextMismatch, Rational, RingContext, SeriesVector, TruncSeries, substitute

__version__ = "0.1.0"
