"""Workbench for finitely generated torsion modules over Z_p[[T]].

Everything is computed at a fixed working precision p^N and, for power
series, a fixed degree cap T^D.  The public surface re-exports the
commonly used types and operations; submodules stay importable for the
more specialised tools.
"""

from .errors import (
    BadLevels,
    ContextMismatch,
    InconsistentSeries,
    InsufficientData,
    InsufficientDegreeCap,
    IwalabError,
    NotAPBase,
    NotAUnit,
    NotDistinguished,
    NotTStable,
    PrecisionExhausted,
    ZeroPolynomial,
)
from .padic import PadicContext, PadicInt
from .lambda_algebra import (
    LambdaPoly,
    LambdaTrunc,
    TowerParams,
    WeierstrassData,
    is_distinguished,
    iwasawa_involution,
    nu,
    omega,
    poly_mul,
    weierstrass_divide,
    weierstrass_prepare,
)
from .modules import (
    CircReport,
    ElementaryModule,
    FiniteLevel,
    LevelMap,
    OrderProfileReport,
    TransitionReport,
    finite_level,
    lift_map,
    norm_map,
    order_profile,
    transition,
    verify_circ,
)
from .subgroups import (
    PropertyFReport,
    SplitReport,
    Subgroup,
    full_subgroup,
    hom_kernel,
    is_coalescence_closed,
    matrix_socle,
    primary_part,
    property_f_check,
    saturate,
    socle,
    split_t_part,
    subgroup_sum,
    t_closure,
    trivial_subgroup,
    y_kernel,
)
from .growth import (
    GrowthEntry,
    GrowthSeries,
    InvariantEstimate,
    RankFreezeReport,
    detect_stabilization,
    rank_freeze_check,
)
from .pairing import (
    CompatReport,
    DualBaseCertificate,
    OrderReversalReport,
    PairingTable,
    TwistedDual,
    build_pairing,
    check_double_dual,
    check_order_reversal,
    check_projective_compat,
    check_reflection,
    dual_base,
)

__all__ = [
    "BadLevels",
    "ContextMismatch",
    "InconsistentSeries",
    "InsufficientData",
    "InsufficientDegreeCap",
    "IwalabError",
    "NotAPBase",
    "NotAUnit",
    "NotDistinguished",
    "NotTStable",
    "PrecisionExhausted",
    "ZeroPolynomial",
    "PadicContext",
    "PadicInt",
    "LambdaPoly",
    "LambdaTrunc",
    "TowerParams",
    "WeierstrassData",
    "is_distinguished",
    "iwasawa_involution",
    "nu",
    "omega",
    "poly_mul",
    "weierstrass_divide",
    "weierstrass_prepare",
    "CircReport",
    "ElementaryModule",
    "FiniteLevel",
    "LevelMap",
    "OrderProfileReport",
    "TransitionReport",
    "finite_level",
    "lift_map",
    "norm_map",
    "order_profile",
    "transition",
    "verify_circ",
    "PropertyFReport",
    "SplitReport",
    "Subgroup",
    "full_subgroup",
    "hom_kernel",
    "is_coalescence_closed",
    "matrix_socle",
    "primary_part",
    "property_f_check",
    "saturate",
    "socle",
    "split_t_part",
    "subgroup_sum",
    "t_closure",
    "trivial_subgroup",
    "y_kernel",
    "GrowthEntry",
    "GrowthSeries",
    "InvariantEstimate",
    "RankFreezeReport",
    "detect_stabilization",
    "rank_freeze_check",
    "CompatReport",
    "DualBaseCertificate",
    "OrderReversalReport",
    "PairingTable",
    "TwistedDual",
    "build_pairing",
    "check_double_dual",
    "check_order_reversal",
    "check_projective_compat",
    "check_reflection",
    "dual_base",
]
