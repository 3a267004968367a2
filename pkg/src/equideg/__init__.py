"""Equivariant-degree bifurcation toolkit for symmetric elliptic systems on the unit disc.

The package computes, for a symmetric sublinear Laplace system on the planar
disc, the Burnside-ring basic degrees of its irreducible symmetry blocks, the
local bifurcation invariants at every eigenvalue crossing of the linearization,
and global verdicts certifying unbounded branches of non-radial solutions.
"""

from .bifurcation import (
    BifurcationProblem,
    BranchCertificate,
    FoldingProfile,
    GlobalVerdict,
    LocalInvariant,
    branch_certificates,
    folding_profile,
    global_verdict,
    local_invariant,
    rabinowitz_sum,
    theorem_bounded_coeff,
)
from .burnside import BurnsideElement, coeff, multiply, unit
from .degrees import (
    BasicDegree,
    basic_degree,
    basic_degree_direct,
    coeff_fast,
    degree_of_linearization,
    fold_element,
)
from .groups import (
    CharacterTable,
    FiniteGroup,
    OrthogonalAction,
    Permutation,
    Subgroup,
    SubgroupClass,
    cyclic_group,
    direct_product,
    fixed_dim,
    group_from_generators,
    isotypic_decompose,
    n_count,
    subgroup_classes,
    symmetric_group,
    weyl_order,
)
from .model_io import (
    Model,
    bundled_config,
    bundled_model,
    coupling_spectrum,
    load_model,
    model_kernel_mode,
    report_json,
    run_report,
)
from .orbit_types import (
    AmbientContext,
    Irrep,
    IrrepLabel,
    OrbitType,
    elements_of,
    fixed_dim_irrep,
    fold,
    leq,
    maximal_types,
    n_amalgam,
    orbit_types,
    parse_symbol,
    pretty_symbol,
    weyl_order_amalgam,
    x0_of,
)
from .spectrum import (
    BesselZeroTable,
    CriticalPoint,
    EigenvalueCurve,
    KernelMode,
    SpectrumIndexSet,
    a_priori_radius,
    bessel_j,
    bessel_zero,
    bessel_zero_sq,
    critical_points,
    eigenvalue_xi,
    index_sets,
    kernel_mode,
)

__version__ = "0.1.0"
