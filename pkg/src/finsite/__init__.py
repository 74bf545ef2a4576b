"""finsite: a workbench for finite-site relative topos theory.

Data structures for finite categories, Grothendieck topologies,
presheaves, and fibrations, decision procedures for locally cartesian
arrows, local fibrations, Giraud topologies, cofinality, and
morphism-of-local-fibration criteria, plus an audit harness verifying
the structural equivalence theorems on enumerated small instances.
"""

from .errors import (
    BaseMismatch,
    FinSiteError,
    LawViolation,
    MalformedTable,
    MissingPullback,
    NontrivialTopology,
    NotAComorphism,
    NotAFibration,
    NotARelativeSite,
    NotContinuous,
    SearchExhausted,
    TargetMismatch,
    UnknownObject,
)
from .fincat import (
    FinCategory,
    FinFunctor,
    IndexedCategory,
    NatTransform,
    add_free_initial,
    build_comma,
    category_of_elements,
    connected_components,
    grothendieck_construction,
    slice_category,
    validate_category,
)
from .presheaf import (
    FinPresheaf,
    MatchingFamily,
    PresheafMorphism,
    compute_colimit,
    compute_pullback,
    is_sheaf,
    locality_test,
    matching_families,
    restrict_along,
    sheafify,
    yoneda,
)
from .report import CheckReport
from .sites import (
    GrothendieckTopology,
    Sieve,
    SitedFunctor,
    canonical_topology,
    comma_correspondence,
    comma_site,
    generate_topology,
    giraud_topology,
    is_comorphism,
    is_continuous,
    is_morphism_of_sites,
    is_topology,
    pullback_sieve,
    sieve_closure,
)
from .fibration import (
    Cleavage,
    ComparisonCell,
    cartesian_lift,
    comparison_cell,
    factorize_vertical_cartesian,
    is_cartesian,
    is_cartesian_fibration,
    is_fibration,
    is_morphism_of_fibrations,
)
from .locfib import (
    DualVerdict,
    LocalFactorization,
    LocalSite,
    RelativeSite,
    WeakIndexedReport,
    comparison_criterion,
    is_K_cartesian,
    is_local_fibration,
    is_locally_cartesian,
    is_morphism_of_local_fibrations,
    local_factorization,
    relative_site,
    relative_site_loccart,
    weak_indexed_conditions,
)
from .cofinal import (
    FactCategory,
    build_cartfact_category,
    build_fact_category,
    is_J_cofinal,
    loccart_cofinality_equiv,
    topos_level_fibration_check,
)
from .dsl import Document, parse, serialize, validate
