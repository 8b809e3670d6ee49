"""Exact computation with block-partitioned directed graphs.

The package provides canonical normal forms in the algebra attached to a
graph whose out-edges are partitioned into named blocks (with a chosen
family of blocks declared full), decision procedures with certificates for
the associated commutative monoid, enumeration of the ideal lattice, and
staged sink-adjoining resolutions with refinement and divisibility probes.
"""

from .algebra import (
    AlgebraElement,
    AlgebraError,
    AlgebraOps,
    Word,
    cohn_product,
    enumerate_basis,
    is_normal_word,
    multiply,
    normalize,
    parse_expr,
    print_expr,
    q_idempotent,
    star,
)
from .fields import QQ, FieldError, PrimeField, Rationals
from .graphs import (
    GraphError,
    GraphMorphism,
    ParseError,
    SeparatedGraph,
    check_morphism,
    cs_extension,
    dot_export,
    finite_complete_subobject,
    parse_graph,
    print_graph,
    remove_s,
    with_full_blocks,
)
from .homs import (
    AlgebraHom,
    BundleModel,
    MatrixOps,
    bundle_graph,
    bundle_isomorphism_report,
    graph_relations,
    induced_hom,
    verify_hom,
    verify_relations,
)
from .lattice import (
    AdmissiblePair,
    LatticeError,
    check_multipath,
    enumerate_admissible_pairs,
    hereditary_saturated_sets,
    is_c_cofinal,
    is_simple,
    pair_inf,
    pair_leq,
    pair_sup,
    saturation_closure,
    xe_saturated_sets,
)
from .monoid import (
    Budget,
    EqResult,
    MonoidElement,
    MonoidError,
    MonoidPresentation,
    check_star,
    forward_steps,
    ideal_signature,
    monoid_eq,
    parse_element,
    pi_homomorphism,
    presentation_of,
    presentation_to_graph,
    refine,
)
from .resolution import (
    FreeCover,
    ResolutionError,
    ResolutionPlan,
    StageGraph,
    build_resolution,
    delta_refinement_lift,
    delta_t_resolution,
    divisibility_probe,
    parse_plan,
    run_plan,
    transfer_verdicts,
    unitary_image,
)

__version__ = "0.1.0"
