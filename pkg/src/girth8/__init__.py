"""Algebraic bipartite graphs Gamma_F(f2, f3) of girth eight.

Finite fields, polynomials, two girth engines, the (f(x) g(y), h) classifier
and explicit isomorphisms to Gamma_3(F) = Gamma_F(xy, x^2 y).
"""

from ._accel import backend
from .classify import (
    ClassificationWitness,
    ConditionReport,
    InvalidInstance,
    ProblemInstance,
    SizeConditionError,
    Verdict,
    build_qM_instance,
    check_size_condition,
    classify,
    parse_instance,
    theorem1_equivalence,
    validate_instance,
)
from .field import (
    FieldElement,
    FieldError,
    FieldSpec,
    arith,
    embed,
    enumerate_field,
    lcm_upto,
    make_field,
    parse_field,
)
from .graph import (
    CapExceeded,
    CycleSeed,
    CycleWitness,
    EngineDisagreement,
    GraphSpec,
    Vertex,
    delta_cycle_search,
    find_8cycle,
    full_bfs_girth,
    gamma3,
    girth_at_least_8,
    girth_leq,
    neighbors,
    realize_seed,
    seed_is_cycle,
    translation_automorphism,
)
from .iso import IsoChain, chain_to_gamma3, elementary, pullback_cycle, verify_iso
from .poly import (
    BiPoly,
    PolyParseError,
    UniPoly,
    delta_k,
    format_poly,
    h_slice,
    is_injective_over,
    k_p_set,
    max_fiber_size,
    mu_transform,
    nu_transform,
    parse_poly,
    phi_p,
    pi_transform,
    poly_arith,
    recognize_char_power,
    recognize_rho_power,
    rho,
)

__version__ = "0.1.0"
