"""Exact combinatorics of multisegments.

Posets of multisegments under elementary operations, Kazhdan-Lusztig
polynomials and their parabolic variants, multiplicities of simple
modules in standard ones by two independent routes, truncation and
symmetrization reductions, partial derivatives, and induced products
with a segment.  Every closed formula is cross-checked against a
brute-force ring oracle at desk scale.
"""

from .core import (
    BadRange,
    Multisegment,
    NotLinked,
    NotMember,
    Segment,
    RelationKind,
    SegmentRelation,
    degree_of,
    elementary_op,
    linked,
    mseg,
    rank_invariant,
    seg,
    segment_relation,
    support_range,
    weight_of,
)
from .poset import (
    PosetSnapshot,
    SizeLimit,
    chain_length,
    generate_poset,
    is_minimal,
    leq,
    minimal_element,
)
from .coxeter import (
    Partition,
    bruhat_leq,
    phi,
    phi_inv,
    zelevinsky_permutation,
)
from .kl import QPoly, kl_multisegment, kl_poly, mu, parabolic_kl, double_parabolic_kl
from .ring import (
    L,
    RingElement,
    decompose_product,
    derivative_simple,
    derivative_standard,
    m_matrix,
    pi,
    ring_mult,
)
from .reduce import (
    NoBijection,
    NotInDomain,
    SymmetrizationCertificate,
    TruncationStep,
    classify_poset,
    hypothesis_Hk,
    psi_k,
    psi_k_inv,
    relation_type_equal,
    symmetrize,
    transport,
    truncate,
    xi_transport,
)
from .formulas import (
    ThetaTable,
    UnreducedCase,
    derivative_closed_form,
    gamma_set,
    induce_point,
    induce_segment,
    preceq_k,
    theta_table,
)
from .cli import format_multisegment, parse_multisegment

__version__ = "0.1.0"

__all__ = [
    "BadRange",
    "Multisegment",
    "NotLinked",
    "NotMember",
    "Segment",
    "RelationKind",
    "SegmentRelation",
    "degree_of",
    "elementary_op",
    "linked",
    "mseg",
    "rank_invariant",
    "seg",
    "segment_relation",
    "support_range",
    "weight_of",
    "PosetSnapshot",
    "SizeLimit",
    "chain_length",
    "generate_poset",
    "is_minimal",
    "leq",
    "minimal_element",
    "Partition",
    "bruhat_leq",
    "phi",
    "phi_inv",
    "zelevinsky_permutation",
    "QPoly",
    "kl_multisegment",
    "kl_poly",
    "mu",
    "parabolic_kl",
    "double_parabolic_kl",
    "L",
    "RingElement",
    "decompose_product",
    "derivative_simple",
    "derivative_standard",
    "m_matrix",
    "pi",
    "ring_mult",
    "NoBijection",
    "NotInDomain",
    "SymmetrizationCertificate",
    "TruncationStep",
    "classify_poset",
    "hypothesis_Hk",
    "psi_k",
    "psi_k_inv",
    "relation_type_equal",
    "symmetrize",
    "transport",
    "truncate",
    "xi_transport",
    "ThetaTable",
    "UnreducedCase",
    "derivative_closed_form",
    "gamma_set",
    "induce_point",
    "induce_segment",
    "preceq_k",
    "theta_table",
    "format_multisegment",
    "parse_multisegment",
]
