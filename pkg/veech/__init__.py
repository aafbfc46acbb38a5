# Package initialization
# Grouped the same way as the modules: arithmetic, relations, search, twists, geometry, surface
from veech.errors import VeechError
from veech.config import RunConfig, debug_print
from veech.exactnum import (
    CubicFieldDesc, CycloElem, canonicalize, conjugate, cubic_field, cubic_subfields, degree_over_Q,
    dual_basis, expand_in_cubic_basis, galois_apply, inv, mul, sign_at_standard_embedding, trace_K,
)
from veech.relations import (
    OrderBoundQuery, RelationTerm, det_search, det_search_819, dz_admissible, dz_enumerate_maximal,
    pair_search_63, primitive_partition,
)
from veech.search import (
    Candidate, RootTuple, check_asymmetric, check_symmetric, circumference_ratios, compute_s,
    enumerate_candidates, run_order_scan,
)
from veech.twist import (
    CaseData, ClassificationReport, PolyPQ, build_case, classify_all, dependence_lambda, eliminate_u,
    integer_solutions, reverse_chain,
)
from veech.flatmodel import (
    ChainSurface, VerticalCylinder, build_chain_surface, build_veech_14gon, moduli_ratio_check,
    vertical_side_decomposition,
)
from veech.storage import Report, load_report, write_report
from veech.monitoring import StageMonitor, gather_parallel

__all__ = [
    # Errors and configuration
    'VeechError', 'RunConfig', 'debug_print',

    # Exact arithmetic
    'CycloElem', 'CubicFieldDesc', 'canonicalize', 'mul', 'inv', 'galois_apply', 'conjugate',
    'degree_over_Q', 'sign_at_standard_embedding', 'cubic_field', 'cubic_subfields',
    'expand_in_cubic_basis', 'trace_K', 'dual_basis',

    # Vanishing sums of roots of unity
    'OrderBoundQuery', 'RelationTerm', 'dz_admissible', 'dz_enumerate_maximal', 'primitive_partition',
    'pair_search_63', 'det_search', 'det_search_819',

    # Root tuples and candidates
    'RootTuple', 'Candidate', 'circumference_ratios', 'compute_s', 'check_symmetric', 'check_asymmetric',
    'enumerate_candidates', 'run_order_scan',

    # Twists
    'PolyPQ', 'CaseData', 'ClassificationReport', 'dependence_lambda', 'build_case', 'eliminate_u',
    'integer_solutions', 'reverse_chain', 'classify_all',

    # Flat geometry
    'ChainSurface', 'VerticalCylinder', 'build_chain_surface', 'vertical_side_decomposition',
    'moduli_ratio_check', 'build_veech_14gon',

    # Reports and monitoring
    'Report', 'write_report', 'load_report', 'StageMonitor', 'gather_parallel',
]
