"""Strong immersions of multistars in graphs with a high-degree vertex."""

from .connectivity import EdgeCut, LambdaResult, lambda_, lambda_count, min_cut_between
from .immersion import (
    Immersion,
    Multistar,
    StarShape,
    brute_force_find,
    compose,
    embed_in_star,
    make_star,
    slim,
    validate,
)
from .ksystem import (
    CutCertificate,
    KSystem,
    Threshold,
    build_gx,
    d_of,
    find_cut_certificate,
    respects,
    validate_ksystem,
)
from .multigraph import EdgePath, GraphError, MultiGraph, parse_edgelist, format_edgelist
from .splitting import first_splittable_pair, is_splittable, splittable_pairs_at

__version__ = "0.1.0"
