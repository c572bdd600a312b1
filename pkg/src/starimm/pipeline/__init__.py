"""Reductions of k-systems down to a star immersion.

The stages run in order: canonicalize, reduce_ray_degrees, build_core, peel
and extract_star.  Each stage returns a witness immersing its host in the
previous host, and the witnesses compose back to the input graph.
"""

from .canonical import RULES, Step, bfs_path, canonicalize, rule_c1, rule_c2, rule_c3, rule_c4, rule_c5
from .core import OriginFunction, absorb_center_edges, build_core, peel, reduce_ray_degrees
from .star import (
    PathFamily,
    PipelineResult,
    Stage,
    StarResult,
    extract_star,
    find_star_immersion,
    length_bound,
    select_far_rays,
    separation,
    short_paths,
    trace_jsonl,
    trace_record,
)
from .triple import (
    PeeledReport,
    PipelineError,
    ReductionWitness,
    Triple,
    WellBehavedReport,
    check_peeled,
    check_reduction,
    check_well_behaved,
    identity_witness,
    is_peeled,
    m_sigma,
    make_witness,
    n_sigma,
    nonconforming_cut,
    small_cut,
)
