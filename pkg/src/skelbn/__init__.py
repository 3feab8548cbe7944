"""Structure learning for discrete Bayesian networks.

The central piece is a search operator that alternates between DAGs and
their skeletons: the current DAG is stripped to its skeleton and all edge
orientations are re-derived from the data, colliders first, so several
edges can flip in one move. Around it sit decomposable BIC/BDeu scoring,
the skeleton search strategy with K2 and hill-climbing baselines,
posterior-mean parameter fitting, ancestral sampling, and KL-based
cross-validation.
"""

__version__ = "0.1.0"

from .bn import (
    BayesNet,
    Cpt,
    XvReport,
    cross_validate,
    fit_parameters,
    joint_log_prob,
    joint_log_prob_rows,
    kl_divergence,
    load_network,
    random_network,
    sample,
    save_network,
)
from .dataset import (
    ContingencyTable,
    DataTable,
    Schema,
    Variable,
    counts,
    load_csv,
    load_schema,
    marginalize,
    save_schema,
    write_csv,
)
from .errors import InputError, InternalBoundError
from .graph import (
    Dag,
    EdgeMark,
    EquivalenceSignature,
    Pdag,
    Skeleton,
    extract_dag,
    random_dag,
    signature,
    structural_errors,
    to_dot,
    to_edge_list_text,
    to_skeleton,
    would_create_cycle,
)
from .orient import (
    collider_alternative_scores,
    collider_score,
    complete_orientation,
    fix_orientations,
    orient_colliders,
    propose_orientations,
    reorient,
)
from .scores import (
    ScoreCache,
    ScoreConfig,
    degrees_of_freedom,
    edge_gain,
    family_score,
    loglik_ratio,
    total_score,
)
from .search import (
    SearchConfig,
    SearchResult,
    backward_elimination,
    enumerate_dags,
    exhaustive_search,
    forward_step,
    k2_search,
    local_search,
    run_search,
    skeleton_search,
)

__all__ = [
    "BayesNet", "Cpt", "XvReport", "cross_validate", "fit_parameters",
    "joint_log_prob", "joint_log_prob_rows", "kl_divergence", "load_network",
    "random_network", "sample", "save_network",
    "ContingencyTable", "DataTable", "Schema", "Variable", "counts",
    "load_csv", "load_schema", "marginalize", "save_schema", "write_csv",
    "InputError", "InternalBoundError",
    "Dag", "EdgeMark", "EquivalenceSignature", "Pdag", "Skeleton",
    "extract_dag", "random_dag", "signature", "structural_errors", "to_dot",
    "to_edge_list_text", "to_skeleton", "would_create_cycle",
    "collider_alternative_scores", "collider_score", "complete_orientation", "fix_orientations",
    "orient_colliders", "propose_orientations", "reorient",
    "ScoreCache", "ScoreConfig", "degrees_of_freedom", "edge_gain",
    "family_score", "loglik_ratio", "total_score",
    "SearchConfig", "SearchResult", "backward_elimination", "enumerate_dags",
    "exhaustive_search", "forward_step", "k2_search", "local_search",
    "run_search", "skeleton_search",
    "__version__",
]
