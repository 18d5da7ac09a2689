"""Decision support for requirements engineers: does the SRS need another pass?

The package bundles a small exact-inference engine for discrete Bayesian
networks, the pre-calibrated eleven-variable Requisites network that
predicts the need for a further revision cycle, metric extractors that
turn raw project data into network evidence, and an HTTP facade plus CLI
for interactive what-if analysis.
"""

from .bn import (
    BayesianNetwork,
    BayesNetError,
    ClassObserved,
    Cpt,
    CptMismatch,
    CycleDetected,
    Factor,
    IllegalState,
    IncompleteAssignment,
    InconsistentEvidence,
    NetworkStructure,
    Posterior,
    RowNotNormalized,
    UnknownVariable,
    Variable,
    build_network,
    joint_probability,
    map_predict,
    markov_blanket,
    posterior,
    prior_marginals,
)
from .calibrate import (
    CalibrationConstraint,
    CalibrationResult,
    calibrate,
    objective,
)
from .model import (
    CLASS_VARIABLE,
    EDGES,
    VARIABLES,
    CptParamSet,
    build_requisites,
    default_network,
    default_params,
    evidence_trajectory,
    initial_params,
)

__version__ = "0.1.0"

__all__ = [
    "BayesianNetwork",
    "BayesNetError",
    "CLASS_VARIABLE",
    "CalibrationConstraint",
    "CalibrationResult",
    "ClassObserved",
    "Cpt",
    "CptMismatch",
    "CptParamSet",
    "CycleDetected",
    "EDGES",
    "Factor",
    "IllegalState",
    "IncompleteAssignment",
    "InconsistentEvidence",
    "NetworkStructure",
    "Posterior",
    "RowNotNormalized",
    "UnknownVariable",
    "VARIABLES",
    "Variable",
    "build_network",
    "build_requisites",
    "calibrate",
    "default_network",
    "default_params",
    "evidence_trajectory",
    "initial_params",
    "joint_probability",
    "map_predict",
    "markov_blanket",
    "objective",
    "posterior",
    "prior_marginals",
]
