"""Streaming fair max-min diversity maximization."""

from .core import (
    Element,
    FairSolution,
    GroupedDataset,
    InfeasibleError,
    InputError,
    Metric,
    distance,
    diversity,
    extremal_distances,
    make_element,
    set_distance,
)
from .guesses import Candidate, CandidateBank, GuessLadder, StreamingDiversity, build_ladder, sdm_finalize
from .offline import OracleResult, brute_force_opt, gmm
from .sfdm1 import SFDM1
from .sfdm2 import SFDM2

__version__ = "0.1.0"
