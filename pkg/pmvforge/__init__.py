from pmvforge.core.classify import ActivationGraph
from pmvforge.core.classify import ClassificationResult
from pmvforge.core.classify import ConditionReport
from pmvforge.core.classify import Weight
from pmvforge.core.classify import check_conditions
from pmvforge.core.classify import classify_multi
from pmvforge.core.classify import classify_psi
from pmvforge.core.classify import classify_single
from pmvforge.core.config import config
from pmvforge.core.elections import Distribution
from pmvforge.core.elections import Profile
from pmvforge.core.elections import VotingRule
from pmvforge.core.elections import loser
from pmvforge.core.elections import parse_profile
from pmvforge.core.elections import rankings
from pmvforge.core.elections import uniform_distribution
from pmvforge.core.elections import winner
from pmvforge.core.lp import LinearProgram
from pmvforge.core.lp import SearchExhaustedError
from pmvforge.core.lp import ilp_feasible
from pmvforge.core.lp import lp_solve
from pmvforge.core.montecarlo import EstimateResult
from pmvforge.core.montecarlo import SlopeFit
from pmvforge.core.montecarlo import VoterAssignment
from pmvforge.core.montecarlo import adversary_predicate
from pmvforge.core.montecarlo import data_adversary_feasible
from pmvforge.core.montecarlo import estimate
from pmvforge.core.montecarlo import fit_slope
from pmvforge.core.montecarlo import membership_predicate
from pmvforge.core.montecarlo import oracle_predicate
from pmvforge.core.montecarlo import read_scan
from pmvforge.core.montecarlo import round_mixture
from pmvforge.core.montecarlo import sample_histogram
from pmvforge.core.montecarlo import scan
from pmvforge.core.montecarlo import sup_estimate
from pmvforge.core.montecarlo import toy_likelihood
from pmvforge.core.montecarlo import wilson_interval
from pmvforge.core.montecarlo import write_scan
from pmvforge.core.oracles import CapExceededError
from pmvforge.core.oracles import InfluenceQuery
from pmvforge.core.oracles import OracleAnswer
from pmvforge.core.oracles import membership
from pmvforge.core.polyhedra import LiftedCone
from pmvforge.core.polyhedra import Polyhedron
from pmvforge.core.polyhedra import build_cone
from pmvforge.core.polyhedra import cone_dimension
from pmvforge.core.polyhedra import min_budget
from pmvforge.core.settings import PmvSetting
from pmvforge.core.settings import PriceTable
from pmvforge.core.settings import SettingFamily
from pmvforge.core.settings import VoteOperationSet
from pmvforge.core.settings import build_family
from pmvforge.core.settings import toy_family
from pmvforge.core.settings import toy_setting
from pmvforge.core.settings import vote_ops


# Discourage from pmvforge import *
__all__ = []


# Dynamically get the version of the installed module
try:
    import importlib.metadata

    __version__ = importlib.metadata.version(__name__)
except Exception:  # pragma: no cover
    importlib = None  # pragma: no cover
finally:
    del importlib
