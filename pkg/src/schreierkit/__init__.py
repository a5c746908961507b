"""Schreier families, Tsirelson-type norms and S_xi-singularity probes at desk scale."""

from .errors import CapExceeded, OrdinalOverflowError, PreconditionError, SchreierKitError, VerificationError
from .ordinal import CANONICAL, OMEGA, FundamentalPolicy, Ordinal
from .schreier import Compose, Power, Relabel, Schreier, Subsequence, enumerate_family, member
from .tsirelson import NormSpec, SparseVector, norm
from .averages import WeightedSet, claim1_witness, repeated_average, verify_smallness
from .treerank import monotone_embeds, rank
from .probe import Operator, inclusion_ratio_check, min_gain, sxi_singularity

__version__ = "0.1.0"

__all__ = [
    "CANONICAL",
    "OMEGA",
    "CapExceeded",
    "Compose",
    "FundamentalPolicy",
    "NormSpec",
    "Operator",
    "Ordinal",
    "OrdinalOverflowError",
    "Power",
    "PreconditionError",
    "Relabel",
    "Schreier",
    "SchreierKitError",
    "SparseVector",
    "Subsequence",
    "VerificationError",
    "WeightedSet",
    "claim1_witness",
    "enumerate_family",
    "inclusion_ratio_check",
    "member",
    "min_gain",
    "monotone_embeds",
    "norm",
    "rank",
    "repeated_average",
    "sxi_singularity",
    "verify_smallness",
]
