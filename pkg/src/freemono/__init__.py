"""freemono: decide injective-endomorphism equations f(u) = v in free groups."""

from .decider import (
    DecideError,
    Verdict,
    Witness,
    decide,
    decide_multi,
    image_rank,
    oracle,
)
from .stallings import CoreGraph, build
from .subgroup_search import (
    Candidate,
    Skeleton,
    enumerate_skeletons,
    generate_candidates,
)
from .whitehead import OrbitCertificate, WhiteheadAut, equivalent, minimize
from .words import (
    FreeGroup,
    Word,
    WordError,
    abelianize,
    concat,
    conjugate,
    cyclic_core,
    cyclic_min,
    cyclic_reduce,
    format_word,
    invert,
    parse_word,
    power,
    primitive_root,
    reduce,
    substitute,
)

__all__ = [
    "Candidate",
    "CoreGraph",
    "DecideError",
    "FreeGroup",
    "OrbitCertificate",
    "Skeleton",
    "Verdict",
    "WhiteheadAut",
    "Witness",
    "Word",
    "WordError",
    "abelianize",
    "build",
    "concat",
    "conjugate",
    "cyclic_core",
    "cyclic_min",
    "cyclic_reduce",
    "decide",
    "decide_multi",
    "enumerate_skeletons",
    "equivalent",
    "format_word",
    "generate_candidates",
    "image_rank",
    "invert",
    "minimize",
    "oracle",
    "parse_word",
    "power",
    "primitive_root",
    "reduce",
    "substitute",
]

__version__ = "0.1.0"
