from .base import (
    COMMITMENT,
    DEFAULT_CONFIG,
    PRACTICES,
    SIGNAL_CODES,
    TEACHING,
    SignalConfig,
    SignalId,
    SignalResult,
    language_skill,
    signal_ids,
    skill_family,
)
from .commitment import eval_commitment
from .language import eval_language
from .practices import eval_practices
from .teaching import eval_teaching
from .toxicity import LexiconScorer, ToxicityScorer, default_scorer, load_lexicon

__all__ = [
    "COMMITMENT",
    "DEFAULT_CONFIG",
    "PRACTICES",
    "SIGNAL_CODES",
    "TEACHING",
    "LexiconScorer",
    "SignalConfig",
    "SignalId",
    "SignalResult",
    "ToxicityScorer",
    "default_scorer",
    "eval_commitment",
    "eval_language",
    "eval_practices",
    "eval_teaching",
    "language_skill",
    "load_lexicon",
    "signal_ids",
    "skill_family",
]
