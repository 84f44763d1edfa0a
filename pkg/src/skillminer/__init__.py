"""Detect open-source contribution skills from repository activity archives."""

from .distributions import DistributionTable, at_or_above, build_distributions, percentile_value
from .evaluation import PrecisionReport, SelfAssessment, compute_precision, load_assessments
from .exclusion import LANGUAGES, ExclusionRuleSet, LanguageMap, build_rules_from_corpus, classify_language, is_excluded
from .model import ActivityArchive, Comment, Commit, FileChange, Issue, PullRequest, RepoRef, ThreadRef, UserRef, load_archive, save_archive
from .rating import SkillRating, SkillReport, build_report, rate

__version__ = "0.1.0"

__all__ = [
    "LANGUAGES",
    "ActivityArchive",
    "Comment",
    "Commit",
    "DistributionTable",
    "ExclusionRuleSet",
    "FileChange",
    "Issue",
    "LanguageMap",
    "PrecisionReport",
    "PullRequest",
    "RepoRef",
    "SelfAssessment",
    "SkillRating",
    "SkillReport",
    "ThreadRef",
    "UserRef",
    "at_or_above",
    "build_distributions",
    "build_report",
    "build_rules_from_corpus",
    "classify_language",
    "compute_precision",
    "is_excluded",
    "load_archive",
    "load_assessments",
    "percentile_value",
    "rate",
    "save_archive",
]
