"""Language classification and third-party code exclusion.

Files are assigned to one of the supported languages by extension. Whole
folder subtrees are dropped before line counting when a folder name is a
package-manager installation folder (for every language) or is one of the
folder names a corpus associates most often with that language and is also
an installation folder.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import PreconditionError, ValidationError

LANGUAGES = ("C", "C#", "Java", "JavaScript", "PHP", "Python", "Ruby", "Shell", "TypeScript")


def _data_text(name: str) -> str:
    return resources.files("skillminer").joinpath("data", name).read_text(encoding="utf-8")


def _extension(path: str) -> str:
    name = path.rsplit("/", 1)[-1]
    dot = name.rfind(".")
    if dot <= 0:
        return ""
    return name[dot:].lower()


def folder_segments(path: str) -> list[str]:
    """Directory names on the way to the file, excluding the file name."""
    return [s for s in path.split("/")[:-1] if s]


@dataclass(frozen=True)
class LanguageMap:
    extensions: Mapping[str, frozenset[str]]
    _by_extension: Mapping[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_ext: dict[str, str] = {}
        frozen = {}
        for language, exts in self.extensions.items():
            exts = frozenset(exts)
            for ext in exts:
                if not ext.startswith(".") or ext != ext.lower() or len(ext) < 2:
                    raise ValidationError(f"extension {ext!r} for {language} must be lowercase and dot-prefixed")
                if ext in by_ext:
                    raise ValidationError(f"extension {ext!r} maps to both {by_ext[ext]} and {language}")
                by_ext[ext] = language
            frozen[language] = exts
        object.__setattr__(self, "extensions", MappingProxyType(frozen))
        object.__setattr__(self, "_by_extension", MappingProxyType(by_ext))

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(self.extensions)

    def classify(self, path: str) -> str | None:
        return self._by_extension.get(_extension(path))


def default_language_map() -> LanguageMap:
    return LanguageMap(json.loads(_data_text("languages.json")))


def classify_language(path: str, language_map: LanguageMap) -> str | None:
    return language_map.classify(path)


@dataclass(frozen=True)
class ExclusionRuleSet:
    global_folders: frozenset[str]
    per_language_folders: Mapping[str, frozenset[str]] = field(default_factory=dict)
    version: str = ""

    def __post_init__(self):
        object.__setattr__(self, "global_folders", frozenset(self.global_folders))
        per_language = {lang: frozenset(names) for lang, names in self.per_language_folders.items()}
        object.__setattr__(self, "per_language_folders", MappingProxyType(per_language))
        for name in self.global_folders.union(*per_language.values()):
            if not name or "/" in name:
                raise ValidationError(f"folder name {name!r} must be a single path segment")

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "global_folders": sorted(self.global_folders),
            "per_language_folders": {
                lang: sorted(self.per_language_folders[lang]) for lang in sorted(self.per_language_folders)
            },
        }

    @property
    def identifier(self) -> str:
        digest = hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:12]
        return f"{self.version or 'rules'}:{digest}"


def rules_from_dict(data: Mapping) -> ExclusionRuleSet:
    try:
        global_folders = data["global_folders"]
        per_language = data.get("per_language_folders", {})
        if not isinstance(global_folders, list) or not isinstance(per_language, dict):
            raise TypeError
        return ExclusionRuleSet(
            frozenset(global_folders),
            {lang: frozenset(names) for lang, names in per_language.items()},
            str(data.get("version", "")),
        )
    except (KeyError, TypeError):
        raise ValidationError("rule file needs 'global_folders' (array) and 'per_language_folders' (object)") from None


def default_rules() -> ExclusionRuleSet:
    return rules_from_dict(json.loads(_data_text("exclusion_rules.json")))


def load_rules(path: str | os.PathLike) -> ExclusionRuleSet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return rules_from_dict(data)


def save_rules(rules: ExclusionRuleSet, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(rules.to_dict(), indent=2) + "\n", encoding="utf-8")


def is_excluded(path: str, rules: ExclusionRuleSet, language: str | None = None) -> bool:
    folders = folder_segments(path)
    if any(f in rules.global_folders for f in folders):
        return True
    if language is not None:
        per_language = rules.per_language_folders.get(language, frozenset())
        return any(f in per_language for f in folders)
    return False


def build_rules_from_corpus(
    file_trees: Iterable[tuple[str, Iterable[str]]],
    language_map: LanguageMap,
    package_manager_folders: Iterable[str],
    top_k: int = 50,
) -> ExclusionRuleSet:
    """Derive a rule set from repository file trees.

    For each language, folder names are ranked by the number of repositories
    in which they contain a file of that language; the ``top_k`` names (ties
    broken alphabetically) intersected with ``package_manager_folders`` become
    that language's rules.
    """
    if top_k < 1:
        raise PreconditionError("top_k must be at least 1")
    trees = list(file_trees)
    if not trees:
        raise PreconditionError("corpus is empty")
    installation = frozenset(package_manager_folders)

    counts: dict[str, Counter[str]] = {lang: Counter() for lang in language_map.languages}
    for _repo, paths in trees:
        seen: dict[str, set[str]] = {}
        for path in paths:
            language = language_map.classify(path)
            if language is None:
                continue
            seen.setdefault(language, set()).update(folder_segments(path))
        for language, names in seen.items():
            counts[language].update(names)

    per_language = {}
    for language, counter in counts.items():
        ranked = sorted(counter.items(), key=lambda item: (-item[1], item[0]))
        top = {name for name, _ in ranked[:top_k]}
        per_language[language] = frozenset(top & installation)
    return ExclusionRuleSet(installation, per_language, version="corpus")
