"""Agreement between tool ratings and self-assessed skill levels.

Precision at threshold ``t`` is taken over users who rate themselves above
``t`` and asks how often the tool also rates them above ``t``. The classical
variant, conditioned on the tool's positives instead, is available with
``direction="tool"``.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

from .errors import AssessmentParseError, PreconditionError, ValidationError
from .exclusion import LANGUAGES
from .model import login_key
from .rating import SkillReport, skill_order
from .signals import language_skill

THRESHOLDS = (0, 3)
HEADER = ["login", "skill", "self_level"]
Direction = Literal["self", "tool"]

KNOWN_SKILLS = frozenset(skill_order(LANGUAGES))


@dataclass(frozen=True)
class SelfAssessment:
    login: str
    skill: str
    self_level: int

    def __post_init__(self):
        if not 0 <= self.self_level <= 5:
            raise ValidationError(f"self_level {self.self_level} for {self.login} is outside 0-5")


@dataclass(frozen=True)
class PrecisionReport:
    skill: str
    threshold: int
    numerator: int
    denominator: int

    @property
    def precision(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def to_dict(self) -> dict:
        return {
            "skill": self.skill,
            "threshold": self.threshold,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "precision": round(float(self.precision), 6),
        }


@dataclass(frozen=True)
class PrecisionResult:
    threshold: int
    direction: str
    reports: tuple[PrecisionReport, ...]
    remarks: tuple[str, ...] = ()
    supplementary: tuple[dict, ...] = field(default=(), compare=False)

    def get(self, skill: str) -> PrecisionReport | None:
        return next((r for r in self.reports if r.skill == skill), None)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "direction": self.direction,
            "precision": [r.to_dict() for r in self.reports],
            "remarks": list(self.remarks),
            "supplementary": list(self.supplementary),
        }


def _canonical_skill(raw: str) -> str | None:
    name = raw.strip().lower()
    if name.startswith("lang:"):
        name = language_skill(name[5:])
    return name if name in KNOWN_SKILLS else None


def load_assessments(path: str | os.PathLike) -> list[SelfAssessment]:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != HEADER:
            raise AssessmentParseError(f"header must be {','.join(HEADER)}", row=1)
        out = []
        seen = set()
        for row_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise AssessmentParseError(f"expected 3 fields, got {len(row)}", row=row_number)
            login, skill_raw, level_raw = (cell.strip() for cell in row)
            if not login:
                raise AssessmentParseError("empty login", row=row_number)
            skill = _canonical_skill(skill_raw)
            if skill is None:
                raise AssessmentParseError(f"unknown skill {skill_raw!r}", row=row_number)
            try:
                level = int(level_raw)
            except ValueError:
                raise AssessmentParseError(f"self_level {level_raw!r} is not an integer", row=row_number) from None
            if not 0 <= level <= 5:
                raise AssessmentParseError(f"self_level {level} is outside 0-5", row=row_number)
            key = (login_key(login), skill)
            if key in seen:
                raise AssessmentParseError(f"duplicate assessment for {login} / {skill}", row=row_number)
            seen.add(key)
            out.append(SelfAssessment(login, skill, level))
    return out


def _f1(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(0) if a + b == 0 else 2 * a * b / (a + b)


def compute_precision(
    assessments: Iterable[SelfAssessment],
    reports: Mapping[str, SkillReport],
    threshold: int,
    direction: Direction = "self",
) -> PrecisionResult:
    if threshold not in THRESHOLDS:
        raise PreconditionError(f"threshold must be one of {THRESHOLDS}")
    if direction not in ("self", "tool"):
        raise PreconditionError("direction must be 'self' or 'tool'")
    by_login = {login_key(login): report for login, report in reports.items()}

    pairs: dict[str, list[tuple[int, int]]] = {}
    seen = set()
    for a in assessments:
        key = (login_key(a.login), a.skill)
        if key in seen:
            raise ValidationError(f"duplicate assessment for {a.login} / {a.skill}")
        seen.add(key)
        report = by_login.get(login_key(a.login))
        if report is None:
            raise ValidationError(f"no skill report for assessed login {a.login!r}")
        rating = report.rating(a.skill)
        if rating is None:
            raise ValidationError(f"report for {a.login!r} has no rating for {a.skill}")
        pairs.setdefault(a.skill, []).append((a.self_level, rating.level))

    order = {skill: n for n, skill in enumerate(skill_order(LANGUAGES))}
    out, remarks, extra = [], [], []
    for skill in sorted(pairs, key=order.__getitem__):
        levels = pairs[skill]
        self_pos = sum(1 for s, _ in levels if s > threshold)
        tool_pos = sum(1 for _, t in levels if t > threshold)
        both = sum(1 for s, t in levels if s > threshold and t > threshold)
        den = self_pos if direction == "self" else tool_pos
        if den == 0:
            who = "self_level" if direction == "self" else "tool level"
            remarks.append(f"{skill}: no users with {who} > {threshold}; omitted")
            continue
        out.append(PrecisionReport(skill, threshold, both, den))
        if self_pos and tool_pos:
            other = Fraction(both, tool_pos if direction == "self" else self_pos)
            extra.append(
                {
                    "skill": skill,
                    "other_direction": f"{other.numerator}/{other.denominator}",
                    "f1": round(float(_f1(Fraction(both, den), other)), 6),
                }
            )
    return PrecisionResult(threshold, direction, tuple(out), tuple(remarks), tuple(extra))


def render_precision(results: Sequence[PrecisionResult]) -> str:
    lines = [f"{'skill':<16}{'threshold':<11}{'agree':>7}{'total':>7}{'precision':>11}"]
    for result in results:
        for r in result.reports:
            lines.append(f"{r.skill:<16}{'>' + str(r.threshold):<11}{r.numerator:>7}{r.denominator:>7}{float(r.precision):>11.2f}")
    for result in results:
        for remark in result.remarks:
            lines.append(f"# {remark}")
    return "\n".join(lines) + "\n"
