import json

import pytest
from builders import AS_OF, ArchiveBuilder, days_ago, table
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_force_percentile

from skillminer.distributions import (
    COMMITS_PER_REPO,
    FOLLOWERS,
    DistributionTable,
    at_or_above,
    build_distributions,
    lines_changed_metric,
    load_tables,
    percentile_value,
    save_tables,
    table_filename,
)
from skillminer.errors import PreconditionError, UnknownUserError, UnusableTableError, ValidationError
from skillminer.exclusion import default_language_map, default_rules

PY = lines_changed_metric("Python")


def build(archive, population, **kw):
    return build_distributions(archive, population, default_rules(), default_language_map(), AS_OF, **kw)


def two_python_users():
    b = ArchiveBuilder()
    b.commit("ann", "ann/x", days_ago(10), [("src/a.py", 6, 4)])
    b.commit("bo", "bo/y", days_ago(9), [("b.py", 20, 0), ("lib/c.py", 5, 5), ("node_modules/z/d.py", 99, 0)])
    return b.build()


def test_python_lines_hand_summed():
    tables = build(two_python_users(), ["ann", "bo"])
    assert tables[PY].samples == (10, 30)


def test_zero_users_contribute_zero_language_samples():
    tables = build(two_python_users(), ["ann", "bo"])
    assert tables[lines_changed_metric("Ruby")].samples == (0, 0)


def test_nonzero_baselines_switch():
    tables = build(two_python_users(), ["ann", "bo"], nonzero_baselines=True)
    assert tables[lines_changed_metric("Ruby")].samples == ()
    assert tables[PY].samples == (10, 30)


def test_inactive_population_has_unusable_commit_table():
    b = ArchiveBuilder()
    b.user("ann")
    b.user("bo")
    tables = build(b.build(), ["ann", "bo"])
    assert tables[COMMITS_PER_REPO].samples == ()
    assert not tables[COMMITS_PER_REPO].usable
    with pytest.raises(UnusableTableError):
        percentile_value(tables[COMMITS_PER_REPO], 75)


def test_followers_sorted():
    b = ArchiveBuilder()
    b.user("a", 7)
    b.user("b", 0)
    b.user("c", 5)
    assert build(b.build(), ["a", "b", "c"])[FOLLOWERS].samples == (0, 5, 7)


def test_commits_per_repo_one_sample_per_pair():
    b = ArchiveBuilder()
    for n in range(3):
        b.commit("ann", "ann/x", days_ago(10 + n))
    b.commit("ann", "bo/y", days_ago(5))
    b.commit("bo", "bo/y", days_ago(5))
    b.commit("bo", "bo/y", AS_OF)
    assert build(b.build(), ["ann", "bo"])[COMMITS_PER_REPO].samples == (1, 2, 3)


def test_records_after_as_of_ignored():
    b = ArchiveBuilder()
    b.commit("ann", "ann/x", days_ago(10), [("a.py", 3, 0)])
    b.commit("ann", "ann/x", days_ago(1), [("a.py", 100, 0)])
    b.user("bo")
    tables = build_distributions(b.build(), ["ann", "bo"], default_rules(), default_language_map(), days_ago(5))
    assert tables[PY].samples == (0, 3)
    assert tables[PY].built_at == days_ago(5)


def test_population_errors():
    archive = two_python_users()
    with pytest.raises(PreconditionError):
        build(archive, ["ann"])
    with pytest.raises(UnknownUserError):
        build(archive, ["ann", "ghost"])
    with pytest.raises(PreconditionError):
        build(archive, ["ann", "ANN"])


@pytest.mark.parametrize(
    "samples, p, expected",
    [([1, 2, 3, 4], 75, 3), ([5, 5], 100, 5), ([0, 10], 20, 0), ([0, 5], 75, 5), ([10, 20, 30, 40, 50], 60, 30),
     ([10, 20, 30, 40, 50], 80, 40)],
)
def test_percentile_examples(samples, p, expected):
    assert percentile_value(table("m", samples), p) == expected


def test_at_or_above_examples():
    assert at_or_above(table("m", [1, 2, 3, 4]), 3, 75)
    assert not at_or_above(table("m", [3, 8, 9]), 0, 20)
    assert at_or_above(table("m", [3, 8, 9]), 9, 80)


@pytest.mark.parametrize("p", [0, -1, 100.5, True])
def test_percentile_range(p):
    with pytest.raises(PreconditionError):
        percentile_value(table("m", [1, 2]), p)


def test_table_invariants():
    with pytest.raises(ValidationError):
        DistributionTable("m", (3, 1), 2, AS_OF)
    with pytest.raises(ValidationError):
        DistributionTable("m", (1, 3), 3, AS_OF)
    with pytest.raises(ValidationError):
        DistributionTable("m", (-1, 3), 2, AS_OF)


def test_tables_round_trip(tmp_path):
    tables = build(two_python_users(), ["ann", "bo"])
    save_tables(tables, tmp_path)
    assert load_tables(tmp_path) == tables
    assert (tmp_path / table_filename(lines_changed_metric("C#"))).name == "lines_changed_csharp.json"
    data = json.loads((tmp_path / "followers.json").read_text())
    assert set(data) == {"metric_id", "samples", "population_size", "built_at", "source_note"}


sample_lists = st.lists(st.integers(min_value=0, max_value=1000), min_size=2, max_size=50)
percents = st.integers(min_value=1, max_value=100)


@given(sample_lists, percents)
def test_percentile_matches_brute_force(samples, p):
    assert percentile_value(table("m", samples), p) == brute_force_percentile(samples, p)


@given(sample_lists, percents, percents)
def test_percentile_monotone_in_p(samples, p, q):
    t = table("m", samples)
    lo, hi = sorted((p, q))
    assert percentile_value(t, lo) <= percentile_value(t, hi)
    assert percentile_value(t, p) in samples


@given(sample_lists, st.integers(min_value=0, max_value=1000), st.integers(min_value=0, max_value=1000), percents, percents)
def test_at_or_above_monotone(samples, v, w, p, q):
    t = table("m", samples)
    lo_v, hi_v = sorted((v, w))
    lo_p, hi_p = sorted((p, q))
    assert at_or_above(t, lo_v, p) <= at_or_above(t, hi_v, p)
    assert at_or_above(t, v, hi_p) <= at_or_above(t, v, lo_p)
