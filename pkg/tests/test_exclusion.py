import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skillminer.errors import PreconditionError, ValidationError
from skillminer.exclusion import (
    LANGUAGES,
    ExclusionRuleSet,
    LanguageMap,
    build_rules_from_corpus,
    classify_language,
    default_language_map,
    default_rules,
    is_excluded,
    load_rules,
    save_rules,
)

CORPUS = Path(__file__).parent / "fixtures" / "corpus"
LMAP = default_language_map()


@pytest.mark.parametrize(
    "path, language",
    [
        ("src/main.py", "Python"),
        ("README.md", None),
        ("lib/app.ts", "TypeScript"),
        ("include/list.h", "C"),
        ("App.CS", "C#"),
        ("bin/run.bash", "Shell"),
        ("Makefile", None),
        (".bashrc", None),
    ],
)
def test_classify(path, language):
    assert classify_language(path, LMAP) == language


def test_default_map_has_nine_languages():
    assert set(LMAP.languages) == set(LANGUAGES)
    assert len(LANGUAGES) == 9


def test_language_map_rejects_shared_extension():
    with pytest.raises(ValidationError):
        LanguageMap({"A": {".x"}, "B": {".x"}})
    with pytest.raises(ValidationError):
        LanguageMap({"A": {"X"}})


def test_default_rules_exclude_installation_folders():
    rules = default_rules()
    assert {"node_modules", "vendor", "site-packages", "packages", "bower_components", ".bundle", "gems"} <= rules.global_folders
    assert is_excluded("node_modules/lodash/index.js", rules, "JavaScript")
    assert is_excluded("lib/python3.9/site-packages/requests/api.py", rules, "Python")
    assert not is_excluded("src/utils/helpers.py", rules)
    assert not is_excluded("src/utils/helpers.py", rules, "Python")


def test_file_name_itself_never_matches():
    assert not is_excluded("src/vendor", default_rules())


def test_per_language_rule_applies_only_to_its_language():
    rules = ExclusionRuleSet(frozenset(), {"Ruby": frozenset({"vendor"})})
    assert is_excluded("a/vendor/b/c.rb", rules, "Ruby")
    assert not is_excluded("a/vendor/b/c.rb", rules, "Python")
    assert not is_excluded("a/vendor/b/c.rb", rules)


def test_folder_matching_is_case_sensitive():
    assert not is_excluded("Node_Modules/x.js", default_rules())


def test_rules_reject_multi_segment_names():
    with pytest.raises(ValidationError):
        ExclusionRuleSet(frozenset({"a/b"}))


def test_rules_file_round_trip(tmp_path):
    rules = ExclusionRuleSet(frozenset({"vendor"}), {"Ruby": frozenset({"gems"})}, "t1")
    save_rules(rules, tmp_path / "r.json")
    loaded = load_rules(tmp_path / "r.json")
    assert loaded == rules
    assert loaded.identifier == rules.identifier


def test_rules_file_needs_keys(tmp_path):
    (tmp_path / "r.json").write_text('{"per_language_folders": {}}')
    with pytest.raises(ValidationError):
        load_rules(tmp_path / "r.json")


def test_corpus_site_packages():
    trees = [("r1", ["env/site-packages/req/api.py", "app/main.py"])]
    rules = build_rules_from_corpus(trees, LMAP, {"site-packages", "node_modules"})
    assert "site-packages" in rules.per_language_folders["Python"]


def test_corpus_without_overlap():
    trees = [("r1", ["src/a.py"]), ("r2", ["lib/b.js"])]
    installation = {"node_modules", "vendor"}
    rules = build_rules_from_corpus(trees, LMAP, installation)
    assert all(not names for names in rules.per_language_folders.values())
    assert rules.global_folders == installation


def test_corpus_counts_each_repo_once():
    # "vendor" appears in many files of one repo, "deps" once in each of two repos
    trees = [("r1", [f"vendor/x{n}.rb" for n in range(10)] + ["deps/a.rb"]), ("r2", ["deps/b.rb"])]
    rules = build_rules_from_corpus(trees, LMAP, {"vendor", "deps"}, top_k=1)
    assert rules.per_language_folders["Ruby"] == {"deps"}


def test_corpus_tie_break_is_lexicographic():
    trees = [("r1", ["zeta/a.rb", "alpha/b.rb"])]
    rules = build_rules_from_corpus(trees, LMAP, {"zeta", "alpha"}, top_k=1)
    assert rules.per_language_folders["Ruby"] == {"alpha"}


def test_corpus_preconditions():
    with pytest.raises(PreconditionError):
        build_rules_from_corpus([], LMAP, {"vendor"})
    with pytest.raises(PreconditionError):
        build_rules_from_corpus([("r", ["a.py"])], LMAP, {"vendor"}, top_k=0)


def test_corpus_fixture_matches_brute_force():
    corpus = json.loads((CORPUS / "corpus.json").read_text())
    expected = json.loads((CORPUS / "expected.json").read_text())
    trees = list(corpus["repos"].items())
    rules = build_rules_from_corpus(trees, LMAP, corpus["package_manager_folders"], top_k=corpus["top_k"])
    assert sorted(rules.global_folders) == expected["global_folders"]
    assert {k: sorted(v) for k, v in rules.per_language_folders.items()} == expected["per_language_folders"]


# --- properties --------------------------------------------------------------

segment = st.text(alphabet="abcdefgnoprstuv_-.", min_size=1, max_size=6).filter(lambda s: s not in (".", ".."))
folder_names = st.sampled_from(["node_modules", "vendor", "gems", "lib", "src", "deps", "a", "b"])
paths = st.lists(st.one_of(folder_names, segment), min_size=1, max_size=6).map("/".join)
rule_sets = st.builds(
    lambda g, per: ExclusionRuleSet(frozenset(g), per),
    st.sets(st.one_of(folder_names, segment), max_size=4),
    st.dictionaries(st.sampled_from(LANGUAGES), st.frozensets(st.one_of(folder_names, segment), max_size=3), max_size=3),
)
languages = st.one_of(st.none(), st.sampled_from(LANGUAGES))


@given(paths, rule_sets, languages, st.lists(segment, min_size=1, max_size=3).map("/".join))
def test_subtree_property(path, rules, language, suffix):
    if is_excluded(path, rules, language):
        assert is_excluded(f"{path}/{suffix}", rules, language)


@given(paths, rule_sets, languages, st.one_of(folder_names, segment), st.booleans())
def test_adding_a_folder_never_unexcludes(path, rules, language, extra, as_global):
    before = is_excluded(path, rules, language)
    if as_global:
        bigger = ExclusionRuleSet(rules.global_folders | {extra}, rules.per_language_folders)
    else:
        per = dict(rules.per_language_folders)
        lang = language or LANGUAGES[0]
        per[lang] = per.get(lang, frozenset()) | {extra}
        bigger = ExclusionRuleSet(rules.global_folders, per)
    assert is_excluded(path, bigger, language) >= before


@given(paths)
def test_classification_is_consistent_with_map(path):
    language = classify_language(path, LMAP)
    if language is not None:
        assert any(path.lower().endswith(ext) for ext in LMAP.extensions[language])
        assert sum(any(path.lower().endswith(e) for e in LMAP.extensions[lang]) for lang in LMAP.languages) == 1
