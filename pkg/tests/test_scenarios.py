import json
import logging
import random
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from divlab.errors import AlphabetMismatchError, AnswerOutOfRangeError, DivlabError, UnknownQuestionError
from divlab.pmf import validate
from divlab.scenarios import (
    CATEGORIES,
    CategoryBands,
    ScenarioBundle,
    SurveyRecord,
    User,
    analyze_survey,
    categorize_answer,
    category_benefit,
    load_bundle,
    read_survey_csv,
    run_scenario,
)

FIXTURES = resources.files("divlab") / "fixtures"
SURVEY = json.loads((FIXTURES / "survey" / "london.json").read_text())
BANDS = {q: CategoryBands(v["xi"]) for q, v in SURVEY["questions"].items()}


def bundle(name):
    return load_bundle(FIXTURES / "scenarios" / f"{name}.json")


def by_user(rows, measure):
    return {r.user: r for r in rows if r.measure.label == measure}


class TestCategorize:
    @pytest.mark.parametrize("answer,cat", [(21, "spot_on"), (18, "spot_on"), (30, "close"),
                                            (13, "close"), (12, "wild_guess"), (33, "wild_guess"),
                                            (240, "wild_guess")])
    def test_examples(self, answer, cat):
        assert categorize_answer(answer, CategoryBands(20)) == cat

    @given(st.integers(8, 244))
    def test_total_on_alphabet(self, xi):
        b = CategoryBands(xi)
        cats = [b.categorize(a) for a in range(1, 257)]
        assert set(cats) <= set(CATEGORIES)
        assert cats.count("spot_on") == 5 and cats.count("close") == 15

    @pytest.mark.parametrize("answer", [0, 257])
    def test_out_of_range(self, answer):
        with pytest.raises(AnswerOutOfRangeError):
            CategoryBands(20).categorize(answer)

    def test_representatives(self):
        assert [CategoryBands(20).representative(c) for c in CATEGORIES] == [20, 23, 256]
        assert CategoryBands(240).representative("wild_guess") == 1


class TestCategoryBenefit:
    @pytest.mark.parametrize("measure", ["js", "dnew:k=1", "dnew:k=2", "dncm:k=1", "dncm:k=2"])
    def test_published_values(self, measure):
        want = SURVEY["expected"]["category_benefit"]["values"][measure]
        for cat, v in want.items():
            assert category_benefit(CategoryBands(20), cat, measure).benefit == pytest.approx(v, abs=0.01)

    def test_against_oracle(self):
        gt = oracle.london_pmf(20)
        p = oracle.one_hot(256, 22)
        want = oracle.entropy(gt) - 8 * oracle.dnew(p, gt, 2)
        assert category_benefit(CategoryBands(20), "close", "dnew:k=2").benefit == pytest.approx(want, abs=1e-12)

    def test_only_final_measure_is_positive_when_spot_on(self):
        signs = {m: category_benefit(CategoryBands(20), "spot_on", m).benefit > 0
                 for m in ("js", "dnew:k=1", "dnew:k=2", "dncm:k=1", "dncm:k=2")}
        assert [m for m, s in signs.items() if s] == ["dnew:k=2"]


@pytest.fixture(scope="module")
def kcl():
    return read_survey_csv(FIXTURES / "survey" / "kcl.csv")


class TestSurvey:
    def test_q1(self, kcl):
        r = analyze_survey(kcl, BANDS, "dnew:k=2")["Q1"]
        assert r.counts == {"spot_on": 4, "close": 5, "wild_guess": 3}
        assert r.mean_benefit == pytest.approx(0.105, abs=0.01)
        assert r.mean_time == pytest.approx(9.27, abs=0.01)
        assert r.ratio == pytest.approx(0.0113, abs=0.0005)

    def test_q3_js(self, kcl):
        assert analyze_survey(kcl, BANDS, "js")["Q3"].mean_benefit == pytest.approx(-3.789, abs=0.01)

    def test_published_counts(self, kcl):
        reports = analyze_survey(kcl, BANDS, "dnew:k=2")
        for q, want in SURVEY["expected"]["survey"]["questions"].items():
            assert [reports[q].counts[c] for c in CATEGORIES] == want["counts"]
        assert list(reports) == ["Q1", "Q2", "Q3", "Q4"]

    def test_strict_rebanding(self, kcl):
        reports = analyze_survey(kcl, BANDS, "dnew:k=2", strict=True)
        assert [reports["Q2"].counts[c] for c in CATEGORIES] == [2, 8, 2]
        assert [reports["Q3"].counts[c] for c in CATEGORIES] == [1, 2, 9]

    def test_mean_is_count_weighted(self, kcl):
        r = analyze_survey(kcl, BANDS, "js")["Q4"]
        want = sum(r.counts[c] * r.category_benefits[c] for c in CATEGORIES) / 12
        assert r.mean_benefit == pytest.approx(want, abs=1e-12)

    def test_empty(self):
        assert analyze_survey([], BANDS, "js") == {}

    def test_order_invariant(self, kcl):
        shuffled = list(kcl)
        random.Random(5).shuffle(shuffled)
        a = analyze_survey(kcl, BANDS, "dnew:k=2")
        b = analyze_survey(shuffled, BANDS, "dnew:k=2")
        for q in a:
            assert a[q].counts == b[q].counts
            assert a[q].mean_benefit == pytest.approx(b[q].mean_benefit, abs=1e-12)
            assert a[q].mean_time == pytest.approx(b[q].mean_time, abs=1e-12)

    def test_unknown_question(self):
        with pytest.raises(UnknownQuestionError):
            analyze_survey([SurveyRecord("P1", "Q9", 10, 5.0)], BANDS, "js")

    def test_second_cohort_loads(self):
        recs = read_survey_csv(FIXTURES / "survey" / "oxford.csv")
        assert {r.surveyee for r in recs} == {"P13", "P14", "P15", "P16"}
        assert set(analyze_survey(recs, BANDS, "dnew:k=2")) == {"Q1", "Q2", "Q3", "Q4"}

    def test_clamps_large_answers(self, tmp_path, caplog):
        path = tmp_path / "s.csv"
        path.write_text("surveyee,question,answer_minutes,response_time_seconds\nP1,Q1,300,4.0\n")
        with caplog.at_level(logging.WARNING):
            (rec,) = read_survey_csv(path)
        assert rec.answer == 256 and "clamped" in caplog.text

    def test_record_validation(self):
        with pytest.raises(AnswerOutOfRangeError):
            SurveyRecord("P1", "Q1", 0, 1.0)
        with pytest.raises(DivlabError):
            SurveyRecord("P1", "Q1", 5, 0.0)
        with pytest.raises(DivlabError):
            SurveyRecord("P1", "Q1", 5, 1.0, "nearby")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("who,q,a\nP1,Q1,3\n")
        with pytest.raises(DivlabError):
            read_survey_csv(path)


class TestArteries:
    @pytest.mark.parametrize("measure", ["js", "dnew:k=2", "dncm:k=1", "dncm:k=2"])
    def test_ordering_c_d_a_b(self, measure):
        d = {u: r.divergence.total for u, r in by_user(run_scenario(bundle("arteries")), measure).items()}
        assert d["C"] > d["D"] > d["A"] > d["B"]
        assert d["A"] > 3 * d["B"]

    def test_ordering_dnew1(self):
        d = {u: r.divergence.total for u, r in by_user(run_scenario(bundle("arteries")), "dnew:k=1").items()}
        assert d["A"] > d["D"] > d["C"] > d["B"]

    def test_only_b_has_positive_benefit(self):
        rows = run_scenario(bundle("arteries"))
        assert {r.user for r in rows if r.benefit.benefit > 0} == {"B"}

    def test_dnew2_c_cell_is_derived(self):
        c = by_user(run_scenario(bundle("arteries")), "dnew:k=2")["C"]
        assert c.divergence.total == pytest.approx(oracle.dnew([0, 0, 1, 0], [0.1, 0.878, 0.002, 0.02], 2), abs=1e-12)
        assert c.benefit.benefit == pytest.approx(-1.097, abs=0.005)


class TestAbcd:
    MEASURES = {"js": oracle.js, "dnew:k=2": lambda p, q: oracle.dnew(p, q, 2),
                "dncm:k=1": lambda p, q: oracle.dncm(p, q, 1)}

    @pytest.mark.parametrize("name", ["abcd-correct", "abcd-biased"])
    def test_against_oracle(self, name):
        b = bundle(name)
        gt = list(b.ground_truth.p)
        for row in run_scenario(b, list(self.MEASURES)):
            want = self.MEASURES[row.measure.label](list(b.user(row.user).pmf.p), gt)
            assert row.divergence.total == pytest.approx(want, abs=1e-12)

    def test_k2_measures_stay_small(self):
        rows = run_scenario(bundle("abcd-correct")) + run_scenario(bundle("abcd-biased"))
        small = {(r.user, r.measure.label) for r in rows if r.divergence.total < 0.1}
        assert all((r.user, "dncm:k=2") in small for r in rows)
        assert {u for u, m in small if m == "dnew:k=2"} == {"CG", "CU", "CB", "BS", "BM"}

    def test_biased_process_user_exceeds_small_threshold(self):
        bg = by_user(run_scenario(bundle("abcd-biased")), "dnew:k=2")["BG"]
        assert bg.divergence.total == pytest.approx(0.1097, abs=5e-5)


def test_goodbad_js():
    rows = by_user(run_scenario(bundle("goodbad")), "js")
    assert rows["UC"].divergence.total == pytest.approx(0.010, abs=0.0005)
    assert rows["OC"].divergence.total == pytest.approx(0.014, abs=0.0005)
    assert rows["LD"].divergence.total > rows["FD"].divergence.total > rows["RG"].divergence.total


def test_every_fixture_loads():
    names = sorted(p.name[:-5] for p in (FIXTURES / "scenarios").iterdir() if p.name.endswith(".json"))
    assert len(names) == 10
    for n in names:
        assert run_scenario(bundle(n))
    volvis = (FIXTURES / "survey" / "volvis.csv").read_text().splitlines()
    assert volvis[0] == "surveyee,question,answer"


def test_without_process_output_there_is_no_benefit():
    rows = run_scenario(bundle("table2-scenario4"))
    assert all(r.benefit is None for r in rows)


class TestBundleValidation:
    GT = validate([0.5, 0.5], letters="ab")

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            ScenarioBundle("x", self.GT, (User("u", validate([0.5, 0.5])),), ())

    def test_hmax_too_small(self):
        with pytest.raises(DivlabError):
            ScenarioBundle("x", self.GT, (), (), hmax=0.5)

    def test_unknown_user(self):
        with pytest.raises(KeyError):
            ScenarioBundle("x", self.GT, (), ()).user("nobody")
