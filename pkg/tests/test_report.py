"""Validation report generators: phase ordering, ACH ordering, density,
correlation, yearly trends, and the heatmap grid."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transprog.errors import ReportError
from transprog.report import (
    ach_report,
    correlation,
    density,
    group_by_phase,
    heatmap_grid,
    phase_report,
    yearly_trend,
)
from transprog.score import TpRecord


def _rec(doc_id="d", tpe=None, tpd=None, ach="none", year=0, n=1) -> TpRecord:
    return TpRecord(doc_id=doc_id, tpe=tpe, tpd=tpd, ach=ach, year=year,
                    entity_count=n,
                    tpe_reason=None if tpe is not None else "unscored",
                    tpd_reason=None if tpd is not None else "unscored")


def _recs(values, **kw):
    return [_rec(doc_id=f"d{i}", tpe=v, tpd=v, **kw) for i, v in enumerate(values)]


# -- phase ordering ----------------------------------------------------------


def test_phase_report_monotone_and_positive():
    groups = {"I": _recs([0.1]), "II": _recs([0.2]), "III": _recs([0.3]), "IV": _recs([0.4])}
    rep = phase_report(groups, "tpe")
    assert rep.monotone and rep.positive
    assert [s.group_key for s in rep.stats] == ["I", "II", "III", "IV"]
    assert [s.mean for s in rep.stats] == [0.1, 0.2, 0.3, 0.4]


def test_phase_report_detects_non_monotone():
    groups = {"I": _recs([0.3]), "II": _recs([0.2]), "III": _recs([0.35]), "IV": _recs([0.4])}
    rep = phase_report(groups, "tpe")
    assert not rep.monotone
    assert rep.positive


def test_phase_report_missing_phase_names_it():
    groups = {"I": _recs([0.1]), "II": _recs([0.2]), "III": _recs([0.3])}
    with pytest.raises(ReportError, match="IV"):
        phase_report(groups, "tpe")


def test_group_by_phase_uses_pub_types():
    records = [_rec(doc_id="a", tpe=0.1), _rec(doc_id="b", tpe=0.2), _rec(doc_id="c", tpe=0.3)]
    pub_types = {
        "a": frozenset({"Clinical Trial, Phase I"}),
        "b": frozenset({"Clinical Trial, Phase IV"}),
        "c": frozenset({"Journal Article"}),
    }
    groups = group_by_phase(records, pub_types)
    assert [r.doc_id for r in groups["I"]] == ["a"]
    assert [r.doc_id for r in groups["IV"]] == ["b"]
    assert all(r.doc_id != "c" for g in groups.values() for r in g)


# -- ACH ordering ------------------------------------------------------------


def test_ach_report_orders_by_mean():
    records = (_recs([0.8, 0.9], ach="H") + _recs([-0.5, -0.4], ach="C")
               + _recs([0.1], ach="AH"))
    rep = ach_report(records, "tpe")
    assert rep.ordering == ("C", "AH", "H")


def test_ach_report_reports_ties_explicitly():
    records = _recs([0.5], ach="A") + _recs([0.5], ach="C") + _recs([0.9], ach="H")
    rep = ach_report(records, "tpe")
    assert rep.ordering == ("A=C", "H")


def test_ach_report_excludes_unlabeled_and_needs_two_groups():
    records = _recs([0.5], ach="H") + _recs([0.1], ach="none")
    with pytest.raises(ReportError):
        ach_report(records, "tpe")


# -- density and peaks -------------------------------------------------------


def test_density_bimodal_sample_has_exactly_two_peaks():
    rng = np.random.default_rng(3)
    values = np.concatenate([
        rng.normal(-0.25, 0.03, 500), rng.normal(0.25, 0.03, 500)
    ]).clip(-0.99, 0.99)
    hist, peaks = density(_recs(list(values)), "tpe", 40)
    assert len(peaks) == 2
    assert peaks[0] == pytest.approx(-0.25, abs=0.06)
    assert peaks[1] == pytest.approx(0.25, abs=0.06)


def test_density_single_bin_sample_has_one_peak():
    hist, peaks = density(_recs([0.105] * 50), "tpe", 40)
    assert len(peaks) == 1


def test_density_integrates_to_one():
    rng = np.random.default_rng(4)
    hist, _ = density(_recs(list(rng.uniform(-1, 1, 300))), "tpe", 25)
    width = 2.0 / 25
    assert sum(hist.density) * width == pytest.approx(1.0, abs=1e-12)
    assert sum(hist.counts) == 300


def test_density_rejects_empty_and_bad_bins():
    with pytest.raises(ReportError):
        density([_rec()], "tpe", 40)  # the only record is unscored
    with pytest.raises(ReportError):
        density(_recs([0.1]), "tpe", 1)


# -- correlation -------------------------------------------------------------


def _corr_records(pairs):
    return [_rec(doc_id=f"p{i}", tpe=x, tpd=y) for i, (x, y) in enumerate(pairs)]


def test_perfect_linear_correlation():
    pearson, spearman, n = correlation(_corr_records([(1, 2), (2, 4), (3, 6)]))
    assert pearson == pytest.approx(1.0, abs=1e-15)
    assert spearman == pytest.approx(1.0, abs=1e-15)
    assert n == 3


def test_perfect_inverse_correlation():
    pearson, spearman, _ = correlation(_corr_records([(1, 6), (2, 4), (3, 2)]))
    assert pearson == pytest.approx(-1.0, abs=1e-15)
    assert spearman == pytest.approx(-1.0, abs=1e-15)


def test_correlation_matches_brute_force_oracle_on_200_pairs():
    rng = np.random.default_rng(21)
    x = rng.normal(size=200)
    y = 0.6 * x + rng.normal(size=200)
    pearson, spearman, n = correlation(_corr_records(list(zip(x, y))))
    assert n == 200

    def brute_pearson(a, b):
        am, bm = a - a.mean(), b - b.mean()
        return float((am * bm).sum() / np.sqrt((am**2).sum() * (bm**2).sum()))

    def brute_rank(a):
        # average ranks with ties, from first principles
        order = np.argsort(a, kind="stable")
        ranks = np.empty(len(a))
        i = 0
        while i < len(a):
            j = i
            while j + 1 < len(a) and a[order[j + 1]] == a[order[i]]:
                j += 1
            ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
            i = j + 1
        return ranks

    assert abs(pearson - brute_pearson(x, y)) <= 1e-12
    assert abs(spearman - brute_pearson(brute_rank(x), brute_rank(y))) <= 1e-12


def test_correlation_affine_invariance():
    rng = np.random.default_rng(22)
    x = rng.normal(size=50)
    y = rng.normal(size=50)
    p1, s1, _ = correlation(_corr_records(list(zip(x, y))))
    p2, s2, _ = correlation(_corr_records(list(zip(3.0 * x + 0.1, 0.5 * y - 0.2))))
    assert p1 == pytest.approx(p2, abs=1e-12)
    assert s1 == pytest.approx(s2, abs=1e-12)


def test_spearman_monotone_invariance():
    rng = np.random.default_rng(23)
    x = rng.uniform(-0.9, 0.9, 60)
    y = rng.uniform(-0.9, 0.9, 60)
    _, s1, _ = correlation(_corr_records(list(zip(x, y))))
    _, s2, _ = correlation(_corr_records(list(zip(np.tanh(2 * x), y**3))))
    assert s1 == pytest.approx(s2, abs=1e-12)


def test_correlation_preconditions():
    with pytest.raises(ReportError):
        correlation(_corr_records([(1, 2), (2, 4)]))  # fewer than 3 pairs
    with pytest.raises(ReportError):
        correlation(_corr_records([(1, 1), (1, 2), (1, 3)]))  # zero variance in x


def test_correlation_uses_only_doubly_scored_records():
    records = _corr_records([(1, 2), (2, 4), (3, 6)])
    records.append(_rec(doc_id="half", tpe=0.5, tpd=None))
    _, _, n = correlation(records)
    assert n == 3


# -- yearly trend ------------------------------------------------------------


def test_yearly_trend_stats():
    records = [_rec(doc_id="a", tpe=0.0, year=2001), _rec(doc_id="b", tpe=0.2, year=2001),
               _rec(doc_id="c", tpe=0.4, year=2003)]
    trend = yearly_trend(records, "tpe")
    assert [y for y, _ in trend] == [2001, 2003]
    s2001 = trend[0][1]
    assert s2001.mean == pytest.approx(0.1, abs=1e-15)
    assert s2001.std_dev == pytest.approx(0.1, abs=1e-15)  # population std
    assert s2001.count == 2


def test_yearly_trend_excludes_unknown_years():
    records = [_rec(doc_id="a", tpe=0.1, year=0), _rec(doc_id="b", tpe=0.2, year=1999)]
    trend = yearly_trend(records, "tpe")
    assert [y for y, _ in trend] == [1999]


def test_yearly_trend_year_offset_invariance():
    base = [_rec(doc_id=f"d{i}", tpe=v, year=2000 + i % 3) for i, v in enumerate([0.1, 0.2, 0.3, 0.4])]
    moved = [_rec(doc_id=r.doc_id, tpe=r.tpe, year=r.year + 7) for r in base]
    t1 = yearly_trend(base, "tpe")
    t2 = yearly_trend(moved, "tpe")
    assert [(y + 7, s.mean, s.count) for y, s in t1] == [(y, s.mean, s.count) for y, s in t2]


# -- heatmap -----------------------------------------------------------------


def test_heatmap_counts_land_in_expected_cells():
    grid = heatmap_grid([(-0.9, -0.9)] * 4, 2, 2)
    assert grid[0, 0] == 4
    assert grid.sum() == 4


def test_heatmap_final_bin_is_right_closed():
    grid = heatmap_grid([(1.0, 1.0)], 2, 2)
    assert grid[1, 1] == 1


def test_heatmap_conserves_pair_count():
    rng = np.random.default_rng(31)
    pairs = list(zip(rng.uniform(-1, 1, 500), rng.uniform(-1, 1, 500)))
    assert heatmap_grid(pairs, 7, 9).sum() == 500


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), max_size=60),
       st.integers(1, 10), st.integers(1, 10))
@settings(max_examples=100, deadline=None)
def test_heatmap_conservation_property(pairs, xb, yb):
    assert heatmap_grid(pairs, xb, yb).sum() == len(pairs)
