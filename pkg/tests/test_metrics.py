import numpy as np
import pytest

from fakebench.metrics import (
    DEFAULT_ALPHA,
    GENUINE_SEGMENTS_NOTE,
    IdentifyCounts,
    SegmentCounts,
    accumulate_segment_counts,
    composite_score,
    evaluate_corpus,
    format_report_table,
    identify_accuracy,
    segment_activity,
    segment_count,
    segment_f1,
)
from fakebench.types import ClipLabel, ClipPrediction, Region, ValidationError

from conftest import fake_record
from oracles import (
    oracle_corpus_counts,
    oracle_prf,
    oracle_segment_activity,
    oracle_segment_count,
)


class TestSegmentCount:
    def test_exact_multiples(self):
        assert segment_count(10.0, 1.0) == 10
        assert segment_count(10.0, 0.02) == 500

    def test_partial_final_segment_counts(self):
        assert segment_count(10.4, 1.0) == 11
        assert segment_count(0.5, 1.0) == 1

    def test_float_noise_does_not_add_segment(self):
        # 7.3 / 0.02 = 365.00000000000006 in floats
        assert segment_count(7.3, 0.02) == 365

    def test_matches_oracle_on_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            duration = float(rng.uniform(0.05, 12.0))
            resolution = float(rng.choice([1.0, 0.02, 0.5, 0.25]))
            assert segment_count(duration, resolution) == oracle_segment_count(
                duration, resolution
            ), (duration, resolution)

    def test_invalid_inputs(self):
        with pytest.raises(ValidationError):
            segment_count(1.0, 0.0)
        with pytest.raises(ValidationError):
            segment_count(0.0, 1.0)


class TestSegmentActivity:
    def test_frozen_fine_resolution_example(self):
        # [1.99, 2.01) at 20 ms: overlaps segments 99 ([1.98,2.00)) and 100
        active = segment_activity([Region(1.99, 2.01)], duration=4.0, resolution=0.02)
        assert list(np.flatnonzero(active)) == [99, 100]

    def test_touching_boundary_is_not_overlap(self):
        # [1.0, 2.0) at 1 s touches segment 0 at a point only
        active = segment_activity([Region(1.0, 2.0)], duration=3.0, resolution=1.0)
        assert list(active) == [False, True, False]

    def test_sliver_overlap_activates(self):
        active = segment_activity([Region(0.999, 1.001)], duration=3.0, resolution=1.0)
        assert list(active) == [True, True, False]

    def test_empty_regions(self):
        assert not segment_activity([], duration=2.0, resolution=1.0).any()

    def test_matches_oracle_randomized(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            duration = float(rng.uniform(0.5, 10.0))
            cuts = np.sort(rng.uniform(0.0, duration, size=2 * rng.integers(0, 4)))
            pairs = [
                (float(cuts[i]), float(cuts[i + 1]))
                for i in range(0, len(cuts), 2)
                if cuts[i + 1] - cuts[i] > 1e-6
            ]
            regions = [Region(a, b) for a, b in pairs]
            for resolution in (1.0, 0.02):
                got = segment_activity(regions, duration, resolution)
                assert list(got) == oracle_segment_activity(pairs, duration, resolution)


class TestCounts:
    def test_accumulate(self):
        counts = SegmentCounts(resolution=1.0)
        counts = accumulate_segment_counts(
            np.array([1, 1, 0, 0], bool), np.array([1, 0, 1, 0], bool), counts
        )
        assert (counts.tp, counts.fn, counts.fp, counts.tn) == (1, 1, 1, 1)

    def test_shape_mismatch_names_clip(self):
        with pytest.raises(ValidationError, match="clip7"):
            accumulate_segment_counts(
                np.ones(3, bool), np.ones(4, bool), SegmentCounts(1.0), clip_id="clip7"
            )

    def test_merge_requires_same_resolution(self):
        with pytest.raises(ValidationError):
            SegmentCounts(1.0).merge(SegmentCounts(0.02))


class TestSegmentF1:
    def test_frozen_simple_case(self):
        p, r, f1 = segment_f1(SegmentCounts(1.0, tp=3, fp=1, fn=1))
        assert (p, r, f1) == (0.75, 0.75, 0.75)

    def test_zero_tp_gives_zero_f1(self):
        p, r, f1 = segment_f1(SegmentCounts(1.0, tp=0, fp=5, fn=3))
        assert f1 == 0.0

    def test_all_empty_counts(self):
        assert segment_f1(SegmentCounts(1.0)) == (0.0, 0.0, 0.0)

    def test_matches_oracle_formula(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            tp, fp, fn = (int(x) for x in rng.integers(0, 50, size=3))
            got = segment_f1(SegmentCounts(1.0, tp=tp, fp=fp, fn=fn))
            want = oracle_prf(tp, fp, fn)
            assert got[:2] == want[:2]
            assert got[2] == pytest.approx(want[2], abs=1e-12)


class TestIdentifyAccuracy:
    def test_frozen_example(self):
        # 59 correct verdicts out of 100 clips
        counts = IdentifyCounts(tp=30, fp=21, tn=29, fn=20)
        assert identify_accuracy(counts) == 0.59

    def test_empty_is_error(self):
        with pytest.raises(ValidationError):
            identify_accuracy(IdentifyCounts())


class TestCompositeScore:
    def test_paper_weighting(self):
        assert composite_score(0.710, 0.636) == pytest.approx(0.658, abs=0.0005)
        assert composite_score(0.770, 0.738) == pytest.approx(0.748, abs=0.0005)
        assert composite_score(0.720, 0.782) == pytest.approx(0.763, abs=0.0005)

    def test_alpha_bounds(self):
        assert composite_score(1.0, 0.0, alpha=1.0) == 1.0
        assert composite_score(0.0, 1.0, alpha=0.0) == 1.0
        with pytest.raises(ValidationError):
            composite_score(1.1, 0.5)
        with pytest.raises(ValidationError):
            composite_score(0.5, 0.5, alpha=-0.1)

    def test_default_alpha(self):
        assert DEFAULT_ALPHA == 0.3
        assert composite_score(1.0, 0.0) == pytest.approx(0.3)


def _toy_corpus():
    refs = [
        fake_record("a", 5.0, [(1.0, 3.0)]),
        fake_record("b", 4.0, []),
        fake_record("c", 6.5, [(0.5, 1.5), (4.0, 6.0)]),
    ]
    preds = [
        ClipPrediction("a", ClipLabel.FAKE, (Region(1.0, 3.0),)),
        ClipPrediction("b", ClipLabel.GENUINE, ()),
        ClipPrediction("c", ClipLabel.FAKE, (Region(0.5, 1.5), Region(4.0, 6.0))),
    ]
    return refs, preds


class TestEvaluateCorpus:
    def test_perfect_predictions_score_one(self):
        refs, preds = _toy_corpus()
        report = evaluate_corpus(refs, preds)
        assert report.acc_identify == 1.0
        for res in report.resolutions:
            assert res.precision == 1.0
            assert res.recall == 1.0
            assert res.f1 == 1.0
            assert res.score == 1.0

    def test_missing_prediction_listed(self):
        refs, preds = _toy_corpus()
        with pytest.raises(ValidationError, match="missing predictions for: b, c"):
            evaluate_corpus(refs, preds[:1])

    def test_unknown_prediction_listed(self):
        refs, preds = _toy_corpus()
        preds.append(ClipPrediction("zz", ClipLabel.GENUINE, ()))
        with pytest.raises(ValidationError, match="unknown clips: zz"):
            evaluate_corpus(refs, preds)

    def test_duplicate_prediction_listed(self):
        refs, preds = _toy_corpus()
        with pytest.raises(ValidationError, match="duplicate predictions for: a"):
            evaluate_corpus(refs, preds + [preds[0]])

    def test_empty_corpus_is_error(self):
        with pytest.raises(ValidationError, match="empty corpus"):
            evaluate_corpus([], [])

    def test_all_genuine_predictor_on_fake_corpus(self):
        refs = [fake_record(f"c{i}", 4.0, [(1.0, 2.0)]) for i in range(4)]
        preds = [ClipPrediction(f"c{i}", ClipLabel.GENUINE, ()) for i in range(4)]
        report = evaluate_corpus(refs, preds)
        assert report.acc_identify == 0.0
        for res in report.resolutions:
            assert res.f1 == 0.0
            assert res.score == 0.0

    def test_genuine_clips_tallied_as_inactive(self):
        # a false-alarm region on a genuine clip must cost precision
        refs = [fake_record("f", 4.0, [(0.0, 4.0)]), fake_record("g", 4.0, [])]
        preds = [
            ClipPrediction("f", ClipLabel.FAKE, (Region(0.0, 4.0),)),
            ClipPrediction("g", ClipLabel.FAKE, (Region(0.0, 4.0),)),
        ]
        report = evaluate_corpus(refs, preds, resolutions=(1.0,))
        counts = report.resolutions[0].counts
        assert (counts.tp, counts.fp, counts.fn, counts.tn) == (4, 4, 0, 0)
        assert GENUINE_SEGMENTS_NOTE in report.notes

    def test_matches_oracle_on_random_corpora(self):
        rng = np.random.default_rng(77)
        for _ in range(150):
            clips = []
            refs, preds = [], []
            for i in range(int(rng.integers(1, 8))):
                duration = float(rng.uniform(0.8, 10.0))

                def draw_pairs():
                    cuts = np.sort(rng.uniform(0.0, duration, size=2 * rng.integers(0, 4)))
                    return [
                        (float(cuts[j]), float(cuts[j + 1]))
                        for j in range(0, len(cuts), 2)
                        if cuts[j + 1] - cuts[j] > 1e-6
                    ]

                ref_pairs, sys_pairs = draw_pairs(), draw_pairs()
                clips.append({"duration": duration, "ref": ref_pairs, "sys": sys_pairs})
                refs.append(fake_record(f"c{i}", duration, ref_pairs))
                sys_label = ClipLabel.FAKE if rng.random() < 0.5 else ClipLabel.GENUINE
                preds.append(
                    ClipPrediction(
                        f"c{i}", sys_label, tuple(Region(a, b) for a, b in sys_pairs)
                    )
                )
            report = evaluate_corpus(refs, preds)
            for res in report.resolutions:
                tp, fp, fn, tn = oracle_corpus_counts(clips, res.resolution)
                got = res.counts
                assert (got.tp, got.fp, got.fn, got.tn) == (tp, fp, fn, tn)
                p, r, f1 = oracle_prf(tp, fp, fn)
                assert res.precision == p
                assert res.recall == r
                assert res.f1 == pytest.approx(f1, abs=1e-12)


class TestReportFormatting:
    def test_table_contains_rows_and_scores(self):
        refs, preds = _toy_corpus()
        report = evaluate_corpus(refs, preds)
        table = format_report_table([("perfect", report)])
        assert "perfect" in table
        assert "Acc_identify" in table
        assert "1.000" in table

    def test_empty_table(self):
        assert format_report_table([]) == "(empty report)\n"

    def test_report_round_trips_to_dict(self):
        refs, preds = _toy_corpus()
        report = evaluate_corpus(refs, preds)
        d = report.to_dict()
        assert d["acc_identify"] == 1.0
        assert {r["resolution"] for r in d["resolutions"]} == {1.0, 0.02}
