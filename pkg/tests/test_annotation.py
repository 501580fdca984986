"""Listening-test sessions: assignment, durable storage, and scoring."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from fakebench.annotation import (
    DEFAULT_CLIPS_PER_SET,
    MACRO_AVERAGE_NOTE,
    REPLAY_NOTE,
    AnnotationStore,
    average_reports,
    create_session,
    score_sessions,
    subjective_table,
)
from fakebench.types import ClipLabel, ClipRecord, Region, ValidationError

from conftest import fake_record


def make_set(prefix: str, n_fake: int = 8, n_genuine: int = 4, duration: float = 6.0):
    records = []
    for i in range(n_fake):
        onset = 0.5 + (i % 4) * 0.75
        records.append(fake_record(f"{prefix}-fake{i:02d}", duration, [(onset, onset + 1.5)]))
    for i in range(n_genuine):
        records.append(fake_record(f"{prefix}-gen{i:02d}", duration, []))
    return records


@pytest.fixture
def manifests():
    return [("easy", make_set("easy")), ("hard", make_set("hard"))]


@pytest.fixture
def references(manifests):
    return {r.clip_id: r for _, records in manifests for r in records}


class TestCreateSession:
    def test_samples_from_every_set_and_shuffles(self, manifests):
        session = create_session("alice", manifests, clips_per_set=6, rng_seed=0)
        assert len(session.assigned_clips) == 12
        assert len(set(session.assigned_clips)) == 12
        easy = [c for c in session.assigned_clips if c.startswith("easy-")]
        hard = [c for c in session.assigned_clips if c.startswith("hard-")]
        assert len(easy) == 6 and len(hard) == 6
        # shuffled: the two sets interleave rather than staying in blocks
        assert session.assigned_clips != tuple(easy + hard)

    def test_default_sample_size(self, manifests):
        session = create_session("alice", manifests, rng_seed=0)
        assert len(session.assigned_clips) == DEFAULT_CLIPS_PER_SET * len(manifests)

    def test_deterministic_per_evaluator_and_seed(self, manifests):
        a1 = create_session("alice", manifests, clips_per_set=6, rng_seed=5)
        a2 = create_session("alice", manifests, clips_per_set=6, rng_seed=5)
        assert a1.assigned_clips == a2.assigned_clips
        bob = create_session("bob", manifests, clips_per_set=6, rng_seed=5)
        other_seed = create_session("alice", manifests, clips_per_set=6, rng_seed=6)
        assert bob.assigned_clips != a1.assigned_clips
        assert other_seed.assigned_clips != a1.assigned_clips

    def test_undersized_set_rejected(self, manifests):
        with pytest.raises(ValidationError, match="'easy' has 12 clips, needs >= 13"):
            create_session("alice", manifests, clips_per_set=13)

    def test_empty_evaluator_id_rejected(self, manifests):
        with pytest.raises(ValidationError, match="evaluator_id"):
            create_session("", manifests, clips_per_set=6)

    def test_session_carries_no_ground_truth(self, manifests):
        session = create_session("alice", manifests, clips_per_set=6)
        assert isinstance(session.assigned_clips[0], str)
        assert session.submissions == {}
        assert not session.complete
        assert set(session.missing_clips) == set(session.assigned_clips)


class TestAnnotationStore:
    def _store(self, tmp_path, manifests, evaluator="alice"):
        store = AnnotationStore(tmp_path / "events.jsonl")
        session = store.open_session(evaluator, manifests, clips_per_set=6, rng_seed=0)
        return store, session

    def test_open_session_is_idempotent(self, tmp_path, manifests):
        store, session = self._store(tmp_path, manifests)
        again = store.open_session("alice", manifests, clips_per_set=6, rng_seed=0)
        assert again.assigned_clips == session.assigned_clips
        assert len([e for e in store.audit_log() if e["event"] == "session"]) == 1

    def test_submit_and_get_back(self, tmp_path, manifests, references):
        store, session = self._store(tmp_path, manifests)
        clip_id = session.assigned_clips[0]
        ref = references[clip_id]
        replaced = store.submit(
            "alice", clip_id, ClipLabel.FAKE, [Region(1.0, 2.0)], ref.duration
        )
        assert replaced is False
        stored = store.get_session("alice").submissions[clip_id]
        assert stored.label is ClipLabel.FAKE
        assert stored.regions == (Region(1.0, 2.0),)

    def test_submit_sorts_regions(self, tmp_path, manifests, references):
        store, session = self._store(tmp_path, manifests)
        clip_id = session.assigned_clips[0]
        store.submit(
            "alice", clip_id, ClipLabel.FAKE,
            [Region(3.0, 4.0), Region(1.0, 2.0)], references[clip_id].duration,
        )
        stored = store.get_session("alice").submissions[clip_id]
        assert stored.regions == (Region(1.0, 2.0), Region(3.0, 4.0))

    def test_submit_validation_failures(self, tmp_path, manifests, references):
        store, session = self._store(tmp_path, manifests)
        clip_id = session.assigned_clips[0]
        duration = references[clip_id].duration
        with pytest.raises(ValidationError, match="no session"):
            store.submit("mallory", clip_id, ClipLabel.FAKE, [Region(1, 2)], duration)
        with pytest.raises(ValidationError, match="not assigned"):
            store.submit("alice", "easy-notyours", ClipLabel.FAKE, [Region(1, 2)], duration)
        with pytest.raises(ValidationError, match="genuine"):
            store.submit("alice", clip_id, ClipLabel.GENUINE, [Region(1, 2)], duration)
        with pytest.raises(ValidationError):  # beyond clip end
            store.submit("alice", clip_id, ClipLabel.FAKE, [Region(1, duration + 1)], duration)
        with pytest.raises(ValidationError):  # overlapping
            store.submit(
                "alice", clip_id, ClipLabel.FAKE,
                [Region(1.0, 3.0), Region(2.0, 4.0)], duration,
            )
        assert store.get_session("alice").submissions == {}

    def test_latest_submission_wins_but_log_keeps_all(self, tmp_path, manifests, references):
        store, session = self._store(tmp_path, manifests)
        clip_id = session.assigned_clips[0]
        duration = references[clip_id].duration
        assert store.submit("alice", clip_id, ClipLabel.FAKE, [Region(1, 2)], duration) is False
        assert store.submit("alice", clip_id, ClipLabel.GENUINE, [], duration) is True
        assert store.get_session("alice").submissions[clip_id].label is ClipLabel.GENUINE
        submits = [e for e in store.audit_log() if e["event"] == "submit"]
        assert len(submits) == 2
        assert submits[0]["label"] == "fake" and submits[1]["label"] == "genuine"

    def test_replay_restores_state(self, tmp_path, manifests, references):
        store, session = self._store(tmp_path, manifests)
        for clip_id in session.assigned_clips[:3]:
            ref = references[clip_id]
            store.submit("alice", clip_id, ref.label, list(ref.fake_regions), ref.duration)
        reborn = AnnotationStore(store.log_path)
        restored = reborn.get_session("alice")
        assert restored.assigned_clips == session.assigned_clips
        assert set(restored.submissions) == set(session.assigned_clips[:3])
        for clip_id, sub in restored.submissions.items():
            assert sub.label == session.submissions[clip_id].label
            assert sub.regions == session.submissions[clip_id].regions

    def test_corrupt_log_line_reported_with_position(self, tmp_path, manifests):
        store, _ = self._store(tmp_path, manifests)
        with open(store.log_path, "a", encoding="utf-8") as fp:
            fp.write("{not json\n")
        with pytest.raises(ValidationError, match="line 2"):
            AnnotationStore(store.log_path)

    def test_unknown_event_type_rejected(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text(json.dumps({"event": "mystery"}) + "\n")
        with pytest.raises(ValidationError, match="mystery"):
            AnnotationStore(path)


def echo_ground_truth(store, session, references):
    for clip_id in session.assigned_clips:
        ref = references[clip_id]
        store.submit(
            session.evaluator_id, clip_id, ref.label, list(ref.fake_regions), ref.duration
        )


class TestScoreSessions:
    def test_ground_truth_echo_scores_one_everywhere(self, tmp_path, manifests, references):
        store = AnnotationStore(tmp_path / "events.jsonl")
        session = store.open_session("echo", manifests, clips_per_set=6, rng_seed=1)
        echo_ground_truth(store, session, references)
        report = score_sessions(store.sessions(), references)
        assert len(report.evaluators) == 1
        result = report.evaluators[0]
        assert result.report.acc_identify == 1.0
        for block in result.report.resolutions:
            assert block.precision == 1.0
            assert block.recall == 1.0
            assert block.f1 == 1.0
            assert block.score == 1.0
        assert report.average["acc_identify"] == 1.0
        assert REPLAY_NOTE in result.report.notes
        assert MACRO_AVERAGE_NOTE in report.notes

    def test_incomplete_session_is_an_error_by_default(self, tmp_path, manifests, references):
        store = AnnotationStore(tmp_path / "events.jsonl")
        session = store.open_session("lazy", manifests, clips_per_set=6, rng_seed=1)
        first = session.assigned_clips[0]
        ref = references[first]
        store.submit("lazy", first, ref.label, list(ref.fake_regions), ref.duration)
        with pytest.raises(ValidationError, match=session.assigned_clips[1]):
            score_sessions(store.sessions(), references)

    def test_allow_partial_scores_submitted_subset(self, tmp_path, manifests, references):
        store = AnnotationStore(tmp_path / "events.jsonl")
        session = store.open_session("partial", manifests, clips_per_set=6, rng_seed=1)
        for clip_id in session.assigned_clips[:4]:
            ref = references[clip_id]
            store.submit("partial", clip_id, ref.label, list(ref.fake_regions), ref.duration)
        report = score_sessions(store.sessions(), references, allow_partial=True)
        result = report.evaluators[0]
        assert result.submitted == 4
        assert result.assigned == 12
        assert set(result.missing) == set(session.assigned_clips[4:])

    def test_sessions_without_submissions_are_skipped(self, tmp_path, manifests, references):
        store = AnnotationStore(tmp_path / "events.jsonl")
        store.open_session("idle", manifests, clips_per_set=6, rng_seed=1)
        report = score_sessions(store.sessions(), references, allow_partial=True)
        assert report.evaluators == ()
        assert report.average is None
        assert subjective_table(report) == "(empty report)\n"

    def test_unknown_reference_rejected(self, tmp_path, manifests):
        store = AnnotationStore(tmp_path / "events.jsonl")
        session = store.open_session("echo", manifests, clips_per_set=6, rng_seed=1)
        first = session.assigned_clips[0]
        store.submit("echo", first, ClipLabel.GENUINE, [], 6.0)
        with pytest.raises(ValidationError, match=first):
            score_sessions(store.sessions(), {}, allow_partial=True)

    def test_all_genuine_guesser_accuracy_is_genuine_fraction(
        self, tmp_path, manifests, references
    ):
        store = AnnotationStore(tmp_path / "events.jsonl")
        session = store.open_session("naysayer", manifests, clips_per_set=6, rng_seed=2)
        for clip_id in session.assigned_clips:
            store.submit("naysayer", clip_id, ClipLabel.GENUINE, [], references[clip_id].duration)
        report = score_sessions(store.sessions(), references)
        result = report.evaluators[0]
        genuine = sum(not references[c].is_fake for c in session.assigned_clips)
        assert result.report.acc_identify == genuine / len(session.assigned_clips)
        for block in result.report.resolutions:
            assert block.f1 == 0.0  # zero true-positive segments
            assert block.score == pytest.approx(0.3 * result.report.acc_identify)

    def test_macro_average_is_arithmetic_mean(self, tmp_path, manifests, references):
        store = AnnotationStore(tmp_path / "events.jsonl")
        echo = store.open_session("echo", manifests, clips_per_set=6, rng_seed=3)
        echo_ground_truth(store, echo, references)
        nay = store.open_session("naysayer", manifests, clips_per_set=6, rng_seed=3)
        for clip_id in nay.assigned_clips:
            store.submit("naysayer", clip_id, ClipLabel.GENUINE, [], references[clip_id].duration)
        report = score_sessions(store.sessions(), references)
        reports = {r.evaluator_id: r.report for r in report.evaluators}
        a, b = reports["echo"], reports["naysayer"]
        avg = report.average
        assert avg["acc_identify"] == (a.acc_identify + b.acc_identify) / 2
        for block in avg["resolutions"]:
            res = block["resolution"]
            assert block["f1"] == (a.resolution(res).f1 + b.resolution(res).f1) / 2
            assert block["score"] == (a.resolution(res).score + b.resolution(res).score) / 2
            assert block["precision"] == (
                a.resolution(res).precision + b.resolution(res).precision
            ) / 2

    def test_average_reports_empty_is_none(self):
        assert average_reports([]) is None

    def test_subjective_table_lists_evaluators_and_average(
        self, tmp_path, manifests, references
    ):
        store = AnnotationStore(tmp_path / "events.jsonl")
        echo = store.open_session("echo", manifests, clips_per_set=6, rng_seed=3)
        echo_ground_truth(store, echo, references)
        report = score_sessions(store.sessions(), references)
        table = subjective_table(report)
        assert "echo" in table
        assert "average" in table
        assert "Acc_identify" in table

    def test_report_to_dict_shape(self, tmp_path, manifests, references):
        store = AnnotationStore(tmp_path / "events.jsonl")
        echo = store.open_session("echo", manifests, clips_per_set=6, rng_seed=3)
        echo_ground_truth(store, echo, references)
        payload = score_sessions(store.sessions(), references).to_dict()
        assert payload["evaluators"][0]["evaluator_id"] == "echo"
        assert payload["evaluators"][0]["report"]["acc_identify"] == 1.0
        assert payload["average"]["acc_identify"] == 1.0
        assert MACRO_AVERAGE_NOTE in payload["notes"]
