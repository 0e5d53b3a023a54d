import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divtween.errors import DegenerateInputError, DimensionError, RangeError
from divtween.motion import (
    BoundaryCondition,
    LengthPolicy,
    MotionSequence,
    boundary_similarity,
    estimate_transition_length,
    load_motion,
    pad_to_max,
    save_motion,
    sequences_equal,
)


def seq_from_poses(*poses):
    return MotionSequence(frames=np.array(poses, dtype=float))


def pose(fill, j=2):
    return np.full((j, 3), float(fill))


class TestMotionSequence:
    def test_rejects_nan(self):
        frames = np.zeros((2, 2, 3))
        frames[1, 0, 0] = np.nan
        with pytest.raises(DegenerateInputError):
            MotionSequence(frames=frames)

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionError):
            MotionSequence(frames=np.zeros((3, 4)))
        with pytest.raises(DimensionError):
            MotionSequence(frames=np.zeros((0, 2, 3)))

    def test_frames_read_only(self):
        seq = seq_from_poses(pose(1.0))
        with pytest.raises(ValueError):
            seq.frames[0, 0, 0] = 2.0

    def test_boundary_condition_joint_mismatch(self):
        a = seq_from_poses(pose(1.0, j=2))
        b = seq_from_poses(pose(1.0, j=3))
        with pytest.raises(DimensionError):
            BoundaryCondition(x1=a, x2=b)


class TestBoundarySimilarity:
    def test_identical_poses(self):
        a = seq_from_poses(pose(0.5), pose(1.0))
        b = seq_from_poses(pose(1.0), pose(0.2))
        assert boundary_similarity(a, b) == 1.0

    def test_orthogonal_poses(self):
        last = np.zeros((2, 3))
        last[0, 0] = 1.0
        first = np.zeros((2, 3))
        first[0, 1] = 1.0
        assert boundary_similarity(
            MotionSequence(frames=last[None]), MotionSequence(frames=first[None])
        ) == 0.0

    def test_antipodal_clamped_to_zero(self):
        a = seq_from_poses(pose(1.0))
        b = seq_from_poses(pose(-1.0))
        assert boundary_similarity(a, b) == 0.0

    def test_zero_norm_rejected(self):
        a = seq_from_poses(pose(0.0))
        b = seq_from_poses(pose(1.0))
        with pytest.raises(DegenerateInputError):
            boundary_similarity(a, b)
        with pytest.raises(DegenerateInputError):
            boundary_similarity(b, a)

    def test_joint_mismatch(self):
        a = seq_from_poses(pose(1.0, j=2))
        b = seq_from_poses(pose(1.0, j=4))
        with pytest.raises(DimensionError):
            boundary_similarity(a, b)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_always_in_unit_interval(self, seed):
        rng = np.random.default_rng(seed)
        a = MotionSequence(frames=rng.normal(size=(2, 4, 3)) + 0.01)
        b = MotionSequence(frames=rng.normal(size=(3, 4, 3)) + 0.01)
        assert 0.0 <= boundary_similarity(a, b) <= 1.0


class TestTransitionLength:
    def test_endpoints(self):
        policy = LengthPolicy(5, 15)
        assert estimate_transition_length(1.0, policy) == 5
        assert estimate_transition_length(0.0, policy) == 15

    def test_direct_arithmetic(self):
        assert estimate_transition_length(0.37, LengthPolicy(5, 15)) == 5 + int(10 * 0.63)
        assert estimate_transition_length(0.37, LengthPolicy(5, 15)) == 11

    def test_out_of_range(self):
        with pytest.raises(RangeError):
            estimate_transition_length(-0.1, LengthPolicy(5, 15))
        with pytest.raises(RangeError):
            estimate_transition_length(1.1, LengthPolicy(5, 15))

    def test_bad_policy(self):
        with pytest.raises(RangeError):
            LengthPolicy(0, 10)
        with pytest.raises(RangeError):
            LengthPolicy(7, 3)

    @given(
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
        st.integers(1, 30),
        st.integers(0, 30),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_and_bounded(self, s1, s2, y_min, span):
        policy = LengthPolicy(y_min, y_min + span)
        lo, hi = sorted([s1, s2])
        n_lo = estimate_transition_length(lo, policy)
        n_hi = estimate_transition_length(hi, policy)
        assert n_lo >= n_hi
        assert policy.y_min <= n_hi <= n_lo <= policy.y_max
        assert estimate_transition_length(1.0, policy) == policy.y_min
        assert estimate_transition_length(0.0, policy) == policy.y_max


class TestPadToMax:
    def test_noop_at_exact_length(self):
        seq = seq_from_poses(*[pose(i) for i in range(5)])
        assert sequences_equal(pad_to_max(seq, 5), seq)

    def test_trailing_frames_repeat_last(self):
        seq = seq_from_poses(*[pose(i) for i in range(5)])
        padded = pad_to_max(seq, 8)
        assert len(padded) == 8
        assert np.array_equal(padded.frames[:5], seq.frames)
        for k in (5, 6, 7):
            assert np.array_equal(padded.frames[k], seq.frames[4])

    def test_eleven_to_fifteen(self):
        seq = seq_from_poses(*[pose(i) for i in range(11)])
        padded = pad_to_max(seq, 15)
        assert len(padded) == 15
        assert all(np.array_equal(padded.frames[k], seq.frames[10]) for k in range(11, 15))

    def test_too_long_rejected(self):
        seq = seq_from_poses(*[pose(i) for i in range(5)])
        with pytest.raises(RangeError):
            pad_to_max(seq, 4)

    def test_idempotent(self):
        seq = seq_from_poses(*[pose(i) for i in range(3)])
        once = pad_to_max(seq, 9)
        assert sequences_equal(pad_to_max(once, 9), once)

    def test_label_preserved(self):
        seq = MotionSequence(frames=np.zeros((2, 2, 3)) + 1.0, intended_label=4)
        assert pad_to_max(seq, 5).intended_label == 4


class TestMotionFile:
    def test_round_trip_values(self, tmp_path):
        rng = np.random.default_rng(0)
        seq = MotionSequence(frames=rng.normal(size=(4, 3, 3)), intended_label=2)
        path = tmp_path / "m.json"
        save_motion(seq, path)
        loaded = load_motion(path)
        assert sequences_equal(loaded, seq)

    def test_round_trip_byte_stable(self, tmp_path):
        rng = np.random.default_rng(1)
        seq = MotionSequence(frames=rng.normal(size=(6, 5, 3)))
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        save_motion(seq, first)
        save_motion(load_motion(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_schema_fields(self, tmp_path):
        seq = MotionSequence(frames=np.ones((2, 2, 3)))
        path = tmp_path / "m.json"
        save_motion(seq, path)
        doc = json.loads(path.read_text())
        assert set(doc) == {"J", "frames", "label"}
        assert doc["J"] == 2
        assert doc["label"] is None

    def test_parse_error_names_file_and_offset(self, tmp_path):
        from divtween.errors import ParseError

        path = tmp_path / "broken.json"
        path.write_text('{"J": 2, "frames": [[[1, ]')
        with pytest.raises(ParseError, match="broken.json.*byte"):
            load_motion(path)

    def test_shape_disagreement_rejected(self, tmp_path):
        from divtween.errors import ParseError

        path = tmp_path / "off.json"
        path.write_text(json.dumps({"J": 3, "frames": [[[1, 2, 3]], [[4, 5, 6]]], "label": None}))
        with pytest.raises(ParseError, match="off.json"):
            load_motion(path)

    def test_missing_file_is_parse_error(self, tmp_path):
        from divtween.errors import ParseError

        with pytest.raises(ParseError):
            load_motion(tmp_path / "absent.json")
