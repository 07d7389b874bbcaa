import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from asmgen.pose import (Pose, PoseError, compose, invert, max_abs_diff,
                         to_rpy, translation_error)

from oracles import as_lists, matmul4, rigid_inverse

coord = st.floats(-5, 5, allow_nan=False)
angle = st.floats(-math.pi, math.pi, allow_nan=False)
poses = st.builds(Pose.from_xyz_rpy, coord, coord, coord, angle, angle, angle)


def test_identity_left_unit_is_exact():
    t = Pose.from_xyz_rpy(0.3, -0.2, 1.1, 0.4, -0.7, 2.0)
    assert compose(Pose.identity(), t) == t


def test_translations_compose():
    p = compose(Pose.from_translation(1, 0, 0), Pose.from_translation(0, 2, 0))
    assert list(p.translation) == [1.0, 2.0, 0.0]


def test_compose_with_inverse_is_identity():
    t = Pose.from_xyz_rpy(0.3, -0.2, 1.1, 0.4, -0.7, 2.0)
    assert max_abs_diff(compose(t, invert(t)), Pose.identity()) <= 1e-9


@pytest.mark.parametrize("bad, msg", [
    ([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]], "bottom row"),
    ([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "orthonormal"),
    ([[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "determinant"),
    ([[float("nan"), 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "non-finite"),
])
def test_invalid_matrices_rejected(bad, msg):
    with pytest.raises(PoseError, match=msg):
        Pose(bad)


def test_from_list_length():
    with pytest.raises(PoseError):
        Pose.from_list([0.0] * 15)


def test_pose_is_read_only():
    p = Pose.identity()
    with pytest.raises(ValueError):
        p.matrix[0, 3] = 1.0


def test_translation_error():
    a = Pose.from_translation(0, 0, 0)
    b = Pose.from_translation(3, 4, 0)
    assert translation_error(a, b) == 5.0


@given(poses, poses, poses)
def test_compose_associative(a, b, c):
    assert max_abs_diff((a @ b) @ c, a @ (b @ c)) <= 1e-9


@given(poses)
def test_double_inverse(t):
    assert max_abs_diff(invert(invert(t)), t) <= 1e-9


@given(poses, poses)
def test_compose_matches_oracle(a, b):
    got = np.array(as_lists(compose(a, b)))
    want = np.array(matmul4(as_lists(a), as_lists(b)))
    assert np.max(np.abs(got - want)) <= 1e-9


@given(poses)
def test_invert_matches_oracle(t):
    got = np.array(as_lists(invert(t)))
    assert np.max(np.abs(got - np.array(rigid_inverse(as_lists(t))))) <= 1e-9


@given(poses, poses)
def test_results_stay_rigid(a, b):
    Pose((a @ invert(b)).matrix)  # validating constructor


@given(coord, coord, coord,
       st.floats(-3.0, 3.0), st.floats(-1.5, 1.5), st.floats(-3.0, 3.0))
def test_rpy_round_trip(x, y, z, roll, pitch, yaw):
    p = Pose.from_xyz_rpy(x, y, z, roll, pitch, yaw)
    q = Pose.from_xyz_rpy(x, y, z, *to_rpy(p))
    assert max_abs_diff(p, q) <= 1e-9


@given(poses)
def test_list_round_trip(t):
    assert Pose.from_list(t.to_list()) == t
