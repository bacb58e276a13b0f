import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hcce.geometry import CameraIntrinsics, Pose, random_rotation, shapes  # noqa: E402


@pytest.fixture
def K():
    return CameraIntrinsics(320.0, 320.0, 64.0, 64.0, 128, 128)


@pytest.fixture(params=shapes.BUILTIN)
def builtin_mesh(request):
    return shapes.builtin(request.param)


@pytest.fixture
def icosphere():
    return shapes.icosphere()


def random_pose(rng, z=0.6, jitter=0.02):
    t = np.array([rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter), z])
    return Pose(random_rotation(rng), t)


def project_points(points, pose, K):
    cam = pose.apply(points)
    return np.stack([K.fx * cam[:, 0] / cam[:, 2] + K.cx, K.fy * cam[:, 1] / cam[:, 2] + K.cy], axis=1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
