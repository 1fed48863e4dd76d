import numpy as np
import pytest
from hypothesis import settings, strategies as st

from superframes.transforms import EuclideanTransform, planar, rotation_axis_angle

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
shifts = st.floats(-3.0, 3.0, allow_nan=False)
amplitudes = st.complex_numbers(min_magnitude=0.05, max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def planar_transforms(draw):
    return planar(draw(angles), (draw(shifts), draw(shifts)))


@st.composite
def spatial_transforms(draw):
    axis = draw(st.tuples(shifts, shifts, shifts).filter(lambda v: np.linalg.norm(v) > 0.1))
    return EuclideanTransform(rotation_axis_angle(draw(angles), axis),
                              np.array([draw(shifts), draw(shifts), draw(shifts)]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""
    def record(number: int, passed: bool, detail: str) -> bool:
        _CRITERIA[number] = (bool(passed), detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
