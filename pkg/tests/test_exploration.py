import math

import pytest
from hypothesis import given, strategies as st

from skipgrid.exploration import Schedule, epsilon_at

TOTAL = 10_000


def test_linear_endpoints():
    s = Schedule.linear()
    assert epsilon_at(s, 0, TOTAL) == 1.0
    assert epsilon_at(s, TOTAL - 1, TOTAL) == 0.0
    assert epsilon_at(s, 4999, 9999) == pytest.approx(1.0 - 4999 / 9998)


def test_log_endpoints():
    s = Schedule.log()
    assert epsilon_at(s, 0, TOTAL) == 1.0
    assert epsilon_at(s, TOTAL - 1, TOTAL) == 1e-5


def test_constant():
    s = Schedule.constant()
    assert {epsilon_at(s, e, TOTAL) for e in (0, 17, TOTAL - 1)} == {0.1}
    assert epsilon_at(s, 0, 1) == 0.1


def test_errors():
    with pytest.raises(ValueError):
        epsilon_at(Schedule.linear(), 0, 1)
    with pytest.raises(ValueError):
        epsilon_at(Schedule.linear(), 10, 10)
    with pytest.raises(ValueError):
        Schedule("cosine")
    with pytest.raises(ValueError):
        Schedule.linear(0.1, 0.5)
    with pytest.raises(ValueError):
        Schedule.from_name("nope")


def test_from_name_overrides():
    s = Schedule.from_name("log", eps_end=1e-3, eps_start=None)
    assert (s.kind, s.eps_start, s.eps_end) == ("log", 1.0, 1e-3)
    assert Schedule.from_name("const", constant_eps=0.2).constant_eps == 0.2


decaying = st.builds(
    lambda kind, a, b: Schedule(kind, max(a, b), min(a, b)),
    st.sampled_from(["linear", "log"]),
    st.floats(1e-4, 1.0), st.floats(1e-4, 1.0))


@given(decaying, st.integers(2, 5000), st.data())
def test_range_and_monotone(sched, total, data):
    e1 = data.draw(st.integers(0, total - 1))
    e2 = data.draw(st.integers(e1, total - 1))
    v1, v2 = epsilon_at(sched, e1, total), epsilon_at(sched, e2, total)
    assert sched.eps_end <= v1 <= sched.eps_start
    assert v2 <= v1


@given(st.floats(1e-6, 1.0), st.floats(1e-6, 1.0), st.integers(2, 5000), st.data())
def test_log_is_linear_in_log_space(a, b, total, data):
    start, end = max(a, b), min(a, b)
    e = data.draw(st.integers(0, total - 1))
    got = math.log(epsilon_at(Schedule.log(start, end), e, total))
    want = math.log(start) + (math.log(end) - math.log(start)) * e / (total - 1)
    assert abs(got - want) <= 1e-12
