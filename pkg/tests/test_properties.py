"""Property-based checks with hypothesis."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from uavrelay.scenario import Trajectory, uav_position
from uavrelay.solvers import LinearProgram, Status, solve_lp
from uavrelay.subproblems import round_schedule, slot_values, surrogate_se

unit = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def relaxed_matrices(draw):
    G = draw(st.integers(1, 6))
    N = draw(st.integers(1, 8))
    M = draw(st.integers(1, G))
    R = draw(arrays(float, (G, N), elements=unit))
    return R, M, (N * M) // G


@given(relaxed_matrices())
def test_rounding_respects_caps(case):
    R, M, cap = case
    B = round_schedule(R, M, cap)
    assert set(np.unique(B)) <= {0.0, 1.0}
    assert np.all(B.sum(axis=0) <= M)
    assert np.all(B.sum(axis=1) <= cap)
    # greedy fills each slot as far as the users with cap left allow
    left = np.full(R.shape[0], cap)
    for n in range(R.shape[1]):
        assert B[:, n].sum() == min(M, np.count_nonzero(left))
        left -= B[:, n].astype(int)


@given(st.floats(1e3, 1e13), st.floats(1e3, 1e10), st.floats(1e3, 1e10))
def test_surrogate_is_global_minorant(a, d, d0):
    assert surrogate_se(a, d, d0) <= np.log2(1 + a / d) + 1e-12


@given(unit, arrays(float, 5, elements=st.floats(0, 20)), arrays(float, 5, elements=st.floats(0, 20)))
def test_slot_values_bounded(alpha, gv, vb):
    v = slot_values(alpha, gv, vb)
    assert np.all(v >= 0)
    assert np.all(v <= alpha * gv + 1e-12) and np.all(v <= (1 - alpha) * vb + 1e-12)


@given(st.integers(1, 1000), st.integers(-3000, 3000), st.floats(0, 5000))
def test_position_periodic(N, n, r):
    t = Trajectory((10.0, -5.0), r, 900.0)
    assert np.allclose(uav_position(t, n, N), uav_position(t, n + N, N), atol=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_packing_lp_solution_feasible(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.0, 3.0, size=(m, n)) + 0.05
    b = rng.uniform(0.5, 10.0, size=m)
    c = rng.uniform(-1.0, 3.0, size=n)
    res = solve_lp(LinearProgram(c, A, b))
    assert res.status is Status.OPTIMAL
    assert np.all(A @ res.x <= b + 1e-8)
    assert np.all(res.x >= -1e-12)
    assert res.objective_value >= -1e-12   # x = 0 is feasible
