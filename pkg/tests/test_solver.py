import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solvagen import catalog as C
from solvagen import expr as X
from solvagen import solver as S

ZERO = X.parse("0")
HARM = X.parse("r^2/4")


def test_reduce_to_u_brackets():
    r = 1.7
    for D, ell, extra in [(3, 0, 0.0), (2, 0, -0.25), (5, 1, 6.0)]:
        s = C.build("harmonic_oscillator", D=D, ell=ell)
        got = X.evaluate(S.reduce_to_u(s, ell), {"r": r}) - X.evaluate(s.potential(ell), {"r": r})
        assert got == pytest.approx(extra / r**2, abs=1e-14)


def test_count_nodes_examples():
    x = np.linspace(0, 1, 1001)
    assert S.count_nodes(np.sin(3 * np.pi * x)) == 2
    assert S.count_nodes(np.ones(10)) == 0
    assert S.count_nodes([1, -1, 1, -1, 1]) == 4
    assert S.count_nodes([1, 1e-20, -1e-20, 1]) == 0


def test_numerov_sine():
    grid = S.RadialGrid.uniform(0.0, 1.0, 2001)
    shot = S.numerov_integrate(ZERO, math.pi**2, grid)
    assert abs(shot.u[-1]) < 1e-6 * np.max(np.abs(shot.u))
    shot2 = S.numerov_integrate(ZERO, 4 * math.pi**2, grid)
    assert S.count_nodes(shot2.u[1:-1]) == 1


def test_numerov_rescales_in_forbidden_region():
    grid = S.RadialGrid.uniform(0.0, 40.0, 4000)
    shot = S.numerov_integrate(X.parse("400"), 0.0, grid)
    assert shot.rescaled
    assert np.all(np.isfinite(shot.u))


def test_numerov_bad_direction():
    with pytest.raises(ValueError):
        S.numerov_integrate(ZERO, 1.0, S.RadialGrid.uniform(0, 1, 200), "sideways")


def test_matching_mismatch_at_eigenvalue():
    grid = S.RadialGrid.uniform(0.0, 12.0, 20000)
    assert S.matching_mismatch(HARM, 1.5, grid) < 1e-8
    assert S.matching_mismatch(HARM, 1.6, grid) > 1e-3


def test_infinite_well():
    res = S.find_eigenvalue(ZERO, S.RadialGrid.uniform(0.0, 1.0, 2000), 0, E_analytic=math.pi**2)
    assert res.rel_error < 1e-6
    res1 = S.find_eigenvalue(ZERO, S.RadialGrid.uniform(0.0, 1.0, 2000), 1)
    assert res1.E_numeric == pytest.approx(4 * math.pi**2, rel=1e-6)
    assert res1.nodes == 1


def test_harmonic_ground_state_uniform_grid():
    res = S.find_eigenvalue(HARM, S.RadialGrid.uniform(0.0, 12.0, 20000), 0, E_analytic=1.5)
    assert res.rel_error < 1e-6
    assert res.nodes == 0
    assert 0.999 < res.norm < 1.001


def test_pole_on_the_wall_keeps_accuracy():
    # u ~ r^2 for l = 1: the first step must not lose the finite k*u limit
    grid = S.RadialGrid.uniform(0.0, 80.0, 12000)
    res = S.find_eigenvalue(X.parse("-2/r + 2/r^2"), grid, 0, E_analytic=-0.25)
    assert res.rel_error < 1e-8


def test_dirichlet_wall_off_the_origin_shifts_energy():
    # a wall at a > 0 raises E by about u'(0)^2 a; the solver reports that honestly
    res = S.find_eigenvalue(HARM, S.RadialGrid.uniform(1e-3, 12.0, 20000), 0)
    assert 5e-4 < res.E_numeric - 1.5 < 1.2e-3


def test_coulomb_ground_state_uniform_grid():
    grid = S.RadialGrid.uniform(0.0, 60.0, 12000)
    res = S.find_eigenvalue(X.parse("-2/r"), grid, 0, E_analytic=-1.0)
    assert res.rel_error < 1e-5


def test_bracket_argument_and_exhaustion():
    grid = S.RadialGrid.uniform(0.0, 12.0, 5000)
    res = S.find_eigenvalue(HARM, grid, 1, bracket=(3.0, 4.0))
    assert res.E_numeric == pytest.approx(3.5, rel=1e-6)
    with pytest.raises(S.NoBoundState):
        S.find_eigenvalue(X.parse("-exp(-r)/10"), S.RadialGrid.uniform(1e-3, 40, 4000, right="decay"), 0, threshold=0.0)


def test_no_bound_state_for_exhausted_morse():
    s = C.build("morse_like", beta=2.5)
    assert s.bound_indices(4) == [0, 1]
    with pytest.raises(S.NoBoundState):
        S.find_eigenvalue(S.reduce_to_u(s), S.default_grid(s, 1), 2, threshold=0.0)


def test_fall_to_center_detected():
    grid = S.RadialGrid.logarithmic(1e-6, 10.0, 5000)
    with pytest.raises(S.FallToCenter):
        S.find_eigenvalue(X.parse("-1/r^2 + r^2"), grid, 0)


def test_grid_convergence_order():
    errs = []
    for N in (200, 400):
        grid = S.RadialGrid.uniform(0.0, 10.0, N)
        errs.append(S.find_eigenvalue(HARM, grid, 1).E_numeric - 3.5)
    assert abs(errs[0]) >= 8 * abs(errs[1])


def test_node_theorem_and_ordering():
    s = C.build("harmonic_oscillator", D=3)
    grid = S.default_grid(s, 8)
    V = S.reduce_to_u(s)
    E = []
    for k in range(5):
        res = S.find_eigenvalue(V, grid, k)
        assert res.nodes == k
        E.append(res.E_numeric)
    assert all(b > a for a, b in zip(E, E[1:]))


def test_dimension_sweep():
    shifts = []
    for D in (1, 2, 3, 5, 7):
        s = C.build("harmonic_oscillator", D=D)
        res = S.solve_state(s, 2)
        shifts.append(res.E_numeric - D / 2)
    assert np.ptp(shifts) < 1e-6


@pytest.mark.parametrize("sid, n", [("harmonic_oscillator", 2), ("morse_like", 1), ("sech_poschl_teller", 3)])
def test_forward_and_matching_agree(sid, n):
    s = C.build(sid)
    a = S.solve_state(s, n, method="match").E_numeric
    b = S.solve_state(s, n, method="forward").E_numeric
    assert abs(a - b) < 1e-8 * max(1, abs(a))


def test_analytic_residuals():
    osc = C.build("harmonic_oscillator")
    assert S.residual(osc, 0) < 1e-6
    assert S.residual(osc, 0, energy=1.6) >= 0.09
    assert S.residual(C.build("morse_like"), 0) < 1e-5


def test_orthogonality_examples():
    osc = C.build("harmonic_oscillator")
    assert S.orthogonality(osc, 0, 2) < 1e-6
    assert S.orthogonality(osc, 2, 2) == pytest.approx(1.0, abs=1e-6)
    cou = C.build("coulomb")
    grid = S.RadialGrid.uniform(0.0, 80.0, 20000)
    assert S.orthogonality(cou, 0, 1, grid) < 1e-5


def test_eigenresult_fields():
    s = C.build("coulomb")
    res = S.solve_state(s, 1)
    assert res.E_analytic == -0.25
    assert res.rel_error == pytest.approx(abs(res.E_numeric + 0.25) / 0.25)
    assert res.u.shape == res.r.shape
    assert S.count_nodes(res.u) == 1


@pytest.mark.parametrize("sid", ["morse_like", "harmonic_oscillator", "coulomb", "hulthen_like",
                                 "trig_poschl_teller", "sech_poschl_teller"])
def test_verified_systems_pass(sid):
    s = C.build(sid)
    idx = s.bound_indices(3)
    for n in idx:
        chk = S.verify_state(s, n, partner=idx[0] if n != idx[0] else idx[-1])
        assert chk.passed, chk.row()


@pytest.mark.parametrize(
    "sid, error",
    [("eckart_like", "no state"), ("trig_scarf", "inverse-square"), ("rosen_morse", ""), ("hulthen_delta", ""),
     ("hyper_oscillator", "")],
)
def test_flagged_systems_fail_verification(sid, error):
    chk = S.verify_state(C.build(sid), C.build(sid).indices(2)[0])
    assert not chk.passed
    assert error in chk.error


def test_grid_validation():
    with pytest.raises(ValueError):
        S.RadialGrid.uniform(0, 1, 50)
    with pytest.raises(ValueError):
        S.RadialGrid.uniform(1, 0, 500)
    with pytest.raises(ValueError):
        S.RadialGrid(0.1, 1, 500, "log", origin=0.2)


def test_liouville_maps():
    for grid in (S.RadialGrid.logarithmic(1e-4, 10, 2000), S.RadialGrid.cell(0.0, 2.0, 20000)):
        dr = np.gradient(grid.r, grid.x)
        assert np.allclose(dr[1:-1], grid.jacobian[1:-1], rtol=1e-3)


@settings(max_examples=12, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2), st.sampled_from([1, 2]))
def test_oscillator_property(D, nr, omega):
    s = C.build("harmonic_oscillator", D=D, omega=omega)
    n = 2 * nr
    res = S.solve_state(s, n)
    assert res.rel_error < 1e-6
    assert res.nodes == s.expected_nodes(n)
