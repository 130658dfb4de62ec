import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from luequiv.phases import solve_phase_system, wrap


def test_wrap_range():
    a = wrap(np.array([np.pi, -np.pi, 3 * np.pi, 0.5, -7.0]))
    assert np.all(a > -np.pi) and np.all(a <= np.pi)
    assert np.allclose(np.exp(1j * a), np.exp(1j * np.array([np.pi, -np.pi, 3 * np.pi, 0.5, -7.0])))


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6))
def test_consistent_systems_are_solved_mod_two_pi(seed, rows, cols):
    rng = np.random.default_rng(seed)
    C = rng.integers(-2, 3, size=(rows, cols))
    x0 = rng.uniform(-np.pi, np.pi, cols)
    phi = C @ x0 + 2 * np.pi * rng.integers(-3, 4, rows)
    sol = solve_phase_system(C, phi)
    assert sol.consistent(1e-9)
    assert np.allclose(wrap(C @ sol.x - phi), 0, atol=1e-9)


def test_inconsistent_system_yields_annihilating_row():
    # x1 + x2 = a, x1 + x2 = b with a != b mod 2 pi
    C = np.array([[1, 1], [1, 1], [1, 0]])
    phi = np.array([0.3, 1.1, 0.0])
    sol = solve_phase_system(C, phi)
    assert not sol.consistent(1e-6)
    row, resid = sol.worst()
    assert np.all(row @ C == 0)
    assert abs(resid) == np.float64(abs(wrap(row @ phi)))
    assert abs(abs(resid) - 0.8) < 1e-12


def test_integer_torsion_is_respected():
    # 2 x = pi is solvable (x = pi/2) even though x = pi/2 is not an integer combination
    sol = solve_phase_system(np.array([[2]]), np.array([np.pi]))
    assert sol.consistent(1e-12)
    assert np.isclose(np.exp(2j * sol.x[0]), -1)
