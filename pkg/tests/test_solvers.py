import numpy as np
import pytest

from adrcontrol import (
    ControlField,
    DiscreteProblem,
    PhysicalConfig,
    SolverBlowUpError,
    cfl_ratio,
    control_indices,
    gradient,
    inner_product,
    solve_adjoint,
    solve_perturbation,
    solve_state,
)
from adrcontrol.solvers import StateField

from conftest import smooth_probe_set


def make_problem(L=1.0, T=1.0, mu=0.1, eps=0.1, N=100, H=10, M=2, **weights):
    phys = PhysicalConfig(L=L, T=T, mu=mu, eps=eps, **weights)
    return DiscreteProblem.create(phys, N=N, H=H, M=M)


def random_controls(grid, rng, scale=1.0):
    return ControlField(scale * rng.standard_normal((grid.M + 1, grid.N + 1)))


class TestSolveState:
    def test_zero_data_gives_zero_trajectory(self):
        p = make_problem(N=20)
        y = solve_state(p, np.zeros(11), ControlField.zeros(p.grid))
        assert y.values.shape == (13, 22)
        assert np.all(y.values == 0.0)

    def test_constant_state_grows_by_reaction_factor(self):
        # with zero controls a spatially constant state obeys y^(n+1) = (1+dt)*y^n
        p = make_problem(mu=0.3, eps=0.2, N=25, H=5, M=1)
        c = 0.7
        y = solve_state(p, np.full(6, c), ControlField.zeros(p.grid))
        expected = c
        for n in range(p.grid.N + 2):
            assert y.interior[:, n] == pytest.approx(np.full(6, expected), rel=1e-13)
            expected *= 1.0 + p.grid.dt
        # ghost fill with zero fluxes copies the boundary nodes
        assert np.array_equal(y.left_ghost[:-1], y.interior[0, :-1])
        assert np.array_equal(y.right_ghost[:-1], y.interior[-1, :-1])

    def test_single_step_by_hand(self):
        # H=2, h=0.5, dt=0.1, mu=0.1, eps=0, y0 = (0,1,0), no controls:
        # each boundary node receives dt*mu/h^2 * 1 = 0.04, the peak loses
        # 2*dt*mu/h^2 but grows by dt through the reaction: 1 - 0.08 + 0.1
        p = make_problem(T=0.1, mu=0.1, eps=0.0, N=1, H=2, M=2)
        y = solve_state(p, np.array([0.0, 1.0, 0.0]), ControlField.zeros(p.grid))
        assert y.interior[:, 1] == pytest.approx([0.04, 1.02, 0.04], abs=1e-15)

    def test_boundary_ghost_relations_hold_at_every_step(self):
        p = make_problem(N=40, H=8, M=2)
        rng = np.random.default_rng(5)
        v = random_controls(p.grid, rng)
        y = solve_state(p, rng.standard_normal(9), v)
        g, mu = p.grid, p.phys.mu
        for n in range(g.N + 1):
            assert y.left_ghost[n] == y.interior[0, n] + (g.h / mu) * v.values[0, n]
            assert y.right_ghost[n] == y.interior[-1, n] + (g.h / mu) * v.values[g.M, n]
        # the column past the horizon is never read by the scheme
        assert y.left_ghost[-1] == 0.0
        assert y.right_ghost[-1] == 0.0

    def test_interior_sources_inject_at_control_nodes_only(self):
        p = make_problem(N=10, H=10, M=2)
        v = np.zeros((3, 11))
        v[1, 0] = 2.0  # middle control, first step only
        y = solve_state(p, np.zeros(11), ControlField(v))
        g = p.grid
        expected = np.zeros(11)
        expected[control_indices(g)[1]] = g.dt * 2.0 / g.h
        assert np.array_equal(y.interior[:, 1], expected)

    def test_linearity_in_data_and_controls(self):
        p = make_problem(N=60, H=12, M=3)
        rng = np.random.default_rng(9)
        y0a, y0b = rng.standard_normal((2, 13))
        va, vb = random_controls(p.grid, rng), random_controls(p.grid, rng)
        ya = solve_state(p, y0a, va)
        yb = solve_state(p, y0b, vb)
        combo = solve_state(p, 2.0 * y0a - 0.5 * y0b, ControlField(2.0 * va.values - 0.5 * vb.values))
        reference = 2.0 * ya.values - 0.5 * yb.values
        assert np.allclose(combo.values, reference, rtol=1e-12, atol=1e-12)

    def test_rejects_mismatched_shapes(self):
        p = make_problem()
        with pytest.raises(ValueError):
            solve_state(p, np.zeros(12), ControlField.zeros(p.grid))
        with pytest.raises(ValueError):
            solve_state(p, np.zeros(11), ControlField(np.zeros((3, 50))))

    def test_blow_up_raises_with_step_index(self):
        # cfl ratio 2 amplifies the pulse until the guard trips
        phys = PhysicalConfig(mu=1.0, eps=0.1)
        p = DiscreteProblem.create(phys, N=2503, H=50, M=2)
        assert cfl_ratio(p) > 1.9
        y0 = np.zeros(51)
        y0[20:31] = 10.0
        with pytest.raises(SolverBlowUpError) as info:
            solve_state(p, y0, ControlField.zeros(p.grid))
        assert 0 < info.value.step <= 2504
        assert str(info.value.step) in str(info.value)

    def test_deterministic_rerun(self):
        p = make_problem(N=30, H=6, M=2)
        rng = np.random.default_rng(3)
        v = random_controls(p.grid, rng)
        y0 = rng.standard_normal(7)
        a = solve_state(p, y0, v)
        b = solve_state(p, y0, v)
        assert np.array_equal(a.values, b.values)


class TestSolvePerturbation:
    def test_equals_state_from_rest(self):
        p = make_problem(N=30, H=10, M=5)
        v = random_controls(p.grid, np.random.default_rng(2))
        assert np.array_equal(
            solve_perturbation(p, v).values,
            solve_state(p, np.zeros(11), v).values,
        )

    def test_superposition(self):
        p = make_problem(N=50, H=10, M=2)
        rng = np.random.default_rng(4)
        va, vb = random_controls(p.grid, rng), random_controls(p.grid, rng)
        both = solve_perturbation(p, ControlField(va.values + vb.values))
        split = solve_perturbation(p, va).values + solve_perturbation(p, vb).values
        assert np.allclose(both.values, split, rtol=1e-12, atol=1e-12)


class TestSolveAdjoint:
    def test_zero_state_gives_zero_adjoint(self):
        p = make_problem(N=20)
        y = solve_state(p, np.zeros(11), ControlField.zeros(p.grid))
        q = solve_adjoint(p, y)
        assert q.values.shape == (13, 21)
        assert np.all(q.values == 0.0)

    def test_terminal_condition_scales_final_state(self):
        p = make_problem(T=0.1, mu=0.1, eps=0.0, N=1, H=2, M=2, k2=2.0)
        y = solve_state(p, np.array([1.0, 0.0, -1.0]), ControlField.zeros(p.grid))
        q = solve_adjoint(p, y)
        assert np.array_equal(q.interior[:, -1], 2.0 * y.terminal)

    def test_ghost_gains_match_robin_closure(self):
        # mu=0.2, eps=0.1, h=0.1: left gain mu/(mu - eps*h) = 0.2/0.19
        p = make_problem(mu=0.2, eps=0.1, N=60, H=10, M=2)
        rng = np.random.default_rng(8)
        y = solve_state(p, rng.standard_normal(11), random_controls(p.grid, rng))
        q = solve_adjoint(p, y)
        left_gain = 0.2 / 0.19
        right_gain = 0.19 / 0.2
        assert left_gain == pytest.approx(1.0526315789473684, rel=1e-15)
        for n in range(p.grid.N + 1):
            assert q.left_ghost[n] == pytest.approx(left_gain * q.interior[0, n], rel=1e-12)
            assert q.right_ghost[n] == pytest.approx(right_gain * q.interior[-1, n], rel=1e-12)
        # levels n >= 1 are filled by assignment, so they match exactly
        assert np.array_equal(q.left_ghost[1:], (p.phys.mu / (p.phys.mu - p.phys.eps * p.grid.h)) * q.interior[0, 1:])

    def test_initial_level_ghosts_are_filled(self):
        p = make_problem(N=15, H=6, M=2)
        rng = np.random.default_rng(1)
        y = solve_state(p, rng.standard_normal(7), random_controls(p.grid, rng))
        q = solve_adjoint(p, y)
        assert q.left_ghost[0] != 0.0
        mu, eps, h = p.phys.mu, p.phys.eps, p.grid.h
        assert q.left_ghost[0] == (mu / (mu - eps * h)) * q.interior[0, 0]
        assert q.right_ghost[0] == ((mu - eps * h) / mu) * q.interior[-1, 0]

    def test_linearity_in_state(self):
        p = make_problem(N=40, H=8, M=2)
        rng = np.random.default_rng(12)
        ya = solve_state(p, rng.standard_normal(9), random_controls(p.grid, rng))
        yb = solve_state(p, rng.standard_normal(9), random_controls(p.grid, rng))
        qa, qb = solve_adjoint(p, ya), solve_adjoint(p, yb)
        combined = solve_adjoint(p, StateField(3.0 * ya.values + 0.25 * yb.values))
        assert np.allclose(combined.values, 3.0 * qa.values + 0.25 * qb.values, rtol=1e-12, atol=1e-12)

    def test_rejects_mismatched_state_shape(self):
        p = make_problem(N=10, H=10)
        other = make_problem(N=20, H=10)
        y = solve_state(other, np.zeros(11), ControlField.zeros(other.grid))
        with pytest.raises(ValueError):
            solve_adjoint(p, y)


class TestDuality:
    @staticmethod
    def defect(H, N, seed):
        """Integration-by-parts residual between state and adjoint pairings."""
        p = make_problem(N=N, H=H, M=2)
        g = p.grid
        v, dv, y0 = smooth_probe_set(g, p.phys, seed)
        y = solve_state(p, y0, v)
        dy = solve_perturbation(p, dv)
        q = solve_adjoint(p, y)
        running = g.dt * g.h * float(np.sum(y.interior[:, : g.N + 1] * dy.interior[:, : g.N + 1]))
        terminal = g.h * float(np.sum(y.terminal * dy.terminal))
        traces = gradient(p, ControlField.zeros(g), q)
        paired = inner_product(g, traces, dv)
        return abs(running + terminal - paired) / (abs(running) + abs(terminal) + abs(paired))

    @pytest.mark.parametrize("seed", [0, 3])
    def test_defect_shrinks_under_refinement(self, seed):
        defects = [self.defect(10, 100, seed), self.defect(20, 200, seed), self.defect(40, 400, seed)]
        assert defects[0] > defects[1] > defects[2]
        assert defects[2] < 2e-2
