import numpy as np
import pytest

from sostensor import sdp


def feas_problem(x12):
    cons = [
        sdp.SdpConstraint(((0, 0, 1.0),), (), 1.0),
        sdp.SdpConstraint(((1, 1, 1.0),), (), 1.0),
        sdp.SdpConstraint(((0, 1, 0.5),), (), x12),
    ]
    return sdp.SdpProblem(2, 0, cons)


class TestSolve:
    def test_feasible_correlation(self):
        sol = sdp.solve(feas_problem(0.9))
        assert sol.status == sdp.OPTIMAL
        assert sol.X[0, 1] == pytest.approx(0.9, abs=1e-6)
        assert np.linalg.det(sol.X) == pytest.approx(0.19, abs=1e-5)
        assert sol.psd_violation <= 1e-9

    def test_infeasible_correlation_gives_farkas(self):
        sol = sdp.solve(feas_problem(1.1), sdp.SolveOptions(max_iter=80_000))
        assert sol.status == sdp.INFEASIBLE_EVIDENCE
        y = sol.farkas
        assert y is not None
        S = np.array([[y[0], 0.5 * y[2]], [0.5 * y[2], y[1]]])
        assert np.linalg.eigvalsh(S)[0] >= -1e-7
        assert float(np.array([1.0, 1.0, 1.1]) @ y) < 0

    def test_min_trace(self):
        cons = [sdp.SdpConstraint(((0, 0, 1.0), (1, 1, 1.0)), (), 2.0)]
        p = sdp.SdpProblem(
            2, 0, cons, objective_matrix=((0, 0, 1.0), (1, 1, 1.0)), sense="min"
        )
        sol = sdp.solve(p)
        assert sol.status == sdp.OPTIMAL
        assert sol.objective_value == pytest.approx(2.0, abs=1e-6)

    def test_free_variable_objective(self):
        # max r with X11 - r = 1, X22 + r = 1 => r* = 1 at X = diag(2, 0)
        cons = [
            sdp.SdpConstraint(((0, 0, 1.0),), (-1.0,), 1.0),
            sdp.SdpConstraint(((1, 1, 1.0),), (1.0,), 1.0),
        ]
        p = sdp.SdpProblem(2, 1, cons, objective_free=(1.0,), sense="max")
        sol = sdp.solve(p)
        assert sol.status == sdp.OPTIMAL
        assert sol.free[0] == pytest.approx(1.0, abs=1e-5)

    def test_inconsistent_rows_detected(self):
        cons = [
            sdp.SdpConstraint(((0, 0, 1.0),), (), 1.0),
            sdp.SdpConstraint(((0, 0, 1.0),), (), 2.0),
        ]
        sol = sdp.solve(sdp.SdpProblem(1, 0, cons))
        assert sol.status == sdp.INFEASIBLE_EVIDENCE

    def test_determinism(self):
        p = feas_problem(0.7)
        a = sdp.solve(p)
        b = sdp.solve(p)
        assert np.array_equal(a.X, b.X)
        assert a.iterations == b.iterations
        assert a.objective_value == b.objective_value

    def test_scale_covariance(self):
        p = feas_problem(0.6)
        scaled = sdp.SdpProblem(
            2,
            0,
            [
                sdp.SdpConstraint(
                    tuple((i, j, 3.0 * v) for i, j, v in c.matrix_entries),
                    (),
                    3.0 * c.rhs,
                )
                for c in p.constraints
            ],
        )
        a, b = sdp.solve(p), sdp.solve(scaled)
        assert np.allclose(a.X, b.X, atol=1e-7)

    def test_best_iterate_primal_tracked(self):
        sol = sdp.solve(feas_problem(0.5))
        primal, _, psd = sdp.residuals(feas_problem(0.5), sol)
        assert primal == pytest.approx(sol.primal_residual, abs=1e-12)
        assert psd <= 1e-9


class TestProjection:
    def test_clamp_negative(self):
        out = sdp.psd_project(np.diag([1.0, -2.0]))
        assert np.allclose(out, np.diag([1.0, 0.0]))

    def test_fixed_point_on_psd(self):
        X = np.array([[2.0, 0.5], [0.5, 1.0]])
        assert np.allclose(sdp.psd_project(X), X)

    def test_antidiagonal(self):
        out = sdp.psd_project(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(out, np.full((2, 2), 0.5))

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        S = rng.standard_normal((5, 5))
        S = S + S.T
        P = sdp.psd_project(S)
        assert np.allclose(sdp.psd_project(P), P)

    def test_nonfinite_rejected(self):
        with pytest.raises(sdp.SdpError):
            sdp.psd_project(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestResiduals:
    def test_exact_point(self):
        p = feas_problem(0.9)
        sol = sdp.SdpSolution(
            X=np.array([[1.0, 0.9], [0.9, 1.0]]),
            free=np.zeros(0),
            objective_value=0.0,
            primal_residual=0.0,
            dual_residual=0.0,
            psd_violation=0.0,
            status=sdp.OPTIMAL,
            iterations=0,
        )
        primal, _, psd = sdp.residuals(p, sol)
        assert primal == pytest.approx(0.0, abs=1e-12)
        assert psd == pytest.approx(0.0, abs=1e-12)

    def test_zero_matrix_violates(self):
        p = sdp.SdpProblem(1, 0, [sdp.SdpConstraint(((0, 0, 1.0),), (), 1.0)])
        sol = sdp.SdpSolution(
            X=np.zeros((1, 1)), free=np.zeros(0), objective_value=0.0,
            primal_residual=0.0, dual_residual=0.0, psd_violation=0.0,
            status=sdp.OPTIMAL, iterations=0,
        )
        primal, _, _ = sdp.residuals(p, sol)
        assert primal == pytest.approx(1.0)

    def test_psd_violation_measured(self):
        p = sdp.SdpProblem(2, 0, [sdp.SdpConstraint(((0, 0, 1.0),), (), -0.25)])
        sol = sdp.SdpSolution(
            X=np.diag([-0.25, 1.0]), free=np.zeros(0), objective_value=0.0,
            primal_residual=0.0, dual_residual=0.0, psd_violation=0.0,
            status=sdp.OPTIMAL, iterations=0,
        )
        _, _, psd = sdp.residuals(p, sol)
        assert psd == pytest.approx(0.25)


class TestDumpLoad:
    def test_round_trip(self):
        cons = [
            sdp.SdpConstraint(((0, 0, 1.0), (0, 1, -2.5)), (1.0, 0.0), 3.0),
            sdp.SdpConstraint(((1, 1, 4.0),), (0.0, -1.0), -1.0),
        ]
        p = sdp.SdpProblem(
            2, 2, cons, objective_matrix=((0, 1, 1.0),),
            objective_free=(0.0, 2.0), sense="max",
        )
        q = sdp.load_problem(sdp.dump_problem(p))
        assert q.block_size == p.block_size
        assert q.num_free == p.num_free
        assert q.sense == p.sense
        assert q.constraints[0].matrix_entries == p.constraints[0].matrix_entries
        assert q.constraints[1].rhs == p.constraints[1].rhs
        assert q.objective_free == p.objective_free


class TestExampleFamilySdp:
    def test_block_values_match_closed_form(self):
        # force the semidefinite path on the 4-variable blocks; the program
        # value must match n - 1 within 1e-3 for each size
        from sostensor import generators, spectral

        for n in (4, 8, 20):
            A = generators.example54(n)
            res = spectral.min_h_eigenvalue(
                A,
                spectral.EigMinOptions(
                    blockwise="on", use_closed_form=False, tol=1e-5
                ),
            )
            assert res.lambda_min == pytest.approx(n - 1, abs=1e-3)
            assert all(b.method == "sdp" for b in res.per_block)
