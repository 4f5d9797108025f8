import csv
import io
import json
import math

import numpy as np
import pytest

from paneitz.constants import OperatorParams, constant_branch
from paneitz.field import PeriodicField
from paneitz.geometry import ManifoldSpec, product_volume
from paneitz.solver import SolverOptions, minimize_quotient, rescale_to_solution
from paneitz.sweep import (
    CSV_COLUMNS,
    SweepConfig,
    branch_continuation,
    emit,
    quarter_square,
    run_sweep,
)

SPEC = ManifoldSpec(5, 1.0)
V = product_volume(SPEC)


@pytest.fixture(scope="module")
def short_records():
    config = SweepConfig(spec=SPEC, alphas=(2.0, 4.0, 8.0))
    return run_sweep(config)


class TestConfig:
    def test_rejects_violating_schedule(self):
        with pytest.raises(ValueError, match="alpha\\^2/4"):
            SweepConfig(spec=SPEC, alphas=(1.0, 2.0), schedule=lambda al: al)

    def test_rejects_unsorted_grid(self):
        with pytest.raises(ValueError):
            SweepConfig(spec=SPEC, alphas=(2.0, 1.0))

    def test_default_ball_radius(self):
        config = SweepConfig(spec=SPEC, alphas=(1.0, 2.0))
        assert config.ball_radius == pytest.approx(SPEC.period / 8.0)


class TestRunSweep:
    def test_below_bifurcation_constant_only(self):
        config = SweepConfig(spec=SPEC, alphas=(0.5,))
        (rec,) = run_sweep(config)
        assert rec.e_nonconst is None
        assert not rec.is_nonconstant
        assert rec.e_m_estimate == pytest.approx((0.0625) ** 1.25 * V, rel=1e-12)
        assert rec.e_m_estimate == pytest.approx(5.168, rel=1e-3)
        assert math.isnan(rec.r_grad_l2)  # constant row: no gradient ratio
        assert rec.r_l2 == pytest.approx(0.75, rel=1e-9)

    def test_nonconstant_branch_above_threshold(self, short_records):
        for rec in short_records:
            assert rec.is_nonconstant
            assert rec.e_nonconst is not None
            assert rec.e_nonconst < rec.e_const
            assert rec.e_m_estimate == rec.e_nonconst

    def test_constant_energy_closed_form(self, short_records):
        for rec in short_records:
            _, e_const = constant_branch(5, rec.a_alpha, V)
            assert rec.e_const == pytest.approx(e_const, rel=1e-13)

    def test_upper_bound_by_constant_energy(self, short_records):
        for rec in short_records:
            assert rec.e_m_estimate <= rec.a_alpha ** 1.25 * V * (1 + 1e-12)

    def test_rows_sorted_and_factorized(self, short_records):
        alphas = [r.alpha for r in short_records]
        assert alphas == sorted(alphas)
        for rec in short_records:
            assert rec.c_alpha + rec.d_alpha == pytest.approx(rec.alpha, rel=1e-12)
            assert rec.c_alpha * rec.d_alpha == pytest.approx(rec.a_alpha, rel=1e-12)

    def test_solver_failure_keeps_constant_row(self):
        # an absurdly strict iteration cap forces the nonconstant attempts to
        # fail; the sweep must still produce rows
        config = SweepConfig(
            spec=SPEC,
            alphas=(2.0,),
            solver=SolverOptions(modes=16, max_iter=1, adapt_modes=False),
        )
        (rec,) = run_sweep(config)
        assert rec.e_nonconst is None
        assert rec.e_m_estimate == rec.e_const


class TestContinuation:
    def test_follows_branch(self):
        params0 = OperatorParams(2.0, 1.0)
        seed = PeriodicField.from_function(
            SPEC, lambda s: 1.0 + 0.05 * np.cos(2 * math.pi * s / SPEC.period), 64
        )
        sol0 = rescale_to_solution(minimize_quotient(seed, params0), params0)
        params1 = OperatorParams(2.5, quarter_square(2.5))
        sol1 = branch_continuation(sol0, params1, schedule=quarter_square)
        assert not sol1.is_constant
        assert sol1.params.alpha == 2.5
        assert sol1.energy > sol0.energy

    def test_constant_branch_continues_to_constant(self):
        # the constant persists as a solution for every alpha, including
        # across the mode-1 instability threshold
        params0 = OperatorParams(0.5, quarter_square(0.5))
        u0 = PeriodicField.constant(SPEC, quarter_square(0.5) ** 0.125, 32)
        from paneitz.solver import newton_solve

        sol0 = newton_solve(u0, params0, SolverOptions(modes=32))
        for alpha in (0.8, 1.5):
            params1 = OperatorParams(alpha, quarter_square(alpha))
            sol1 = branch_continuation(sol0, params1, schedule=quarter_square)
            assert sol1.is_constant
            u_bar, _ = constant_branch(5, quarter_square(alpha), V)
            assert sol1.field.mean == pytest.approx(u_bar, rel=1e-10)


class TestEmit:
    def test_csv_shape(self, short_records):
        text = emit(short_records[:1], "csv")
        lines = text.strip().split("\n")
        assert len(lines) == 2
        assert lines[0] == ",".join(CSV_COLUMNS)

    def test_csv_round_trip_17_digits(self, short_records):
        text = emit(short_records, "csv")
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == len(short_records)
        float_columns = {
            "alpha": "alpha",
            "a_alpha": "a_alpha",
            "c_alpha": "c_alpha",
            "d_alpha": "d_alpha",
            "E_const": "e_const",
            "E_nonconst": "e_nonconst",
            "E_m_estimate": "e_m_estimate",
            "lambda_quotient": "lambda_quotient",
            "R_L2": "r_l2",
            "R_gradL2": "r_grad_l2",
            "hessian_ratio_over_a": "hessian_ratio_over_a",
            "residual_sup": "residual_sup",
        }
        for row, rec in zip(rows, short_records):
            for column, attr in float_columns.items():
                assert float(row[column]) == getattr(rec, attr), column
            assert row["is_nonconstant"] == ("true" if rec.is_nonconstant else "false")
            assert row["lambda_below_k0_inv2"] in ("true", "false")
            assert int(row["modes_used"]) == rec.modes_used
            assert int(row["newton_iters"]) == rec.newton_iters

    def test_absent_branch_is_empty_cell(self):
        config = SweepConfig(spec=SPEC, alphas=(0.5,))
        text = emit(run_sweep(config), "csv")
        row = next(csv.DictReader(io.StringIO(text)))
        assert row["E_nonconst"] == ""

    def test_json_keys_and_values(self, short_records):
        payload = json.loads(emit(short_records, "json"))
        assert [set(r.keys()) for r in payload] == [set(CSV_COLUMNS)] * len(short_records)
        assert payload[0]["alpha"] == 2.0
        assert isinstance(payload[0]["is_nonconstant"], bool)

    def test_reruns_are_byte_identical(self):
        config = SweepConfig(spec=SPEC, alphas=(2.0, 4.0))
        first = emit(run_sweep(config), "csv")
        second = emit(run_sweep(config), "csv")
        assert first == second

    def test_write_failure_has_path_context(self, short_records, tmp_path):
        target = tmp_path / "missing" / "out.csv"
        with pytest.raises(OSError, match="out.csv"):
            emit(short_records, "csv", target)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            emit([], "csv")
