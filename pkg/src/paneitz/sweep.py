"""Energy-function exploration: sweep alpha, continue solution branches,
and tabulate the minimal-energy estimate E_m(alpha).

For every alpha the constant branch a^((n-4)/8) is available in closed form.
A nonconstant branch is attempted once the constant's first nonzero Fourier
mode turns linearly unstable: continuation seeds Newton with the previous
nonconstant solution (first-order predictor, step halving on failure), and
the quotient-minimization route from a mode-1 perturbed constant serves as
the fresh start and fallback.  E_m is reported as an estimate: it is an
upper bound over the branches actually found, since the true infimum runs
over all solutions (including any that break the circle-reduced ansatz).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .constants import OperatorParams, constant_branch, critical_exponent, sharp_constant
from .diagnostics import concentration_ratios
from .field import PeriodicField
from .geometry import ManifoldSpec, product_volume
from .solver import (
    ConvergenceError,
    PositivityError,
    Solution,
    SolverOptions,
    continuation_init,
    minimize_quotient,
    newton_solve,
    quotient,
    rescale_to_solution,
)

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "run_sweep",
    "branch_continuation",
    "emit",
    "CSV_COLUMNS",
    "quarter_square",
]


def quarter_square(alpha: float) -> float:
    """Default coefficient schedule a = alpha^2/4."""
    return alpha * alpha / 4.0


@dataclass(frozen=True)
class SweepConfig:
    spec: ManifoldSpec
    alphas: tuple[float, ...]
    schedule: Callable[[float], float] = quarter_square
    delta: float | None = None          # diagnostics ball radius, default L/8
    solver: SolverOptions = dc_field(default_factory=SolverOptions)
    perturbation: float = 0.1           # mode-1 seed amplitude, relative

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) == 0 or alphas[0] <= 0:
            raise ValueError("alpha grid must be nonempty and positive")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alpha grid must be strictly increasing")
        for al in alphas:
            a = self.schedule(al)
            if a > al * al / 4.0:
                raise ValueError(
                    f"schedule violates a <= alpha^2/4 at alpha={al}: a={a}"
                )
            if a <= 0:
                raise ValueError(f"schedule must be positive, got a={a} at alpha={al}")
        object.__setattr__(self, "alphas", alphas)

    @property
    def ball_radius(self) -> float:
        return self.delta if self.delta is not None else self.spec.period / 8.0


@dataclass(frozen=True)
class SweepRecord:
    alpha: float
    a_alpha: float
    c_alpha: float
    d_alpha: float
    e_const: float
    e_nonconst: float | None
    e_m_estimate: float
    lambda_quotient: float
    lambda_below_k0_inv2: bool
    is_nonconstant: bool
    r_l2: float
    r_grad_l2: float
    hessian_ratio_over_a: float
    modes_used: int
    newton_iters: int
    residual_sup: float


def branch_continuation(
    prev: Solution,
    params: OperatorParams,
    opts: SolverOptions | None = None,
    schedule: Callable[[float], float] | None = None,
    max_halvings: int = 4,
) -> Solution:
    """Continue a converged solution to new parameters.

    Newton is seeded with a first-order predictor; on failure the alpha step
    is halved (up to ``max_halvings`` times) and walked in substeps.
    Persistent failure raises ConvergenceError ("branch lost").
    """
    opts = opts or SolverOptions()
    a0, a1 = prev.params.alpha, params.alpha

    def params_at(alpha: float) -> OperatorParams:
        if alpha == a1:
            return params
        if schedule is not None:
            return OperatorParams(alpha, schedule(alpha))
        frac = (alpha - a0) / (a1 - a0) if a1 != a0 else 1.0
        return OperatorParams(alpha, prev.params.a_alpha + frac * (params.a_alpha - prev.params.a_alpha))

    last_error: Exception | None = None
    for halvings in range(max_halvings + 1):
        steps = 2**halvings
        sol = prev
        try:
            for i in range(1, steps + 1):
                target = params_at(a0 + (a1 - a0) * i / steps)
                init = continuation_init(sol, target)
                sol = newton_solve(init, target, opts)
            return sol
        except (ConvergenceError, PositivityError) as exc:
            last_error = exc
    raise ConvergenceError(
        f"branch lost between alpha={a0} and alpha={a1}: {last_error}"
    )


def _mode1_seed(spec: ManifoldSpec, u_bar: float, amplitude: float, modes: int) -> PeriodicField:
    coeffs = np.zeros(modes, dtype=complex)
    coeffs[0] = u_bar
    coeffs[1] = 0.5 * amplitude * u_bar
    coeffs[-1] = 0.5 * amplitude * u_bar
    return PeriodicField(spec, coeffs)


def _mode1_unstable(spec: ManifoldSpec, params: OperatorParams) -> bool:
    mu = (1.0 / spec.t) ** 2
    two_sharp = critical_exponent(spec.n)
    return mu * mu + params.alpha * mu + params.a_alpha - (two_sharp - 1.0) * params.a_alpha < 0.0


def _nonconstant_solution(
    config: SweepConfig, params: OperatorParams, prev: Solution | None
) -> Solution | None:
    spec = config.spec
    opts = config.solver
    if prev is not None:
        try:
            sol = branch_continuation(prev, params, opts, config.schedule)
            if not sol.is_constant:
                return sol
        except (ConvergenceError, PositivityError):
            pass
    u_bar = params.a_alpha ** ((spec.n - 4) / 8.0)
    seed = _mode1_seed(spec, u_bar, config.perturbation, opts.modes)
    try:
        qm = minimize_quotient(seed, params)
        sol = rescale_to_solution(qm, params, opts)
        return None if sol.is_constant else sol
    except (ConvergenceError, PositivityError):
        return None


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Sweep the alpha grid in ascending order; one record per alpha.

    Solver failures mark the nonconstant branch absent in that row and the
    sweep continues.
    """
    spec = config.spec
    volume = product_volume(spec)
    _, k0_inv_sq = sharp_constant(spec.n)
    delta = config.ball_radius
    records: list[SweepRecord] = []
    prev_nc: Solution | None = None
    for alpha in config.alphas:
        params = OperatorParams(alpha, config.schedule(alpha))
        u_bar, e_const = constant_branch(spec.n, params.a_alpha, volume)
        sol_nc = (
            _nonconstant_solution(config, params, prev_nc)
            if _mode1_unstable(spec, params)
            else None
        )
        if sol_nc is not None:
            prev_nc = sol_nc
        if sol_nc is not None and sol_nc.energy <= e_const:
            chosen: Solution = sol_nc
        else:
            chosen = newton_solve(
                PeriodicField.constant(spec, u_bar, config.solver.modes),
                params,
                config.solver,
            )
        report = concentration_ratios(chosen.field, delta, params)
        records.append(
            SweepRecord(
                alpha=alpha,
                a_alpha=params.a_alpha,
                c_alpha=params.c_alpha,
                d_alpha=params.d_alpha,
                e_const=e_const,
                e_nonconst=None if sol_nc is None else sol_nc.energy,
                e_m_estimate=min(e_const, sol_nc.energy) if sol_nc is not None else e_const,
                lambda_quotient=chosen.lambda_quotient,
                lambda_below_k0_inv2=chosen.lambda_quotient < k0_inv_sq,
                is_nonconstant=not chosen.is_constant,
                r_l2=report.r_l2,
                r_grad_l2=report.r_grad_l2,
                hessian_ratio_over_a=report.hessian_ratio_over_a,
                modes_used=chosen.modes,
                newton_iters=chosen.newton_iters,
                residual_sup=chosen.residual_sup,
            )
        )
    return records


# --- emission ----------------------------------------------------------------

CSV_COLUMNS = [
    "alpha",
    "a_alpha",
    "c_alpha",
    "d_alpha",
    "E_const",
    "E_nonconst",
    "E_m_estimate",
    "lambda_quotient",
    "lambda_below_k0_inv2",
    "is_nonconstant",
    "R_L2",
    "R_gradL2",
    "hessian_ratio_over_a",
    "modes_used",
    "newton_iters",
    "residual_sup",
]


def _record_fields(r: SweepRecord) -> list:
    return [
        r.alpha,
        r.a_alpha,
        r.c_alpha,
        r.d_alpha,
        r.e_const,
        r.e_nonconst,
        r.e_m_estimate,
        r.lambda_quotient,
        r.lambda_below_k0_inv2,
        r.is_nonconstant,
        r.r_l2,
        r.r_grad_l2,
        r.hessian_ratio_over_a,
        r.modes_used,
        r.newton_iters,
        r.residual_sup,
    ]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(value, ".17g")


def emit(records: Sequence[SweepRecord], fmt: str = "csv", path=None) -> str:
    """Render records as CSV (fixed header) or JSON; deterministic bytes.

    Writes to ``path`` when given and always returns the text.  In JSON,
    missing branches are null; NaN diagnostics are serialized as null too.
    """
    if not records:
        raise ValueError("no records to emit")
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for r in records:
            lines.append(",".join(_csv_cell(v) for v in _record_fields(r)))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        rows = []
        for r in records:
            row = {}
            for key, value in zip(CSV_COLUMNS, _record_fields(r)):
                if isinstance(value, float) and math.isnan(value):
                    value = None
                row[key] = value
            rows.append(row)
        text = json.dumps(rows, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    if path is not None:
        try:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write sweep output to {path}: {exc}") from exc
    return text
