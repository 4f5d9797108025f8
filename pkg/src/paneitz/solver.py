"""Positive solutions of u'''' - alpha u'' + a u = u^(2#-1) on the circle,
circle-reduced from S^1(t) x S^(n-1).

Two routes produce solutions:

* ``newton_solve``: damped Newton in Fourier coefficient space.  The linear
  part is the diagonal symbol mu^2 + alpha mu + a (mu = (m/t)^2); the
  nonlinearity is evaluated on an oversampled grid (dealiased) and its
  Jacobian is the dense Toeplitz convolution matrix of (2#-1) u_+^(2#-2).
  Translation invariance makes the Jacobian singular along u', so for
  nonconstant iterates the linear solves are bordered with the phase
  constraint <delta, u'> = 0.

* ``minimize_quotient``: monotone descent on the Sobolev quotient
  Q(u) = <Pu, u> / ||u||_{2#}^2 with the natural preconditioner P^{-1}
  (descent direction u - Q(u) P^{-1} u_+^(2#-1), step halving on failure to
  decrease).  Since P^{-1} = (Delta + c)^{-1} (Delta + d)^{-1} with c, d > 0
  preserves positivity on the circle, positive iterates stay positive.

During Newton iteration the nonlinearity uses the positive part u_+ plus a
quadratic penalty on the negative part; acceptance re-verifies the
penalty-free residual and min u > 0, so sign-changing roots are never
silently returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import OperatorParams, critical_exponent, sharp_constant
from .field import PeriodicField, _mode_numbers, _truncate_full, norms
from .geometry import ManifoldSpec

__all__ = [
    "ConvergenceError",
    "PositivityError",
    "SolverOptions",
    "Solution",
    "residual",
    "newton_solve",
    "quotient",
    "QuotientMinimum",
    "minimize_quotient",
    "rescale_to_solution",
    "linearized_operator",
    "linearized_spectrum",
    "bifurcation_alpha",
    "continuation_init",
]


class ConvergenceError(RuntimeError):
    """Iteration failed; carries the last iterate and residual."""

    def __init__(self, message: str, last: PeriodicField | None = None, residual_sup: float = math.nan):
        super().__init__(message)
        self.last = last
        self.residual_sup = residual_sup


class PositivityError(RuntimeError):
    """Converged to a field that is not strictly positive."""


@dataclass(frozen=True)
class SolverOptions:
    modes: int = 64
    tol: float = 1e-11            # absolute residual sup target
    rtol: float = 5e-15           # floor relative to the nonlinear-term scale
    max_iter: int = 50
    max_backtracks: int = 30
    penalty_weight: float = 10.0
    adapt_modes: bool = True
    max_modes: int = 512
    tail_tol: float = 1e-10       # coefficient l1 tail mass triggering refinement

    def __post_init__(self):
        if self.modes < 16 or self.modes % 2 != 0:
            raise ValueError("mode count must be even and >= 16")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class Solution:
    field: PeriodicField
    params: OperatorParams
    residual_sup: float
    energy: float
    lambda_quotient: float
    is_constant: bool
    newton_iters: int

    @property
    def modes(self) -> int:
        return self.field.modes


# --- residual ----------------------------------------------------------------


def _symbol(spec: ManifoldSpec, params: OperatorParams, size: int) -> np.ndarray:
    mu = (_mode_numbers(size) / spec.t) ** 2
    return mu * mu + params.alpha * mu + params.a_alpha


def _nonlinear_coeffs(u: PeriodicField, exponent: float, penalty: float = 0.0) -> np.ndarray:
    """Coefficients of u_+^exponent (minus penalty * u_-), dealiased."""
    fine = u.fine_values()
    g = np.where(fine > 0.0, fine, 0.0) ** exponent
    if penalty:
        g = g - penalty * np.minimum(fine, 0.0)
    return _truncate_full(np.fft.fft(g) / g.size, u.modes)


def residual(u: PeriodicField, params: OperatorParams, penalty: float = 0.0) -> PeriodicField:
    """F(u) = Delta^2 u + alpha Delta u + a u - u_+^(2#-1) (plus penalty term)."""
    p = critical_exponent(u.spec.n) - 1.0
    sym = _symbol(u.spec, params, u.modes)
    coeffs = sym * u.coeffs - _nonlinear_coeffs(u, p, penalty)
    return PeriodicField(u.spec, coeffs)


def _residual_sup(u: PeriodicField, params: OperatorParams, penalty: float = 0.0) -> float:
    return float(np.max(np.abs(residual(u, params, penalty).values)))


# --- Newton ------------------------------------------------------------------


def _jacobian(u: PeriodicField, params: OperatorParams, penalty: float = 0.0) -> np.ndarray:
    """Dense coefficient-space Jacobian diag(symbol) - Toeplitz(weight)."""
    p = critical_exponent(u.spec.n) - 1.0
    fine = u.fine_values()
    weight = p * np.where(fine > 0.0, fine, 0.0) ** (p - 1.0)
    if penalty:
        weight = weight - penalty * (fine < 0.0)
    nf = fine.size
    what = np.fft.fft(weight) / nf
    m = _mode_numbers(u.modes)
    sym = _symbol(u.spec, params, u.modes)
    conv = what[(m[:, None] - m[None, :]) % nf]
    return np.diag(sym.astype(complex)) - conv


def _solve_step(jac: np.ndarray, rhs: np.ndarray, phase: np.ndarray | None) -> np.ndarray:
    n = rhs.size
    if phase is None:
        return np.linalg.solve(jac, rhs)
    bordered = np.zeros((n + 1, n + 1), dtype=complex)
    bordered[:n, :n] = jac
    bordered[:n, n] = phase
    bordered[n, :n] = np.conj(phase)
    out = np.linalg.solve(bordered, np.concatenate([rhs, [0.0]]))
    return out[:n]


def _symmetrize(coeffs: np.ndarray) -> np.ndarray:
    idx = (-np.arange(coeffs.size)) % coeffs.size
    return 0.5 * (coeffs + np.conj(coeffs[idx]))


def _nonlinear_scale(u: PeriodicField) -> float:
    p = critical_exponent(u.spec.n) - 1.0
    peak = float(np.max(np.abs(u.fine_values())))
    return max(1.0, peak**p)


def _recenter(u: PeriodicField) -> PeriodicField:
    """Translate so the maximum sits at s = 0 (deterministic representative).

    The discrete argmax is refined to a critical point of u by Newton on u',
    so recentered translates of the same solution agree beyond the grid
    resolution.
    """
    fine = u.fine_values()
    s0 = float(u.fine_grid()[int(np.argmax(fine))])
    kap = u.wavenumbers()
    c1 = u.coeffs * (1j * kap)
    c2 = u.coeffs * -(kap**2)

    def at(coeffs: np.ndarray, s: float) -> float:
        return float(np.real(np.sum(coeffs * np.exp(1j * kap * s))))

    for _ in range(8):
        curv = at(c2, s0)
        if curv >= 0.0:  # not a maximum; keep the grid location
            break
        step = at(c1, s0) / curv
        s0 -= step
        if abs(step) < 1e-14 * u.spec.period:
            break
    return u.shift(s0) if s0 != 0.0 else u


_CONSTANT_FRACTION = 1e-7


def _newton_fixed(init: PeriodicField, params: OperatorParams, opts: SolverOptions):
    """Newton at fixed resolution; returns (field, penalty-free sup, iterations)."""
    u = init
    pen = opts.penalty_weight
    res_sup = _residual_sup(u, params, pen)
    tol_eff = max(opts.tol, opts.rtol * _nonlinear_scale(u))
    if res_sup <= tol_eff:
        return u, _residual_sup(u, params), 0
    for it in range(1, opts.max_iter + 1):
        jac = _jacobian(u, params, pen)
        rhs = residual(u, params, pen).coeffs
        phase = None
        if u.nonconstant_fraction() > _CONSTANT_FRACTION:
            phase = u.derivative(1).coeffs
        try:
            step = _solve_step(jac, rhs, phase)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"linear solve failed: {exc}", u, res_sup) from exc
        eta, improved = 1.0, False
        for _ in range(opts.max_backtracks):
            cand = PeriodicField(u.spec, _symmetrize(u.coeffs - eta * step))
            cand_sup = _residual_sup(cand, params, pen)
            if cand_sup < res_sup:
                improved = True
                break
            eta *= 0.5
        if not improved:
            # stagnation at the rounding floor is acceptance, anything else an error
            if res_sup <= 10.0 * tol_eff:
                break
            raise ConvergenceError(
                f"Newton stagnated at residual {res_sup:.3e} after {it} iterations",
                u,
                res_sup,
            )
        u, res_sup = cand, cand_sup
        tol_eff = max(opts.tol, opts.rtol * _nonlinear_scale(u))
        if res_sup <= tol_eff:
            return u, _residual_sup(u, params), it
    free_sup = _residual_sup(u, params)
    if free_sup <= 10.0 * tol_eff:
        return u, free_sup, opts.max_iter
    raise ConvergenceError(
        f"no convergence after {opts.max_iter} iterations, residual {free_sup:.3e}",
        u,
        free_sup,
    )


def _tail_fraction(u: PeriodicField) -> float:
    mags = np.abs(u.coeffs)
    total = float(np.sum(mags))
    if total == 0.0:
        return 0.0
    m = np.abs(_mode_numbers(u.modes))
    return float(np.sum(mags[m > u.modes // 4])) / total


def newton_solve(init: PeriodicField, params: OperatorParams, opts: SolverOptions | None = None) -> Solution:
    """Damped Newton from ``init``; adapts the mode count until the
    coefficient tail is resolved (or ``opts.max_modes`` is reached)."""
    opts = opts or SolverOptions()
    if float(np.max(init.values)) <= 0.0:
        raise ValueError("initial guess must be positive somewhere")
    u = init if init.modes >= opts.modes else init.resample(opts.modes)
    iters = 0
    while True:
        u, res_sup, it = _newton_fixed(u, params, opts)
        iters += it
        if not opts.adapt_modes or u.modes >= opts.max_modes or _tail_fraction(u) < opts.tail_tol:
            break
        u = u.resample(min(2 * u.modes, opts.max_modes))

    if float(np.min(u.fine_values())) <= 0.0:
        raise PositivityError(
            f"converged field is not strictly positive (min {float(np.min(u.fine_values())):.3e})"
        )
    is_const = u.nonconstant_fraction() <= _CONSTANT_FRACTION
    if not is_const:
        u = _recenter(u)
        res_sup = _residual_sup(u, params)
    report = norms(u, params)
    return Solution(
        field=u,
        params=params,
        residual_sup=res_sup,
        energy=report.energy,
        lambda_quotient=quotient(u, params),
        is_constant=is_const,
        newton_iters=iters,
    )


# --- Sobolev quotient --------------------------------------------------------


def quotient(u: PeriodicField, params: OperatorParams) -> float:
    """Q(u) = <Pu, u> / (int |u|^{2#} dv)^(2/2#); scale invariant, positive."""
    report = norms(u, params)
    if report.energy == 0.0:
        raise ValueError("quotient undefined for the zero field")
    two_sharp = critical_exponent(u.spec.n)
    return report.pairing / report.energy ** (2.0 / two_sharp)


@dataclass(frozen=True)
class QuotientMinimum:
    field: PeriodicField          # normalized to unit critical norm
    lambda_min: float
    iterations: int
    grad_norm: float
    below_sharp_threshold: bool   # lambda_min < K0^{-2}


def _normalize_critical(u: PeriodicField) -> PeriodicField:
    e = norms(u).energy
    two_sharp = critical_exponent(u.spec.n)
    return u.scaled(e ** (-1.0 / two_sharp))


def minimize_quotient(
    init: PeriodicField,
    params: OperatorParams,
    tol: float = 1e-9,
    max_iter: int = 5000,
) -> QuotientMinimum:
    """Preconditioned projected descent on Q over the unit critical sphere.

    Monotone by construction: steps are accepted only if Q decreases, with
    step halving otherwise.  Stops when the preconditioned gradient is below
    ``tol`` relative to the iterate; stagnation away from that raises
    ConvergenceError with the last iterate attached.
    """
    if float(np.max(np.abs(init.values))) == 0.0:
        raise ValueError("initial guess must be nonzero")
    p = critical_exponent(init.spec.n) - 1.0
    sym = _symbol(init.spec, params, init.modes)
    u = _normalize_critical(init)
    q = quotient(u, params)
    grad_norm = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        z = _nonlinear_coeffs(u, p) / sym   # P^{-1} u_+^(2#-1)
        rho = u.coeffs - q * z
        grad_norm = float(np.linalg.norm(rho) / np.linalg.norm(u.coeffs))
        if grad_norm <= tol:
            break
        eta, accepted = 1.0, False
        for _ in range(40):
            cand = _normalize_critical(PeriodicField(u.spec, _symmetrize(u.coeffs - eta * rho)))
            q_cand = quotient(cand, params)
            if q_cand < q:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            if grad_norm <= 1e3 * tol:
                break
            raise ConvergenceError(
                f"quotient descent stagnated (gradient norm {grad_norm:.3e})", u, grad_norm
            )
        u, q = cand, q_cand
    else:
        raise ConvergenceError(
            f"quotient descent did not converge in {max_iter} iterations", u, grad_norm
        )
    _, k0_inv_sq = sharp_constant(init.spec.n)
    return QuotientMinimum(
        field=u,
        lambda_min=q,
        iterations=it,
        grad_norm=grad_norm,
        below_sharp_threshold=q < k0_inv_sq,
    )


def rescale_to_solution(
    minimum: QuotientMinimum | PeriodicField,
    params: OperatorParams,
    opts: SolverOptions | None = None,
    lambda_min: float | None = None,
) -> Solution:
    """Turn a unit-norm quotient minimizer into a solution of P w = w^(2#-1).

    With ||u||_{2#} = 1 and P u = lambda u^(2#-1), the multiple
    w = lambda^((n-4)/8) u solves the unnormalized equation and has energy
    lambda^(n/4).  The rescaled field is polished by Newton.
    """
    if isinstance(minimum, QuotientMinimum):
        u, lam = minimum.field, minimum.lambda_min
    else:
        if lambda_min is None:
            raise ValueError("lambda_min required when passing a bare field")
        u, lam = minimum, lambda_min
    n = u.spec.n
    w = u.scaled(lam ** ((n - 4) / 8.0))
    return newton_solve(w, params, opts)


# --- linearization -----------------------------------------------------------


def linearized_operator(u: PeriodicField, params: OperatorParams) -> np.ndarray:
    """Dense coefficient-space matrix of P - (2#-1) u_+^(2#-2) (no penalty)."""
    return _jacobian(u, params, penalty=0.0)


def linearized_spectrum(
    sol: Solution, kmax: int | None = None, method: str = "auto"
) -> np.ndarray:
    """Eigenvalues of the linearization at a solution, restricted to circle modes.

    For constant solutions (method "auto" or "closed-form") the values are
    mu_m^2 + alpha mu_m + a - (2#-1) a for m = 0..kmax; each m >= 1 entry is
    doubly degenerate (cos and sin).  Otherwise the dense Hermitian
    coefficient-space eigenproblem is solved and the smallest ``kmax``
    eigenvalues are returned in ascending order.
    """
    u, params = sol.field, sol.params
    two_sharp = critical_exponent(u.spec.n)
    if method not in ("auto", "closed-form", "dense"):
        raise ValueError(f"unknown method {method!r}")
    use_closed = sol.is_constant and method != "dense"
    if method == "closed-form" and not sol.is_constant:
        raise ValueError("closed-form spectrum only applies to constant solutions")
    if use_closed:
        kmax = u.modes // 2 if kmax is None else kmax
        m = np.arange(kmax + 1)
        mu = (m / u.spec.t) ** 2
        shift = (two_sharp - 1.0) * params.a_alpha
        return mu * mu + params.alpha * mu + params.a_alpha - shift
    op = linearized_operator(u, params)
    op = 0.5 * (op + op.conj().T)
    eig = np.linalg.eigvalsh(op)
    return eig if kmax is None else eig[: kmax + 1]


def bifurcation_alpha(n: int, t: float, m: int) -> float:
    """Parameter where the constant branch's mode-m eigenvalue vanishes,
    for the quarter-square schedule a = alpha^2/4.

    Positive root of mu^2 + alpha mu - (2#-2) alpha^2/4 with mu = (m/t)^2;
    for n = 5 this reduces to alpha* = (m/t)^2.
    """
    if m < 1:
        raise ValueError("bifurcating mode index must be >= 1")
    two_sharp = critical_exponent(n)
    mu = (m / t) ** 2
    kappa = two_sharp - 2.0
    return 2.0 * mu * (1.0 + math.sqrt(two_sharp - 1.0)) / kappa


# --- continuation helper -----------------------------------------------------


def continuation_init(
    prev: Solution, params: OperatorParams, da_dalpha: float | None = None
) -> PeriodicField:
    """First-order predictor for continuation in alpha.

    Solves J delta = -(Delta u + a'(alpha) u) d(alpha) at the previous
    solution; falls back to the unmodified previous field if the tangent
    solve fails.
    """
    u = prev.field
    dalpha = params.alpha - prev.params.alpha
    if dalpha == 0.0:
        return u
    if da_dalpha is None:
        da_dalpha = (params.a_alpha - prev.params.a_alpha) / dalpha
    mu = (_mode_numbers(u.modes) / u.spec.t) ** 2
    dF = (mu + da_dalpha) * u.coeffs
    jac = _jacobian(u, prev.params)
    phase = None
    if u.nonconstant_fraction() > _CONSTANT_FRACTION:
        phase = u.derivative(1).coeffs
    try:
        tangent = _solve_step(jac, dF, phase)
    except np.linalg.LinAlgError:
        return u
    return PeriodicField(u.spec, _symmetrize(u.coeffs - dalpha * tangent))
