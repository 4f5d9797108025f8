"""Spectral representation of circle-reduced fields on S^1(t) x S^(n-1).

A field u(s) on the circle factor is held as normalized complex Fourier
coefficients c_m = (1/N) sum_j u(s_j) exp(-i kappa_m s_j) in numpy FFT
ordering (kappa_m = m/t), with conjugate symmetry c_{-m} = conj(c_m) so the
field is real.  Nonlinear powers are evaluated on an oversampled grid and
truncated back, which dealiases integer critical powers exactly and keeps
fractional ones well defined (values are clamped at zero before
exponentiation).

All "full-manifold" integrals are circle integrals times the volume of the
unit (n-1)-sphere, since fields are constant on the sphere factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import OperatorParams, critical_exponent
from .geometry import ManifoldSpec, QuadratureGrid, sphere_volume

__all__ = [
    "PeriodicField",
    "NormReport",
    "transform",
    "inverse",
    "norms",
    "localized_mass",
    "save_field",
    "load_field",
]

_HERMITIAN_TOL = 1e-12


def oversample_factor(two_sharp: float) -> int:
    """Grid oversampling needed to dealias the power u^(2#-1): at least 4x."""
    return max(4, math.ceil((two_sharp + 1.0) / 2.0))


def transform(values: np.ndarray) -> np.ndarray:
    """Grid samples -> normalized full-spectrum coefficients (numpy FFT order)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("values must be a 1-d array with at least 2 samples")
    return np.fft.fft(values) / values.size


def inverse(coeffs: np.ndarray) -> np.ndarray:
    """Normalized full-spectrum coefficients -> grid samples."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise ValueError("coeffs must be a 1-d array with at least 2 entries")
    vals = np.fft.ifft(coeffs * coeffs.size)
    if np.max(np.abs(vals.imag)) > _HERMITIAN_TOL * max(1.0, np.max(np.abs(vals.real))):
        raise ValueError("coefficients are not conjugate-symmetric (field not real)")
    return vals.real


def _mode_numbers(size: int) -> np.ndarray:
    """Integer mode numbers in numpy FFT order: 0..size/2-1, -size/2..-1."""
    m = np.arange(size)
    m[size // 2 :] -= size
    return m


def _symmetrize(coeffs: np.ndarray) -> np.ndarray:
    idx = (-np.arange(coeffs.size)) % coeffs.size
    return 0.5 * (coeffs + np.conj(coeffs[idx]))


def _pad_full(coeffs: np.ndarray, fine_size: int) -> np.ndarray:
    """Zero-pad a full spectrum of even size N to fine_size > N.

    The shared Nyquist bin (a pure cosine on the base grid) splits evenly
    into the +-N/2 fine bins.
    """
    n = coeffs.size
    half = n // 2
    out = np.zeros(fine_size, dtype=complex)
    out[:half] = coeffs[:half]
    if half > 1:
        out[-half + 1 :] = coeffs[-half + 1 :]
    out[half] = 0.5 * coeffs[half]
    out[-half] += 0.5 * np.conj(coeffs[half])
    return out


def _truncate_full(fine_coeffs: np.ndarray, size: int) -> np.ndarray:
    """Galerkin projection of a fine full spectrum onto |m| <= size/2."""
    half = size // 2
    out = np.zeros(size, dtype=complex)
    out[:half] = fine_coeffs[:half]
    if half > 1:
        out[-half + 1 :] = fine_coeffs[-half + 1 :]
    out[half] = (fine_coeffs[half] + fine_coeffs[-half]).real
    return out


class PeriodicField:
    """Real field on the circle factor, stored spectrally.

    Parameters
    ----------
    spec : ManifoldSpec
    coeffs : complex array, full spectrum in numpy FFT order, conjugate
        symmetric.  Its length N (even, >= 16) is the mode resolution.
    """

    __slots__ = ("spec", "coeffs", "_values", "_fine")

    def __init__(self, spec: ManifoldSpec, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size % 2 != 0 or coeffs.size < 16:
            raise ValueError("coefficient array must be 1-d with even length >= 16")
        sym = _symmetrize(coeffs)
        scale = max(1.0, float(np.max(np.abs(sym))))
        if np.max(np.abs(sym - coeffs)) > _HERMITIAN_TOL * scale:
            raise ValueError("coefficients are not conjugate-symmetric (field not real)")
        self.spec = spec
        self.coeffs = sym
        self._values: np.ndarray | None = None
        self._fine: tuple[int, np.ndarray] | None = None

    # --- constructors -------------------------------------------------

    @classmethod
    def from_values(cls, spec: ManifoldSpec, values: np.ndarray) -> "PeriodicField":
        values = np.asarray(values, dtype=float)
        out = cls(spec, transform(values))
        out._values = values.copy()  # keep the collocation samples bit-exact
        return out

    @classmethod
    def constant(cls, spec: ManifoldSpec, value: float, modes: int = 16) -> "PeriodicField":
        c = np.zeros(modes, dtype=complex)
        c[0] = value
        return cls(spec, c)

    @classmethod
    def from_function(cls, spec: ManifoldSpec, fn, modes: int = 64) -> "PeriodicField":
        grid = QuadratureGrid(spec.period, modes)
        return cls.from_values(spec, np.asarray(fn(grid.points), dtype=float))

    # --- basic views ----------------------------------------------------

    @property
    def modes(self) -> int:
        return self.coeffs.size

    @property
    def grid(self) -> np.ndarray:
        n = self.modes
        return np.arange(n) * (self.spec.period / n)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = np.fft.ifft(self.coeffs * self.modes).real
        return self._values

    @property
    def oversample(self) -> int:
        return oversample_factor(critical_exponent(self.spec.n))

    def fine_size(self, factor: int | None = None) -> int:
        return self.modes * (factor or self.oversample)

    def fine_values(self, factor: int | None = None) -> np.ndarray:
        nf = self.fine_size(factor)
        if self._fine is None or self._fine[0] != nf:
            vals = np.fft.ifft(_pad_full(self.coeffs, nf) * nf).real
            self._fine = (nf, vals)
        return self._fine[1]

    def fine_grid(self, factor: int | None = None) -> np.ndarray:
        nf = self.fine_size(factor)
        return np.arange(nf) * (self.spec.period / nf)

    @property
    def mean(self) -> float:
        return float(self.coeffs[0].real)

    def nonconstant_fraction(self) -> float:
        """Relative L2 weight of the nonzero modes (0 for exact constants)."""
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        if total == 0.0:
            return 0.0
        return math.sqrt(float(np.sum(np.abs(self.coeffs[1:]) ** 2)) / total)

    # --- calculus -------------------------------------------------------

    def wavenumbers(self) -> np.ndarray:
        return _mode_numbers(self.modes) / self.spec.t

    def derivative(self, order: int = 1) -> "PeriodicField":
        kap = self.wavenumbers()
        mult = (1j * kap) ** order
        if order % 2 == 1:
            mult = mult.copy()
            mult[self.modes // 2] = 0.0  # odd derivative of the Nyquist cosine
        return PeriodicField(self.spec, self.coeffs * mult)

    def laplacian(self) -> "PeriodicField":
        """Delta u with Delta = -d^2/ds^2 (geometer sign)."""
        return PeriodicField(self.spec, self.coeffs * self.wavenumbers() ** 2)

    def shift(self, s0: float) -> "PeriodicField":
        """The translate s -> u(s + s0)."""
        kap = self.wavenumbers()
        mult = np.exp(1j * kap * s0)
        mult[self.modes // 2] = math.cos(kap[self.modes // 2] * s0)
        return PeriodicField(self.spec, self.coeffs * mult)

    def resample(self, modes: int) -> "PeriodicField":
        if modes == self.modes:
            return self
        if modes > self.modes:
            return PeriodicField(self.spec, _pad_full(self.coeffs, modes))
        return PeriodicField(self.spec, _truncate_full(self.coeffs, modes))

    def scaled(self, factor: float) -> "PeriodicField":
        return PeriodicField(self.spec, self.coeffs * factor)

    def __add__(self, other: "PeriodicField") -> "PeriodicField":
        if other.modes != self.modes or other.spec != self.spec:
            raise ValueError("fields must share grid and manifold")
        return PeriodicField(self.spec, self.coeffs + other.coeffs)


@dataclass(frozen=True)
class NormReport:
    """Full-manifold quadratic quantities of a field (circle integral x omega_(n-1)).

    ``energy`` is the critical-power integral of |u|^{2#} over the manifold;
    ``pairing`` is the quadratic form of P, equal mode-wise to
    hess_l2 + alpha grad_l2 + a l2 (None when no operator is supplied).
    """

    l2: float
    grad_l2: float
    hess_l2: float
    energy: float
    pairing: float | None


def norms(u: PeriodicField, params: OperatorParams | None = None) -> NormReport:
    spec = u.spec
    omega = sphere_volume(spec.sphere_dim)
    length = spec.period
    kap = u.wavenumbers()
    w2 = np.abs(u.coeffs) ** 2
    # the Nyquist bin stores the cosine amplitude, whose mean square is half
    w2[u.modes // 2] *= 0.5
    l2 = omega * length * float(np.sum(w2))
    grad = omega * length * float(np.sum(kap**2 * w2))
    hess = omega * length * float(np.sum(kap**4 * w2))
    two_sharp = critical_exponent(spec.n)
    fine = u.fine_values()
    energy = omega * length * float(np.mean(np.abs(fine) ** two_sharp))
    pairing = None
    if params is not None:
        pairing = hess + params.alpha * grad + params.a_alpha * l2
    return NormReport(l2=l2, grad_l2=grad, hess_l2=hess, energy=energy, pairing=pairing)


_DENSITY_KINDS = ("l2", "grad_l2", "hess_l2", "energy")


def _density_samples(u: PeriodicField, kind: str) -> np.ndarray:
    if kind == "l2":
        return u.fine_values() ** 2
    if kind == "grad_l2":
        return u.derivative(1).fine_values() ** 2
    if kind == "hess_l2":
        # on the flat product, the only nonzero Hessian entry of a
        # circle-reduced field is u''
        return u.derivative(2).fine_values() ** 2
    if kind == "energy":
        two_sharp = critical_exponent(u.spec.n)
        return np.abs(u.fine_values()) ** two_sharp
    raise ValueError(f"unknown density kind {kind!r}; expected one of {_DENSITY_KINDS}")


def _arc_integral(density: np.ndarray, spec: ManifoldSpec, center: float, delta: float) -> float:
    """Integral of a sampled density over the arc dist(s, center) < delta.

    The density's trigonometric interpolant is integrated mode by mode over
    the sharp (unsmoothed) arc, so the window boundary is exact and the only
    error is the interpolant's truncation tail.
    """
    nf = density.size
    g = np.fft.fft(density) / nf
    kap = _mode_numbers(nf) / spec.t
    window = np.empty(nf, dtype=complex)
    window[0] = 2.0 * delta
    nz = kap != 0.0
    window[nz] = 2.0 * np.exp(1j * kap[nz] * center) * np.sin(kap[nz] * delta) / kap[nz]
    return float(np.real(np.sum(g * window)))


def localized_mass(u: PeriodicField, center: float, delta: float, kind: str) -> float:
    """Mass of a quadratic/critical density over the ball of radius delta.

    The ball lives on the circle factor and is crossed with the whole sphere,
    so the result is the arc integral times omega_(n-1).  Requires
    0 < delta < L/2 (otherwise the complement arc would be empty).
    """
    length = u.spec.period
    if not 0 < delta < length / 2:
        raise ValueError(f"delta must lie in (0, L/2) = (0, {length/2}), got {delta}")
    density = _density_samples(u, kind)
    omega = sphere_volume(u.spec.sphere_dim)
    return omega * _arc_integral(density, u.spec, center, delta)


# --- plain-text serialization ----------------------------------------------

_HEADER = "# n t N"


def save_field(u: PeriodicField, path) -> None:
    """Write base-grid samples as two decimal columns, 17 significant digits."""
    lines = [f"# {u.spec.n} {u.spec.t:.17g} {u.modes}"]
    for s, v in zip(u.grid, u.values):
        lines.append(f"{s:.17g} {v:.17g}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_field(path) -> PeriodicField:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "#":
            raise ValueError(f"bad field file header in {path}: expected '{_HEADER}'")
        n, t, size = int(header[1]), float(header[2]), int(header[3])
        vals = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            vals.append(float(line.split()[1]))
    if len(vals) != size:
        raise ValueError(f"field file {path} has {len(vals)} samples, header says {size}")
    return PeriodicField.from_values(ManifoldSpec(n, t), np.asarray(vals))
