"""Model manifolds: the circle S^1(t), round spheres, and the product S^1(t) x S^(n-1).

All Laplacians use the geometer sign convention Delta = -div grad, so the
spectra below are nonnegative.  Solution fields are circle-reduced (constant
on the sphere factor); the sphere enters through its volume and, for
reporting only, its spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ManifoldSpec",
    "QuadratureGrid",
    "circle_eigenvalue",
    "circle_multiplicity",
    "sphere_spectrum",
    "sphere_volume",
    "product_volume",
]


@dataclass(frozen=True)
class ManifoldSpec:
    """The product S^1(t) x S^(n-1); ``n`` is the total dimension (>= 5)."""

    n: int
    t: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 5:
            raise ValueError(f"total dimension must be an integer >= 5, got {self.n!r}")
        if not self.t > 0:
            raise ValueError(f"circle radius must be positive, got {self.t!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "t", float(self.t))

    @property
    def period(self) -> float:
        """Arc length of the circle factor, L = 2 pi t."""
        return 2.0 * math.pi * self.t

    @property
    def sphere_dim(self) -> int:
        return self.n - 1


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform arc-length grid s_j = j L / N with weights L / N.

    The uniform rule is spectrally accurate for smooth periodic integrands
    and exact for trigonometric polynomials of degree < N.
    """

    length: float
    size: int

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("grid length must be positive")
        if self.size < 16 or self.size % 2 != 0:
            raise ValueError(f"grid size must be even and >= 16, got {self.size}")

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.size) * (self.length / self.size)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, self.length / self.size)


def circle_eigenvalue(spec: ManifoldSpec, m: int) -> float:
    """Eigenvalue (m/t)^2 of Delta on the circle factor, mode index m >= 0."""
    if m < 0:
        raise ValueError("mode index must be >= 0")
    return (m / spec.t) ** 2


def circle_multiplicity(m: int) -> int:
    return 1 if m == 0 else 2


def sphere_spectrum(d: int, lmax: int) -> list[tuple[int, int]]:
    """Eigenvalues l(l+d-1) of Delta on the round S^d with multiplicities.

    Multiplicities are the dimensions of the spaces of degree-l spherical
    harmonics on S^d.
    """
    if d < 2:
        raise ValueError("sphere dimension must be >= 2")
    if lmax < 0:
        raise ValueError("lmax must be >= 0")
    out = []
    for ell in range(lmax + 1):
        eig = ell * (ell + d - 1)
        if ell == 0:
            mult = 1
        else:
            mult = (2 * ell + d - 1) * math.comb(ell + d - 2, ell) // (d - 1)
        out.append((eig, mult))
    return out


def sphere_volume(d: int) -> float:
    """Volume of the unit d-sphere, omega_d = 2 pi^((d+1)/2) / Gamma((d+1)/2)."""
    if d < 1:
        raise ValueError("sphere dimension must be >= 1")
    return 2.0 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def product_volume(spec: ManifoldSpec) -> float:
    """Volume of S^1(t) x S^(n-1): 2 pi t times omega_(n-1)."""
    return spec.period * sphere_volume(spec.sphere_dim)
