"""Upper half-plane arithmetic: the recursion map, its fixed point and the weight.

All functions accept Python complex numbers, :class:`UpperHalfPoint` values or
complex numpy arrays and broadcast over the latter. Scalar inputs give numpy
scalar outputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UpperHalfPoint:
    """A validated point of the open upper half-plane."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"non-finite point ({self.re}, {self.im})")
        # strict comparison; subnormal imaginary parts are allowed
        if not self.im > 0.0:
            raise ValueError(f"Im z must be > 0, got {self.im}")

    @classmethod
    def from_complex(cls, z) -> "UpperHalfPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class SpectralParameter:
    """Spectral parameter ``lambda = energy + i*eta`` with ``eta >= 0``."""

    energy: float
    eta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.energy) and math.isfinite(self.eta)):
            raise ValueError("spectral parameter must be finite")
        if self.eta < 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    @classmethod
    def from_complex(cls, lam) -> "SpectralParameter":
        lam = complex(lam)
        return cls(lam.real, lam.imag)

    @property
    def value(self) -> complex:
        return complex(self.energy, self.eta)

    def __complex__(self) -> complex:
        return self.value

    def in_strip(self, e_max: float, eps: float) -> bool:
        """Membership in ``{|Re| <= e_max, 0 < Im <= eps}``."""
        return abs(self.energy) <= e_max and 0.0 < self.eta <= eps


def as_complex(z):
    """Coerce points (scalars, arrays, dataclasses) to complex128."""
    if isinstance(z, (UpperHalfPoint, SpectralParameter)):
        return np.complex128(complex(z))
    if isinstance(z, (list, tuple)):
        return np.asarray([complex(v) for v in z], dtype=np.complex128)
    return np.asarray(z, dtype=np.complex128)[()]


def check_upper(z, name="z"):
    z = as_complex(z)
    if not np.all(np.isfinite(z)):
        raise ValueError(f"{name} has non-finite entries")
    if not np.all(np.imag(z) > 0.0):
        raise ValueError(f"{name} must lie in the open upper half-plane")
    return z


def sqrt_upper(w):
    """Complex square root on the branch ``Im >= 0``.

    The negative real axis maps to ``+i*sqrt(|w|)`` regardless of the sign
    of the zero imaginary part; positive reals map to positive reals.
    """
    w = np.asarray(w, dtype=np.complex128)
    r = np.sqrt(w)
    flip = (r.imag < 0.0) | ((r.imag == 0.0) & (r.real < 0.0))
    r = np.where(flip, -r, r)
    # sqrt(-a - 0j) gives -i*sqrt(a) with imag exactly -sqrt(a); covered by flip
    return r[()]


def fixed_point(M: int, lam):
    """Fixed point ``z_lambda`` of ``z -> -1/(M z + lambda)`` in the upper half-plane.

    Parameters
    ----------
    M : int
        Branching number, ``M >= 2``.
    lam : complex, SpectralParameter or ndarray
        Spectral parameter(s) with ``Im >= 0``. Real values must satisfy
        ``|lam| < 2 sqrt(M)``.

    Returns
    -------
    complex or ndarray
        ``-lam/(2M) + sqrt((lam/2)**2 - M)/M`` with ``Im sqrt >= 0``.

    Notes
    -----
    The two roots multiply to ``1/M``, so the root is evaluated through
    whichever of ``(-lam/2 + s)/M`` and ``1/(-lam/2 - s)`` avoids cancellation.
    """
    if M < 2:
        raise ValueError(f"branching must be >= 2, got {M}")
    lam = as_complex(lam)
    lam_arr = np.asarray(lam)
    if np.any(lam_arr.imag < 0):
        raise ValueError("Im lambda must be >= 0")
    edge = 2.0 * math.sqrt(M)
    on_axis = lam_arr.imag == 0.0
    if np.any(on_axis & (np.abs(lam_arr.real) >= edge)):
        raise ValueError(
            f"real lambda must satisfy |lambda| < 2 sqrt(M) = {edge:.6g}"
        )
    half = lam_arr / 2.0
    s = sqrt_upper(half * half - M)
    plus = -half + s
    minus = -half - s
    z = np.where(np.abs(plus) >= np.abs(minus), plus / M, 1.0 / np.where(minus == 0, 1, minus))
    return z[()]


def mobius_phi(zs, q, lam):
    """``-1/(z_1 + ... + z_M + lam - q)``; ``zs`` is summed over its last axis."""
    zs = as_complex(zs)
    return (-1.0 / (np.sum(zs, axis=-1) + as_complex(lam) - np.asarray(q)))[()]


def phi_prime(z, lam):
    """Single-argument map ``z -> -1/(z + lam)``."""
    return (-1.0 / (as_complex(z) + as_complex(lam)))[()]


def cosh_dist(s, z):
    """``2(cosh d(s, z) - 1) = |s - z|^2 / (Im s Im z)``."""
    s = as_complex(s)
    z = as_complex(z)
    d = s - z
    return ((d.real * d.real + d.imag * d.imag) / (np.imag(s) * np.imag(z)))[()]


def hyperbolic_distance(s, z):
    """Hyperbolic distance via ``arcosh(1 + c/2)``, written with log1p."""
    x = np.asarray(cosh_dist(s, z)) / 2.0
    return np.log1p(x + np.sqrt(x * (x + 2.0)))[()]


def weight_at(z, zl):
    """Weight relative to a precomputed fixed point ``zl``."""
    return cosh_dist(zl, z)


def weight(z, M: int, lam):
    """Weight ``w(z) = |z - z_lam|^2 / (Im z Im z_lam)``.

    Zero exactly at the fixed point and blowing up at the whole boundary
    at infinity of the half-plane.
    """
    return weight_at(z, fixed_point(M, lam))


def chi(z, M: int, lam):
    """Boundary defining function ``1/w(z)``; rejects ``z = z_lam``."""
    zl = fixed_point(M, lam)
    z = as_complex(z)
    d = np.asarray(z - zl)
    den = d.real * d.real + d.imag * d.imag
    if np.any(den == 0.0):
        raise ValueError("chi is infinite at the fixed point")
    return (np.imag(z) * np.imag(zl) / den)[()]


def abs_from_weight_bound(z, s):
    """Both sides of ``|z| <= 4 Im(s) c(s, z) + 2|s|``.

    Returns
    -------
    lhs, rhs : float or ndarray
    """
    z = as_complex(z)
    s = as_complex(s)
    lhs = np.abs(z)
    rhs = 4.0 * np.imag(s) * np.asarray(cosh_dist(s, z)) + 2.0 * np.abs(s)
    return lhs[()], rhs[()]
