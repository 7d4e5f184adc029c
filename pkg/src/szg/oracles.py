"""Closed-form and series reference values for the disc and the annulus.

These are independent of the integral-equation solver and serve as test
oracles and as the reference data of ``szg selftest``.
"""

from __future__ import annotations

import math

import numpy as np


def disc_szego(z, w):
    """S(z, w) = 1 / (2 pi (1 - z conj(w))) on the unit disc."""
    return 1.0 / (2.0 * math.pi * (1.0 - np.asarray(z) * np.conj(w)))


def disc_abs2_szego(z, w, center: complex = 2.0):
    """Unit disc with phi = |zeta - c|^2, |c| > 1: S(z, w) / ((z - c) conj(w - c))."""
    z = np.asarray(z)
    return disc_szego(z, w) / ((z - center) * np.conj(np.asarray(w) - center))


def disc_bergman(z, w):
    return 1.0 / (math.pi * (1.0 - np.asarray(z) * np.conj(w)) ** 2)


def disc_ahlfors(z, a):
    """Mobius map (z - a) / (1 - conj(a) z)."""
    z = np.asarray(z)
    return (z - a) / (1.0 - np.conj(a) * z)


def annulus_szego(z, w, rho: float, nmax: int = 400):
    """(1/2 pi) sum_n (z conj(w))^n / (1 + rho^(2n+1)) on rho < |z| < 1 (any z, w in the closure)."""
    n = np.arange(-nmax, nmax + 1)
    z = np.asarray(z, dtype=complex)
    x = z[..., None] * np.conj(w)
    with np.errstate(over="ignore"):
        coef = 1.0 / (1.0 + rho ** (2.0 * n + 1.0))
        terms = coef * x**n
    return np.sum(np.nan_to_num(terms), axis=-1) / (2.0 * math.pi)


def annulus_reduced_bergman(z, w, rho: float, nmax: int = 400):
    """sum_{n != -1} (n+1) (z conj(w))^n / (pi (1 - rho^(2n+2)))."""
    n = np.arange(-nmax, nmax + 1)
    n = n[n != -1]
    z = np.asarray(z, dtype=complex)
    x = z[..., None] * np.conj(w)
    with np.errstate(over="ignore"):
        terms = (n + 1.0) * x**n / (math.pi * (1.0 - rho ** (2.0 * n + 2.0)))
    return np.sum(np.nan_to_num(terms), axis=-1)


def annulus_bergman(z, w, rho: float, nmax: int = 400):
    z = np.asarray(z, dtype=complex)
    x = z * np.conj(w)
    return annulus_reduced_bergman(z, w, rho, nmax) + 1.0 / (x * 2.0 * math.pi * math.log(1.0 / rho))


def annulus_gram(rho: float) -> float:
    """Area integral of |1/z|^2 over rho < |z| < 1."""
    return 2.0 * math.pi * math.log(1.0 / rho)


def higher_reduced_gram_schmidt(nord: int, z: complex, zeta: complex, exponents, norms2) -> complex:
    """n-th order reduced kernel from an orthonormal monomial basis.

    The reduced space (derivatives f' of single-valued f) has the orthogonal
    basis z^m, m in `exponents`, with squared area norms `norms2`. The
    representer of g -> g^(n-1)(zeta) is projected off the representers of
    g -> g^(j)(zeta), j < n-1, by least squares in coefficient space.
    """
    m = np.asarray(exponents, dtype=float)
    scale = 1.0 / np.sqrt(np.asarray(norms2, dtype=float))

    def deriv_row(j: int, x: complex) -> np.ndarray:
        falling = np.ones_like(m)
        for i in range(j):
            falling = falling * (m - i)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = falling * np.power(complex(x), m - j)
        return np.nan_to_num(vals) * scale

    reps = [np.conj(deriv_row(j, zeta)) for j in range(nord)]
    target = reps[-1]
    if nord > 1:
        A = np.column_stack(reps[:-1])
        coef, *_ = np.linalg.lstsq(A, target, rcond=None)
        target = target - A @ coef
    return complex(np.sum(target * deriv_row(0, z)))


def annulus_higher_reduced(nord: int, z: complex, zeta: complex, rho: float, nmax: int = 200) -> complex:
    n = np.arange(-nmax, nmax + 1)
    n = n[n != -1]
    norms2 = math.pi * (1.0 - rho ** (2.0 * n + 2.0)) / (n + 1.0)
    return higher_reduced_gram_schmidt(nord, z, zeta, n, norms2)


def disc_higher_reduced(nord: int, z: complex, zeta: complex, nmax: int = 200) -> complex:
    n = np.arange(0, nmax + 1)
    return higher_reduced_gram_schmidt(nord, z, zeta, n, math.pi / (n + 1.0))


def ks_kernel_continuous(t, s, zf, dzf, phif) -> complex:
    """The weighted Kerzman-Stein kernel at parameters t != s of a single curve."""
    z, zeta = zf(t), zf(s)
    Tz, Tzeta = dzf(t) / abs(dzf(t)), dzf(s) / abs(dzf(s))
    return complex(
        (Tzeta / phif(s) / (zeta - z) - np.conj(Tz) / phif(t) / np.conj(zeta - z)) / (2j * math.pi)
    )


def ks_diagonal_limit(t0: float, zf, dzf, phif, eps: float = 2e-2) -> complex:
    """lim_{s -> t0} of the kernel, by symmetric differences and two Richardson steps in eps^2."""
    def sym(e):
        return 0.5 * (ks_kernel_continuous(t0, t0 + e, zf, dzf, phif)
                      + ks_kernel_continuous(t0, t0 - e, zf, dzf, phif))

    a0, a1, a2 = sym(eps), sym(eps / 2), sym(eps / 4)
    b0, b1 = (4 * a1 - a0) / 3, (4 * a2 - a1) / 3
    return (16 * b1 - b0) / 15
