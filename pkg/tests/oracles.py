"""Independent closed-form references used by several test files."""
import math

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gamma as G
from scipy.special import hyp1f1

from modkg.operators import riesz_constant


def periodic_riesz_kernel(x, alpha, L):
    """(1/L) sum_{j != 0} gamma_alpha |xi_j|^-alpha exp(i xi_j x) in closed form (n = 1).

    Hurwitz: zeta(1-a, t) + zeta(1-a, 1-t) = 4 Gamma(a) cos(pi a/2) (2 pi)^-a sum_{m>=1} cos(2 pi m t)/m^a.
    """
    t = (x / L) % 1.0
    series = (2 * math.pi) ** alpha / (4 * G(alpha) * math.cos(math.pi * alpha / 2)) * float(
        mpmath.zeta(1 - alpha, t) + mpmath.zeta(1 - alpha, 1 - t)
    )
    return 2 * riesz_constant(alpha, 1) / L * (L / (2 * math.pi)) ** alpha * series


def riesz_quadrature(f, x, alpha, L):
    """int_{-L/2}^{L/2} G(x - y) f(y) dy with the singular point split out."""
    pts = sorted({max(-L / 2, min(L / 2, x))})
    val, _ = integrate.quad(lambda y: periodic_riesz_kernel(x - y, alpha, L) * f(y), -L / 2, L / 2,
                            points=pts, limit=400, epsabs=1e-12, epsrel=1e-10)
    return val


def gaussian_riesz_3d(r2, mu, width2, n=3):
    """(|.|^-mu * exp(-|.|^2 / width2))(x) on R^n, with r2 = |x|^2."""
    w = math.sqrt(width2)
    c = math.pi ** (n / 2) * G((n - mu) / 2) / G(n / 2)
    return w ** (n - mu) * c * hyp1f1(mu / 2, n / 2, -np.asarray(r2) / width2)
