"""Wallenius' noncentral hypergeometric distribution."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import integrate, optimize, special

from app.core.exceptions import InputValidationError, QuadratureError

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-10
RENORMALIZE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class WalleniusParams:
    """
    Biased urn: ``m1`` set genes with odds ``omega`` against ``m2`` others, ``n`` draws.
    """

    m1: int
    m2: int
    n: int
    omega: float

    def __post_init__(self) -> None:
        if self.m1 < 0 or self.m2 < 0 or not 0 <= self.n <= self.m1 + self.m2:
            raise InputValidationError(
                f"Invalid Wallenius parameters m1={self.m1}, m2={self.m2}, n={self.n}",
                {"m1": self.m1, "m2": self.m2, "n": self.n},
            )
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise InputValidationError(f"Wallenius odds must be positive and finite, got {self.omega}")

    @property
    def support(self) -> range:
        return range(max(0, self.n - self.m2), min(self.n, self.m1) + 1)

    def denominator(self, h: int) -> float:
        """Weight of the genes left in the urn after ``h`` set and ``n-h`` other draws."""
        return self.omega * (self.m1 - h) + (self.m2 - (self.n - h))


def _log_binom(n: int, k: int) -> float:
    return float(special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1))


def _log_integral(omega: float, h: int, misses: int, d: float) -> float:
    """log of the integral over (0, 1) of (1 - t^(omega/d))^h (1 - t^(1/d))^misses dt."""
    if d >= 1.0:
        # t = u^d: integrand d * u^(d-1) * (1 - u^omega)^h * (1 - u)^misses
        def log_f(u: float) -> float:
            return (
                math.log(d)
                + special.xlogy(d - 1.0, u)
                + special.xlog1py(h, -(u**omega))
                + special.xlog1py(misses, -u)
            )
    else:
        def log_f(u: float) -> float:
            return special.xlog1py(h, -(u ** (omega / d))) + special.xlog1py(misses, -(u ** (1.0 / d)))

    peak = optimize.minimize_scalar(lambda u: -log_f(u), bounds=(0.0, 1.0), method="bounded",
                                    options={"xatol": 1e-12})
    u_peak = float(peak.x)
    log_peak = log_f(u_peak)
    if not math.isfinite(log_peak):
        raise QuadratureError(f"Wallenius integrand has no finite peak (h={h}, misses={misses})")

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(
                lambda u: math.exp(log_f(u) - log_peak),
                0.0,
                1.0,
                points=[u_peak] if 0.0 < u_peak < 1.0 else None,
                epsabs=QUAD_TOLERANCE,
                epsrel=QUAD_TOLERANCE,
                limit=200,
            )
        except integrate.IntegrationWarning as e:
            raise QuadratureError(
                f"Wallenius quadrature did not converge (h={h}, misses={misses}, omega={omega}): {e}",
                {"h": h, "misses": misses, "omega": omega},
            ) from e
    if value <= 0:
        raise QuadratureError(f"Wallenius quadrature returned non-positive mass at h={h}")
    return log_peak + math.log(value)


def wallenius_pmf(wp: WalleniusParams, renormalize: bool = True) -> NDArray[np.float64]:
    """
    Probability mass of every hit count ``h = 0..min(m1, n)``.

    Each mass is evaluated by adaptive quadrature in log space. When the
    masses miss 1 by more than ``RENORMALIZE_TOLERANCE`` they are rescaled
    and a warning is logged.

    Raises:
        QuadratureError: If the quadrature for any support point fails
    """
    pmf = np.zeros(min(wp.m1, wp.n) + 1, dtype=np.float64)
    for h in wp.support:
        misses = wp.n - h
        d = wp.denominator(h)
        log_comb = _log_binom(wp.m1, h) + _log_binom(wp.m2, misses)
        if d <= 0:
            # every gene drawn
            pmf[h] = 1.0
            continue
        pmf[h] = math.exp(log_comb + _log_integral(wp.omega, h, misses, d))

    total = float(pmf.sum())
    if renormalize and abs(total - 1.0) > RENORMALIZE_TOLERANCE:
        logger.warning(
            f"Wallenius pmf for m1={wp.m1}, m2={wp.m2}, n={wp.n}, omega={wp.omega:.6g} "
            f"sums to {total:.12g}; renormalizing"
        )
        pmf /= total
    return pmf


def wallenius_tail(wp: WalleniusParams, H: int) -> float:
    """P(X >= H) under Wallenius' distribution; exactly 1.0 when H == 0."""
    if not 0 <= H <= min(wp.m1, wp.n):
        raise InputValidationError(f"Hit count {H} outside [0, {min(wp.m1, wp.n)}]")
    if H == 0:
        return 1.0
    pmf = wallenius_pmf(wp)
    return min(1.0, max(0.0, float(pmf[H:].sum())))
