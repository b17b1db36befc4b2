"""Fits and checks for singular-value decay laws.

The decay theory for these equations predicts spectra of the form
sigma_k <= M t^(1-2 alpha) exp(-eta sqrt(k - shift)) beyond a small offset
determined by the output dimensions, with M and eta existence-level
constants.  This module estimates (M, eta) by least squares on the log
spectrum, fits the small-t growth power of sigma_1, and checks the
additive Weyl inequality that the theory's splitting argument rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SingularSpectrum:
    """Decreasing singular values of one solution snapshot."""

    t: float
    level: int
    n: int
    sigmas: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigmas, dtype=float).ravel()
        object.__setattr__(self, "sigmas", s)
        if s.size and (np.any(s < 0.0) or np.any(np.diff(s) > 0.0)):
            raise ValueError("singular values must be nonnegative and nonincreasing")


@dataclass(frozen=True)
class DecayFit:
    """Least-squares estimate of sigma_k ~ M exp(-eta sqrt(k - shift)).

    M is exp(intercept) of the log-linear fit, so it carries whatever time
    prefactor the fitted spectrum had.  r2 in [0, 1] grades the fit.
    """

    M: float
    eta: float
    shift: int
    k_min: int
    k_max: int
    r2: float

    def model(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        return self.M * np.exp(-self.eta * np.sqrt(k - self.shift))


def fit_sqrt_decay(
    spec: SingularSpectrum,
    shift: int,
    k_min: int,
    k_max: int,
    floor: float = 0.0,
) -> DecayFit:
    """OLS of ln sigma_k against sqrt(k - shift) over k in [k_min, k_max].

    Entries at or below ``floor`` (the round-off plateau) are excluded; at
    least 4 usable points are required.  Returns M = exp(intercept) and
    eta = -slope.
    """
    if k_min <= shift:
        raise ValueError(f"k_min={k_min} must exceed shift={shift}")
    if k_max > spec.sigmas.size:
        raise ValueError(f"k_max={k_max} beyond spectrum length {spec.sigmas.size}")
    k = np.arange(k_min, k_max + 1)
    s = spec.sigmas[k - 1]
    usable = s > floor
    if usable.sum() < 4:
        raise ValueError(
            f"only {int(usable.sum())} points above the floor in [{k_min}, {k_max}]; "
            "need at least 4"
        )
    x = np.sqrt(k[usable] - shift)
    y = np.log(s[usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid**2) / ss_tot) if ss_tot > 0 else 1.0
    return DecayFit(
        M=float(np.exp(intercept)),
        eta=float(-slope),
        shift=shift,
        k_min=k_min,
        k_max=k_max,
        r2=r2,
    )


def fit_time_power(points) -> float:
    """Slope p of ln sigma_1 against ln t on the small-t half of the data.

    The decay bounds are small-t statements and the growth of sigma_1
    saturates at larger times, so only the smallest half of the t values
    (rounded up) enters the fit.  Needs at least 3 distinct positive t.
    """
    pts = sorted((float(t), float(s)) for t, s in points)
    if len(pts) < 3:
        raise ValueError("need at least 3 (t, sigma1) points")
    t = np.array([p[0] for p in pts])
    s = np.array([p[1] for p in pts])
    if np.any(t <= 0.0) or np.unique(t).size != t.size:
        raise ValueError("t values must be positive and distinct")
    n_use = math.ceil(len(t) / 2)
    slope, _ = np.polyfit(np.log(t[:n_use]), np.log(s[:n_use]), 1)
    return float(slope)


@dataclass(frozen=True)
class WeylReport:
    """Outcome of the additive singular-value inequality check."""

    checked: int
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_weyl(sA, sB, sSum, slack: float = 0.0) -> WeylReport:
    """Check sigma_{j+k-1}(F1 + F2) <= sigma_j(F1) + sigma_k(F2) + slack.

    Spectra are treated as zero-padded beyond their stored length, so all
    index pairs with j + k - 1 within the summed spectrum are covered.
    Returns a report rather than raising.
    """
    sA = np.asarray(sA, dtype=float).ravel()
    sB = np.asarray(sB, dtype=float).ravel()
    sSum = np.asarray(sSum, dtype=float).ravel()

    def get(s, i):
        return s[i - 1] if i <= s.size else 0.0

    violations = []
    checked = 0
    for j in range(1, sSum.size + 1):
        for k in range(1, sSum.size + 2 - j):
            lhs = get(sSum, j + k - 1)
            rhs = get(sA, j) + get(sB, k) + slack
            checked += 1
            if lhs > rhs:
                violations.append((j, k, float(lhs), float(rhs)))
    return WeylReport(checked=checked, violations=tuple(violations))


@dataclass(frozen=True)
class BoundReport:
    """Pointwise margins of a spectrum against its fitted decay bound."""

    tol_factor: float
    start_k: int
    ks: tuple
    margins: tuple
    flagged: tuple
    M_normalized: float = field(default=math.nan)

    @property
    def ok(self) -> bool:
        return not self.flagged


def check_thm_bound(
    spec: SingularSpectrum,
    fit: DecayFit,
    t: float,
    alpha: float,
    dim_y: int,
    dim_z: int,
    tol_factor: float = 0.5,
    floor: float = 0.0,
) -> BoundReport:
    """Check sigma_k against the fitted bound, inflated by (1 + tol_factor).

    The bound is M_norm * t^(1-2 alpha) * exp(-eta sqrt(k - shift)) with
    shift = 2*dim_y + dim_z and M_norm = fit.M / t^(1-2 alpha), i.e. the
    fitted model itself with its time prefactor made explicit; checking
    starts at k = max(1, 4*dim_y + dim_z) and runs through the fit window,
    skipping entries at or below the floor.  Margins are (bound - sigma_k)
    relative to the bound; negative margins are flagged.
    """
    shift = 2 * dim_y + dim_z
    if shift != fit.shift:
        raise ValueError(f"fit was made with shift={fit.shift}, dimensions give {shift}")
    prefactor = t ** (1.0 - 2.0 * alpha)
    m_norm = fit.M / prefactor
    start = max(1, 4 * dim_y + dim_z, fit.k_min)
    ks, margins, flagged = [], [], []
    for k in range(start, fit.k_max + 1):
        sigma = spec.sigmas[k - 1]
        if sigma <= floor:
            continue
        bound = m_norm * prefactor * math.exp(-fit.eta * math.sqrt(k - shift))
        bound *= 1.0 + tol_factor
        margin = (bound - sigma) / bound
        ks.append(k)
        margins.append(float(margin))
        if margin < 0.0:
            flagged.append(k)
    return BoundReport(
        tol_factor=tol_factor,
        start_k=start,
        ks=tuple(ks),
        margins=tuple(margins),
        flagged=tuple(flagged),
        M_normalized=m_norm,
    )
