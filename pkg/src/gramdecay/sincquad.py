"""Finite-interval sinc quadrature for endpoint-singular integrands.

The rule approximates integrals over (0, t) of functions that are analytic
on an eye-shaped complex neighbourhood of the interval and may blow up
algebraically at the endpoints.  The interval is mapped onto the real line
by w = ln(z / (t - z)), the trapezoidal rule is applied there with mesh h,
and the result is mapped back.  With decay rates rho (left endpoint) and mu
(right endpoint) of the transformed integrand, the error decays like
exp(-sqrt(2 pi rho d m)) in the truncation index m, where d < pi/2 is the
half-width of the analyticity strip.

For the Gramian integrands handled by the solvers, the appropriate rates
are rho = 1 - 2*alpha and mu = 1, where alpha in [0, 1/2) grades the output
operator's unboundedness; ``for_gramian`` builds that specialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Default strip half-width.  The Laplacian's sector of analyticity is the
# whole right half plane (d -> pi/2), but the rule requires d < pi/2 and the
# error constant blows up at the limit; pi/3 trades the two off.
DEFAULT_D = math.pi / 3


def min_m(d: float, rho: float) -> int:
    """Smallest admissible truncation index.

    The mesh h = sqrt(2 pi d / (rho m)) must satisfy h <= 2 pi d / ln 2,
    i.e. m >= (ln 2)^2 / (2 pi d rho).
    """
    if not (0.0 < d < math.pi / 2):
        raise ValueError(f"strip half-width d must lie in (0, pi/2), got {d}")
    if rho <= 0.0:
        raise ValueError(f"left decay rate rho must be positive, got {rho}")
    bound = math.log(2.0) ** 2 / (2.0 * math.pi * d * rho)
    return max(1, math.ceil(bound))


@dataclass(frozen=True)
class SincRule:
    """Nodes z_k in (0, t) and weights w_k of the transformed trapezoid rule.

    k runs from -m to n_pos with n_pos = ceil(rho/mu * m + 1);
    z_k = t e^{kh} / (e^{kh} + 1) and w_k = z_k (t - z_k) / t.
    """

    t: float
    d: float
    rho: float
    mu: float
    m: int
    n_pos: int = field(init=False)
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.t <= 0.0 or not math.isfinite(self.t):
            raise ValueError(f"interval length t must be positive, got {self.t}")
        if self.mu <= 0.0:
            raise ValueError(f"right decay rate mu must be positive, got {self.mu}")
        required = min_m(self.d, self.rho)
        if self.m < required:
            raise ValueError(
                f"m={self.m} is too small for d={self.d}, rho={self.rho}: "
                f"need m >= {required} so that h <= 2 pi d / ln 2"
            )
        h = math.sqrt(2.0 * math.pi * self.d / (self.rho * self.m))
        n_pos = math.ceil(self.rho / self.mu * self.m + 1)
        k = np.arange(-self.m, n_pos + 1)
        # Algebraically z_k = t e^{kh}/(e^{kh}+1); evaluate with e^{-|kh|}
        # only so that large |kh| cannot overflow.
        ekh_neg = np.exp(-k * h)
        nodes = self.t / (1.0 + ekh_neg)
        weights = nodes * (self.t - nodes) / self.t
        if not (np.all(nodes > 0.0) and np.all(nodes < self.t)
                and np.all(np.diff(nodes) > 0.0)):
            raise ValueError("quadrature nodes collapsed onto an endpoint; m too large for t")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "n_pos", n_pos)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size


def build_rule(t: float, d: float, rho: float, mu: float, m: int) -> SincRule:
    """Construct the rule; raises if m is below ``min_m(d, rho)``."""
    return SincRule(t=t, d=d, rho=rho, mu=mu, m=m)


def for_gramian(t: float, alpha: float, m: int, d: float = DEFAULT_D) -> SincRule:
    """Rule for integrands behaving like s^(-2 alpha) at the left endpoint.

    Sets rho = 1 - 2*alpha and mu = 1, the rates that the Gramian
    integrand s -> ||C e^{sA}||^2-type terms satisfy for alpha in [0, 1/2).
    """
    if not (0.0 <= alpha < 0.5):
        raise ValueError(f"alpha must lie in [0, 1/2), got {alpha}")
    return SincRule(t=t, d=d, rho=1.0 - 2.0 * alpha, mu=1.0, m=m)


def integrate(f, rule: SincRule) -> float:
    """h * sum_k w_k f(z_k) over the rule's nodes.

    f must return finite values at every node; a non-finite value raises
    with the offending node index.
    """
    total = 0.0
    for i, (z, w) in enumerate(zip(rule.nodes, rule.weights)):
        v = float(f(z))
        if not math.isfinite(v):
            k = i - rule.m
            raise ValueError(f"integrand returned non-finite value at node k={k} (z={z!r})")
        total += w * v
    return rule.h * total
