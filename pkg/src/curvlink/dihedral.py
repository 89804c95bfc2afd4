"""Spherical trigonometry of the vertex link of a dihedral Artin building block.

A block for the dihedral Artin group A(m) is parameterized by the acute angle
``delta`` between its generator curves and the vertical direction. In the link
of the base vertex the generator points a+, a-, b+, b- sit at distance
``delta`` from the poles z+, z-, and the two half-links meet along arcs of
length ``theta = (m - 2) pi / m``.  This gives

    alpha = d(a+, b+) = d(a-, b-) = 2 delta
    beta  = d(a+, b-) = d(a-, b+),   cos beta = sin^2 delta cos theta - cos^2 delta

All angles are radians.
"""

from dataclasses import dataclass
from math import acos, cos, degrees, isfinite, pi, sin

from .errors import DomainError

__all__ = [
    "DihedralBlock",
    "theta_of",
    "beta_of",
    "alpha_beta_of",
    "symmetric_alpha",
    "symmetric_delta",
    "delta_for_alpha",
    "trigeqn_residual",
    "table1",
    "Table1Row",
    "TABLE1_M",
]

# relator indices tabulated by default
TABLE1_M = (3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 18, 19, 21, 22, 43, 44)


def _check_index(m, lowest):
    if isinstance(m, bool) or not isinstance(m, int) or m < lowest:
        raise DomainError(f"relator index must be an integer >= {lowest}, got {m!r}")


def _check_delta(delta):
    if not (isfinite(delta) and 0.0 < delta < pi / 2):
        raise DomainError(f"delta must lie in the open interval (0, pi/2), got {delta!r}")


def _clamped_acos(c):
    return acos(min(1.0, max(-1.0, c)))


def theta_of(m: int) -> float:
    """Interior angle (m - 2) pi / m of the regular m-gon."""
    _check_index(m, 2)
    return (m - 2) * pi / m


def beta_of(m: int, delta: float) -> float:
    """Distance d(a+, b-) in the link of the block X_m(delta)."""
    _check_delta(delta)
    theta = theta_of(m)
    c = sin(delta) ** 2 * cos(theta) - cos(delta) ** 2
    return _clamped_acos(c)


def alpha_beta_of(m: int, delta: float) -> tuple[float, float]:
    return 2.0 * delta, beta_of(m, delta)


def symmetric_alpha(m: int) -> float:
    """The common value of alpha = beta for index ``m`` (m >= 3).

    Setting alpha = beta in the link relation and solving for the cosine
    gives ``cos alpha = (cos theta - 1) / (cos theta + 3)``.
    """
    _check_index(m, 3)
    c = cos(theta_of(m))
    return _clamped_acos((c - 1.0) / (c + 3.0))


def symmetric_delta(m: int) -> float:
    return symmetric_alpha(m) / 2.0


def delta_for_alpha(alpha: float) -> float:
    if not (isfinite(alpha) and 0.0 < alpha < pi):
        raise DomainError(f"alpha must lie in (0, pi), got {alpha!r}")
    return alpha / 2.0


def trigeqn_residual(m: int, alpha: float, beta: float) -> float:
    """Left-hand side of 2 cos(beta) + (1 + cos theta) cos(alpha) + (1 - cos theta).

    Vanishes exactly when (alpha, beta) is a consistent pair for index m.
    """
    c = cos(theta_of(m))
    return 2.0 * cos(beta) + (1.0 + c) * cos(alpha) + (1.0 - c)


@dataclass(frozen=True)
class DihedralBlock:
    m: int
    delta: float

    def __post_init__(self):
        _check_index(self.m, 2)
        _check_delta(self.delta)

    @property
    def theta(self) -> float:
        return theta_of(self.m)

    @property
    def alpha(self) -> float:
        return 2.0 * self.delta

    @property
    def beta(self) -> float:
        return beta_of(self.m, self.delta)

    @classmethod
    def symmetric(cls, m):
        return cls(m, symmetric_delta(m))


@dataclass(frozen=True)
class Table1Row:
    m: int
    theta_deg: float
    cos_theta: float
    cos_alpha: float
    alpha_deg: float


def table1(m_values=TABLE1_M) -> list[Table1Row]:
    m_values = list(m_values)
    for m in m_values:
        _check_index(m, 3)
    rows = []
    for m in m_values:
        theta = theta_of(m)
        alpha = symmetric_alpha(m)
        rows.append(Table1Row(m, degrees(theta), cos(theta), cos(alpha), degrees(alpha)))
    return rows
