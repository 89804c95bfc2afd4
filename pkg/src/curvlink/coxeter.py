"""Geometric (Tits) representation of Coxeter groups and numerical element orders.

The bilinear form is B(e_i, e_j) = -cos(pi / m_ij), with -1 when m_ij is
infinite, and generator i acts by v -> v - 2 B(e_i, v) e_i.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

__all__ = [
    "CoxeterMatrix",
    "ReflectionRep",
    "OrderResult",
    "word_matrix",
    "element_order",
    "coxeter_abc_infinite",
    "parse_word",
    "spectral_radius",
    "COMMUTATOR_IMAGE_WORD",
]

IDENTITY_TOL = 1e-8
# a defective eigenvalue on the unit circle (parabolic elements) drifts by
# about sqrt(eps) ~ 1e-8 under rounding, so the margin sits well above that
SPECTRAL_MARGIN = 1e-6
GROWTH_WINDOW = 1000

# image in W(m, n, 2) of a^-1 b^-1 c^-1 a b c, namely (abc)^2
COMMUTATOR_IMAGE_WORD = "abcabc"


@dataclass(frozen=True)
class CoxeterMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise DomainError("Coxeter matrix must be square")
            if r[i] != 1:
                raise DomainError("Coxeter matrix diagonal must be 1")
            for j, m in enumerate(r):
                if m != rows[j][i]:
                    raise DomainError("Coxeter matrix must be symmetric")
                if i != j and not (m == math.inf or (isinstance(m, int) and m >= 2)):
                    raise DomainError(f"off-diagonal entries must be >= 2 or inf, got {m!r}")
        object.__setattr__(self, "entries", rows)

    @property
    def rank(self):
        return len(self.entries)

    @classmethod
    def triangle(cls, m, n, p):
        """W(m, n, p) on a, b, c with (ab)^m = (bc)^n = (ac)^p = 1."""
        return cls(((1, m, p), (m, 1, n), (p, n, 1)))

    def bilinear_form(self):
        n = self.rank
        B = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                m = self.entries[i][j]
                B[i, j] = -1.0 if m == math.inf else -math.cos(math.pi / m)
        return B


class ReflectionRep:
    def __init__(self, coxeter: CoxeterMatrix):
        self.coxeter = coxeter
        self.form = coxeter.bilinear_form()
        n = coxeter.rank
        eye = np.eye(n)
        # column j is the image of e_j: e_j - 2 B_ij e_i
        self.generators = []
        for i in range(n):
            S = eye.copy()
            S[i, :] -= 2.0 * self.form[i, :]
            self.generators.append(S)

    @classmethod
    def triangle(cls, m, n, p):
        return cls(CoxeterMatrix.triangle(m, n, p))

    @property
    def rank(self):
        return self.coxeter.rank


def parse_word(word, rank):
    """Accept a letter string ('abc' -> 0, 1, 2) or an index sequence."""
    if isinstance(word, str):
        idx = [ord(ch) - ord("a") for ch in word]
    else:
        idx = [int(k) for k in word]
    for k in idx:
        if not 0 <= k < rank:
            raise DomainError(f"generator index {k} out of range for rank {rank}")
    return idx


def word_matrix(rep: ReflectionRep, word) -> np.ndarray:
    M = np.eye(rep.rank)
    for k in parse_word(word, rep.rank):
        M = M @ rep.generators[k]
    return M


@dataclass(frozen=True)
class OrderResult:
    """``order`` is an int, ``math.inf`` (certified) or ``None`` (undetermined)."""

    order: float | int | None
    certificate: str
    spectral_radius: float
    detail: str = ""

    @property
    def infinite(self):
        return self.order == math.inf


def spectral_radius(M):
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def element_order(rep: ReflectionRep, word, cap: int = 10000) -> OrderResult:
    """Order of the word's matrix, or a certificate that it is infinite.

    A finite-order matrix has every eigenvalue on the unit circle, so a
    spectral radius above 1 + 1e-6 certifies infinite order. Otherwise powers
    are compared with the identity up to ``cap``. If none matches and the
    norm of M^cap is at least 1.5 times that of M^(cap/2), and far above the
    early powers, the powers grow without bound (a parabolic element) and
    the order is infinite. Anything else is reported as undetermined.
    """
    if cap < 1:
        raise DomainError("cap must be at least 1")
    M = word_matrix(rep, word)
    n = rep.rank
    rho = spectral_radius(M)
    if rho > 1.0 + SPECTRAL_MARGIN:
        return OrderResult(math.inf, "spectral", rho, f"spectral radius {rho:.12g} > 1")

    eye = np.eye(n)
    P = eye
    norms = []
    for k in range(1, cap + 1):
        P = P @ M
        if np.max(np.abs(P - eye)) <= IDENTITY_TOL:
            return OrderResult(k, "identity", rho, f"power {k} is the identity")
        norms.append(np.linalg.norm(P))

    if cap >= 2 * GROWTH_WINDOW:
        late, mid = norms[-1], norms[cap // 2 - 1]
        early = max(norms[:100])
        if late >= 1.5 * mid and late >= 10.0 * early:
            return OrderResult(
                math.inf, "norm-growth", rho,
                f"|M^{cap}| = {late:.6g}, |M^{cap // 2}| = {mid:.6g}",
            )
    return OrderResult(None, "undetermined", rho, f"no identity power up to {cap}")


def coxeter_abc_infinite(m: int, n: int, p: int, cap: int = 10000):
    """``(infinite, result)`` for the Coxeter element abc of W(m, n, p).

    The numerical verdict is compared with the sign of 1/m + 1/n + 1/p - 1
    (the triangle group is spherical exactly when it is positive); a
    disagreement raises, and an undetermined order is returned as-is.
    """
    for k in (m, n, p):
        if isinstance(k, bool) or not isinstance(k, int) or k < 2:
            raise DomainError("triangle indices must be integers >= 2")
    res = element_order(ReflectionRep.triangle(m, n, p), "abc", cap)
    if res.order is None:
        return None, res
    infinite = res.infinite
    expected = Fraction(1, m) + Fraction(1, n) + Fraction(1, p) <= 1
    if infinite != expected:
        raise ArithmeticError(
            f"W({m},{n},{p}): numerical order {res.order} contradicts the angle-sum predicate"
        )
    return infinite, res
