"""Link-condition verdicts for glued dihedral blocks.

``check`` runs the systole of the full combined link. ``triples_check`` is the
shortcut valid once every block edge is at least pi/2: then any circle with
four or more edges is already 2 pi long, circles through a pi chord are too,
and only triangles with one edge from each block of a finite triple remain.
"""

import itertools
import math
import warnings
from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy.optimize import minimize

from .dihedral import beta_of, symmetric_alpha
from .errors import DomainError
from .links import (
    ArtinDefiningGraph,
    DeltaAssignment,
    combined_link,
    edge_length_from_tag,
    minus,
    plus,
)
from .metric_graph import DEFAULT_TOL, systole

__all__ = [
    "CurvatureVerdict",
    "ReductionInapplicable",
    "ThresholdRow",
    "EnvelopeReport",
    "SolveResult",
    "check",
    "triples_check",
    "enumerate_amn2",
    "excluded_triples",
    "reference_excluded_list",
    "recipe_assignment",
    "alpha_plus_two_beta_envelope",
    "solve_deltas",
    "amn2_graph",
]

TWO_PI = 2 * pi


class ReductionInapplicable(DomainError):
    """Some block edge is shorter than pi/2, so triangles no longer suffice."""


@dataclass(frozen=True)
class CurvatureVerdict:
    passed: bool
    systole: float
    cycle: tuple = ()
    cycle_tags: tuple = ()
    deltas: DeltaAssignment = field(default_factory=DeltaAssignment)
    tol: float = DEFAULT_TOL

    @property
    def slack(self):
        return self.systole - TWO_PI


def _resolve(g, d):
    return DeltaAssignment.symmetric(g) if d is None else d


def check(g: ArtinDefiningGraph, d: DeltaAssignment | None = None, tol: float = DEFAULT_TOL):
    """Verdict from the systole of the combined link (``d=None`` means symmetric)."""
    d = _resolve(g, d)
    link = combined_link(g, d)
    w = systole(link)
    if w is None:
        return CurvatureVerdict(True, math.inf, (), (), d, tol)
    return CurvatureVerdict(w.length >= TWO_PI - tol, w.length, w.vertices, tuple(w.tags(link)), d, tol)


def triples_check(g: ArtinDefiningGraph, d: DeltaAssignment | None = None, tol: float = DEFAULT_TOL):
    """Verdict from the mixed-sign triangles of finite triples only.

    Raises :class:`ReductionInapplicable` unless every alpha and beta is at
    least pi/2.
    """
    d = _resolve(g, d)
    ab = {}
    for x, y in g.finite_pairs():
        alpha, beta = d.alpha_beta(g, x, y)
        if min(alpha, beta) < pi / 2 - 1e-12:
            raise ReductionInapplicable(
                f"block {x},{y} has alpha={math.degrees(alpha):.3f} deg, "
                f"beta={math.degrees(beta):.3f} deg; both must be at least 90 deg"
            )
        ab[frozenset((x, y))] = (alpha, beta, g.index(x, y))

    def edge(x, ex, y, ey):
        alpha, beta, m = ab[frozenset((x, y))]
        if m == 2:
            return pi / 2, f"torus:{x},{y}"
        return (alpha, f"alpha:{x},{y}") if ex == ey else (beta, f"beta:{x},{y}")

    best = math.inf
    cycle, tags = (), ()
    for x, y, z in g.finite_triples():
        for ex, ey, ez in itertools.product((1, -1), repeat=3):
            e1, e2, e3 = edge(x, ex, y, ey), edge(y, ey, z, ez), edge(z, ez, x, ex)
            total = e1[0] + e2[0] + e3[0]
            if total < best:
                best = total
                sign = {1: plus, -1: minus}
                cycle = (sign[ex](x), sign[ey](y), sign[ez](z))
                tags = (e1[1], e2[1], e3[1])
    return CurvatureVerdict(best >= TWO_PI - tol, best, cycle, tags, d, tol)


def amn2_graph(m, n, names=("a", "b", "c")):
    """A(m, n, 2): index m on ab, n on bc, 2 on ac."""
    return ArtinDefiningGraph.triangle(m, n, 2, names)


@dataclass(frozen=True)
class ThresholdRow:
    n: int
    minimal_m: int | None
    required_alpha: float
    # indices m >= n below the threshold where A(m, n, 2) is of finite type
    finite_type_ms: tuple = ()


def enumerate_amn2(m_max: int = 60, n_range=range(3, 9), tol: float = DEFAULT_TOL):
    """Least m >= n for which the symmetric A(m, n, 2) link passes, per n.

    Pairs are unordered, so m is scanned upward from n; ``minimal_m`` is
    ``None`` when nothing up to ``m_max`` passes.
    """
    rows = []
    for n in n_range:
        if n < 3:
            raise DomainError("n must be at least 3")
        found = None
        for m in range(n, m_max + 1):
            if check(amn2_graph(m, n), None, tol).passed:
                found = m
                break
        top = found if found is not None else m_max + 1
        finite = tuple(m for m in range(n, top) if 1 / m + 1 / n + 1 / 2 > 1)
        rows.append(ThresholdRow(n, found, 1.5 * pi - symmetric_alpha(n), finite))
    return rows


def excluded_triples(max_index: int = 60, tol: float = DEFAULT_TOL):
    """Index triples (descending) whose symmetric three-block link fails."""
    if max_index < 2:
        raise DomainError("max_index must be at least 2")
    out = []
    for m1 in range(2, max_index + 1):
        for m2 in range(2, m1 + 1):
            for m3 in range(2, m2 + 1):
                g = ArtinDefiningGraph.triangle(m1, m2, m3)
                if not triples_check(g, None, tol).passed:
                    out.append((m1, m2, m3))
    return out


def reference_excluded_list(max_index: int):
    """The known excluded families, expanded up to ``max_index``."""
    fams = set()

    def add(*t):
        if max(t) <= max_index:
            fams.add(tuple(sorted(t, reverse=True)))

    for m in range(2, max_index + 1):
        add(m, 2, 2)
    for m in range(3, 44):
        add(m, 3, 2)
    for m in range(4, 19):
        add(m, 4, 2)
    for m in range(5, 12):
        add(m, 5, 2)
    for m in range(6, 10):
        add(m, 6, 2)
    add(7, 7, 2)
    for m in range(3, 22):
        add(m, 3, 3)
    for m in range(4, 13):
        add(m, 4, 3)
    for m in range(5, 10):
        add(m, 5, 3)
    add(6, 6, 3)
    add(7, 6, 3)
    for m in range(4, 9):
        add(m, 4, 4)
    add(5, 5, 4)
    add(6, 5, 4)
    add(5, 5, 5)
    return sorted(fams)


RECIPE_ALPHA_4 = math.radians(163.0)
RECIPE_ALPHA_5_UP = math.radians(179.0)


def recipe_assignment(g: ArtinDefiningGraph) -> DeltaAssignment:
    """alpha = 163 deg on index-4 blocks and 179 deg on blocks of index >= 5."""
    for x, y in g.finite_pairs():
        if g.index(x, y) < 4:
            raise DomainError("the recipe needs every finite index to be at least 4")
    return DeltaAssignment.from_alphas(g, lambda m: RECIPE_ALPHA_4 if m == 4 else RECIPE_ALPHA_5_UP)


@dataclass(frozen=True)
class EnvelopeReport:
    """Samples of alpha -> alpha + 2 beta(alpha) for one index, alpha in (pi/2, pi)."""

    m: int
    alphas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    max_value: float
    argmax_alpha: float

    @property
    def margin(self):
        return TWO_PI - self.max_value


def alpha_plus_two_beta_envelope(m: int, step: float = math.radians(0.01)) -> EnvelopeReport:
    """Scan the worst mixed triangle of an equal triple {m, m, m} with common alpha."""
    if step <= 0:
        raise DomainError("step must be positive")
    k = np.arange(1, int(math.ceil((pi / 2) / step)))
    alphas = pi / 2 + k * step
    alphas = alphas[alphas < pi]
    values = np.array([a + 2 * beta_of(m, a / 2) for a in alphas])
    i = int(np.argmax(values))
    return EnvelopeReport(m, alphas, values, float(values[i]), float(alphas[i]))


@dataclass(frozen=True)
class SolveResult:
    deltas: DeltaAssignment
    slack: float
    feasible: bool
    mode: str
    cycle_tags: tuple = ()
    evaluations: int = 0
    envelopes: tuple = ()


class _Objective:
    def __init__(self, g, pairs):
        self.g = g
        self.pairs = pairs
        self.calls = 0

    def assignment(self, x):
        return DeltaAssignment({frozenset(p): float(v) for p, v in zip(self.pairs, x)})

    def __call__(self, x):
        self.calls += 1
        d = self.assignment(x)
        link = combined_link(self.g, d)
        w = systole(link)
        if w is None:
            return math.inf, ()
        return w.length - TWO_PI, tuple(w.tags(link))

    def cycle_length(self, tags, x):
        d = self.assignment(x)
        return sum(edge_length_from_tag(t, self.g, d) for t in tags)


def _grid(step):
    k = np.arange(1, int(math.ceil((pi / 2) / step)))
    pts = k * step
    return pts[pts < pi / 2]


def _refine(obj, x0, f0, tags0, lo, hi, rounds=40):
    """Cutting planes: maximize t subject to every collected short cycle being >= 2 pi + t."""
    cycles = [tags0] if tags0 else []
    best_x, best_f, best_tags = x0, f0, tags0
    x = np.array(x0, dtype=float)
    for _ in range(rounds):
        if not cycles:
            break
        n = len(x)
        z0 = np.append(x, best_f if math.isfinite(best_f) else 0.0)
        cons = [
            {"type": "ineq", "fun": (lambda z, c=c: obj.cycle_length(c, z[:n]) - TWO_PI - z[n])}
            for c in cycles
        ]
        bounds = [(lo, hi)] * n + [(None, None)]
        with warnings.catch_warnings():
            # SLSQP probes slightly outside the box; the result is clipped below
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(lambda z: -z[n], z0, method="SLSQP", bounds=bounds, constraints=cons,
                           options={"maxiter": 200, "ftol": 1e-13})
        x = np.clip(res.x[:n], lo, hi)
        f, tags = obj(x)
        if f > best_f:
            best_x, best_f, best_tags = x, f, tags
        if tags in cycles:
            break
        cycles.append(tags)
    return best_x, best_f, best_tags


def solve_deltas(
    g: ArtinDefiningGraph,
    mode: str = "free",
    grid_step: float = math.radians(0.5),
    tol: float = DEFAULT_TOL,
    max_sweeps: int = 20,
) -> SolveResult:
    """Search delta assignments maximizing systole - 2 pi of the combined link.

    ``symmetric`` evaluates alpha = beta on every block. ``free`` scans a
    common delta, then runs coordinate sweeps over the grid of multiples of
    ``grid_step`` in (0, pi/2), then refines with cutting planes on the short
    cycles found. A negative slack after the search is evidence of
    infeasibility, not a proof.
    """
    if grid_step <= 0:
        raise DomainError("grid_step must be positive")
    if mode not in ("symmetric", "free"):
        raise DomainError(f"unknown mode {mode!r}")
    pairs = [p for p in g.finite_pairs() if g.index(*p) >= 3]
    obj = _Objective(g, pairs)

    sym = DeltaAssignment.symmetric(g)
    x = np.array([sym.delta(*p) for p in pairs], dtype=float)
    f, tags = obj(x)
    if mode == "free" and pairs:
        grid = _grid(grid_step)
        for v in grid:
            cand = np.full(len(pairs), v)
            cf, ct = obj(cand)
            if cf > f:
                x, f, tags = cand, cf, ct
        for _ in range(max_sweeps):
            improved = False
            for i in range(len(pairs)):
                for v in grid:
                    if v == x[i]:
                        continue
                    cand = x.copy()
                    cand[i] = v
                    cf, ct = obj(cand)
                    if cf > f + 1e-15:
                        x, f, tags, improved = cand, cf, ct, True
            if not improved:
                break
        lo = min(grid[0], x.min()) if len(grid) else 1e-9
        hi = max(grid[-1], x.max()) if len(grid) else pi / 2 - 1e-9
        x, f, tags = _refine(obj, x, f, tags, lo, hi)

    d = obj.assignment(x)
    feasible = f >= -tol
    envelopes = ()
    if not feasible:
        equal = sorted({g.index(*t[:2]) for t in g.finite_triples()
                        if len({g.index(a, b) for a, b in itertools.combinations(t, 2)}) == 1
                        and g.index(*t[:2]) >= 3})
        envelopes = tuple(alpha_plus_two_beta_envelope(m) for m in equal)
    return SolveResult(d, float(f), feasible, mode, tags, obj.calls, envelopes)
