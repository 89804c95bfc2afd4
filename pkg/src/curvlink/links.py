"""Metric graphs of vertex links.

Generator points carry the labels ``"x+"`` and ``"x-"``. A block for a pair
with index m >= 3 contributes the complete graph on its four points; a pair
with index 2 contributes the square torus link, a circle of four quarter arcs.
Each generator point is antipodal to its partner, so every block also emits
the chord of length pi between them. The chord is the same arc whichever
block emits it, and is kept once.
"""

import itertools
import math
from dataclasses import dataclass, field
from math import pi

from .dihedral import beta_of, symmetric_delta
from .errors import DomainError
from .metric_graph import Edge, MetricGraph

__all__ = [
    "INFINITY",
    "ArtinDefiningGraph",
    "DeltaAssignment",
    "LGraphParams",
    "plus",
    "minus",
    "block_link",
    "combined_link",
    "edge_length_from_tag",
    "l_graph",
    "l_graph_diameter_formula",
    "TORUS_DELTA",
]

INFINITY = math.inf

# index-2 blocks are square tori: generator angle pi/2, i.e. delta = pi/4
TORUS_DELTA = pi / 4


def plus(x):
    return f"{x}+"


def minus(x):
    return f"{x}-"


def _pair_key(x, y):
    return frozenset((x, y))


def _pair_name(x, y):
    return f"{x},{y}"


def block_link(m: int, delta: float | None = None, a="a", b="b") -> MetricGraph:
    """Link of the base vertex of one building block, as a metric graph.

    For m >= 3: the complete graph on a+, a-, b+, b- with
    d(a+, b+) = d(a-, b-) = alpha = 2 delta, d(a+, b-) = d(a-, b+) = beta and
    the two pi chords. For m = 2: the circle a+ b+ a- b- of four pi/2 arcs
    together with the chords; ``delta`` must then be omitted or pi/4.
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"block index must be an integer >= 2, got {m!r}")
    ap, am, bp, bm = plus(a), minus(a), plus(b), minus(b)
    pair = _pair_name(a, b)
    edges = [
        Edge(ap, am, pi, f"chord:{a}", shared=True),
        Edge(bp, bm, pi, f"chord:{b}", shared=True),
    ]
    if m == 2:
        if delta is not None and not math.isclose(delta, TORUS_DELTA, rel_tol=0, abs_tol=1e-12):
            raise DomainError("an index-2 block has its angle fixed at pi/2 (delta = pi/4)")
        for u, v in ((ap, bp), (bp, am), (am, bm), (bm, ap)):
            edges.append(Edge(u, v, pi / 2, f"torus:{pair}"))
    else:
        if delta is None:
            raise DomainError(f"delta is required for index {m}")
        alpha, beta = 2.0 * delta, beta_of(m, delta)
        edges += [
            Edge(ap, bp, alpha, f"alpha:{pair}"),
            Edge(am, bm, alpha, f"alpha:{pair}"),
            Edge(ap, bm, beta, f"beta:{pair}"),
            Edge(am, bp, beta, f"beta:{pair}"),
        ]
    return MetricGraph([ap, am, bp, bm], edges)


@dataclass(frozen=True)
class ArtinDefiningGraph:
    """Generators and relator indices; absent pairs have index infinity."""

    generators: tuple
    relations: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise DomainError("generator labels must be distinct")
        for x in gens:
            if not isinstance(x, str) or not x or x[-1] in "+-":
                raise DomainError(f"generator label {x!r} must be a non-empty string not ending in +/-")
        rel = {}
        for pair, m in dict(self.relations).items():
            pair = frozenset(pair)
            if len(pair) != 2 or not pair <= set(gens):
                raise DomainError(f"relation pair {sorted(pair)} must name two distinct generators")
            if m is None or m == INFINITY:
                continue
            if isinstance(m, bool) or not isinstance(m, int) or m < 2:
                raise DomainError(f"relator index must be an integer >= 2 or infinity, got {m!r}")
            if pair in rel and rel[pair] != m:
                raise DomainError(f"conflicting indices for pair {sorted(pair)}")
            rel[pair] = m
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", rel)

    @classmethod
    def from_indices(cls, generators, indices):
        """Build from ``{(x, y): m}``."""
        return cls(tuple(generators), {frozenset(p): m for p, m in indices.items()})

    @classmethod
    def triangle(cls, m_ab, m_bc, m_ca, names=("a", "b", "c")):
        a, b, c = names
        return cls.from_indices(names, {(a, b): m_ab, (b, c): m_bc, (c, a): m_ca})

    def index(self, x, y):
        return self.relations.get(frozenset((x, y)), INFINITY)

    def finite_pairs(self):
        """Finite-index pairs as ordered tuples, in generator order."""
        order = {x: i for i, x in enumerate(self.generators)}
        out = []
        for x, y in itertools.combinations(self.generators, 2):
            if frozenset((x, y)) in self.relations:
                out.append((x, y) if order[x] < order[y] else (y, x))
        return out

    def finite_triples(self):
        """Generator triples whose three pairwise indices are all finite."""
        return [
            t
            for t in itertools.combinations(self.generators, 3)
            if all(frozenset(p) in self.relations for p in itertools.combinations(t, 2))
        ]

    def relabel(self, mapping):
        return ArtinDefiningGraph(
            tuple(mapping[x] for x in self.generators),
            {frozenset(mapping[x] for x in p): m for p, m in self.relations.items()},
        )

    def to_dict(self):
        return {
            "generators": list(self.generators),
            "relations": [
                {"pair": [x, y], "m": self.index(x, y)} for x, y in self.finite_pairs()
            ],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            gens = list(data["generators"])
            rels = data.get("relations", [])
            indices = {}
            for r in rels:
                x, y = r["pair"]
                m = r["m"]
                if isinstance(m, str) and m.lower() in ("inf", "infinity", "oo"):
                    m = INFINITY
                indices[frozenset((x, y))] = m
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed Artin graph JSON: {exc}") from None
        return cls(tuple(gens), indices)


@dataclass(frozen=True)
class DeltaAssignment:
    """Choice of delta for each finite pair of index >= 3 (radians).

    Index-2 pairs need no entry; their angle is fixed at pi/2.
    """

    deltas: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        out = {}
        for pair, d in dict(self.deltas).items():
            pair = frozenset(pair)
            d = float(d)
            if not (0.0 < d < pi / 2):
                raise DomainError(f"delta for {sorted(pair)} must lie in (0, pi/2), got {d!r}")
            out[pair] = d
        object.__setattr__(self, "deltas", out)

    def delta(self, x, y):
        return self.deltas.get(frozenset((x, y)))

    @classmethod
    def symmetric(cls, g: ArtinDefiningGraph):
        """alpha = beta on every block of index >= 3."""
        return cls(
            {frozenset(p): symmetric_delta(g.index(*p)) for p in g.finite_pairs() if g.index(*p) >= 3}
        )

    @classmethod
    def from_alphas(cls, g: ArtinDefiningGraph, alpha_of_index):
        """Set alpha = ``alpha_of_index(m)`` on every pair of index m >= 3."""
        return cls(
            {frozenset(p): alpha_of_index(g.index(*p)) / 2.0 for p in g.finite_pairs() if g.index(*p) >= 3}
        )

    def alpha_beta(self, g: ArtinDefiningGraph, x, y):
        """(alpha, beta) of the block on pair {x, y}."""
        m = g.index(x, y)
        if m == 2:
            return pi / 2, pi / 2
        d = self.delta(x, y)
        if d is None:
            raise DomainError(f"no delta assigned to pair {x},{y}")
        return 2.0 * d, beta_of(m, d)

    def to_dict(self, g: ArtinDefiningGraph):
        return {
            "deltas_deg": {
                _pair_name(x, y): math.degrees(self.deltas[frozenset((x, y))])
                for x, y in g.finite_pairs()
                if frozenset((x, y)) in self.deltas
            }
        }

    @classmethod
    def from_dict(cls, data, g: ArtinDefiningGraph):
        if data.get("auto") == "symmetric":
            return cls.symmetric(g)
        raw = data.get("deltas_deg")
        if not isinstance(raw, dict):
            raise DomainError("delta JSON needs 'deltas_deg' or 'auto': 'symmetric'")
        out = {}
        for key, val in raw.items():
            parts = [p.strip() for p in key.split(",")]
            if len(parts) != 2 or not set(parts) <= set(g.generators):
                raise DomainError(f"bad pair key {key!r}")
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise DomainError(f"delta for {key!r} must be a number")
            out[frozenset(parts)] = math.radians(val)
        return cls(out)


def combined_link(g: ArtinDefiningGraph, d: DeltaAssignment) -> MetricGraph:
    """Union of the block links over all finite pairs, glued along generator points."""
    vertices = []
    for x in g.generators:
        vertices += [plus(x), minus(x)]
    edges = []
    for x, y in g.finite_pairs():
        m = g.index(x, y)
        if m == 2:
            delta = d.delta(x, y)
            if delta is not None and not math.isclose(delta, TORUS_DELTA, abs_tol=1e-12):
                raise DomainError(f"pair {x},{y} has index 2; its delta is fixed at pi/4")
            block = block_link(2, None, x, y)
        else:
            delta = d.delta(x, y)
            if delta is None:
                raise DomainError(f"no delta assigned to finite pair {x},{y}")
            block = block_link(m, delta, x, y)
        edges.extend(block.edges)
    return MetricGraph(vertices, edges)


def edge_length_from_tag(tag, g: ArtinDefiningGraph, d: DeltaAssignment):
    """Length of a combined-link edge recomputed from its tag and a delta assignment."""
    kind, _, rest = tag.partition(":")
    if kind == "chord":
        return pi
    if kind == "torus":
        return pi / 2
    x, y = rest.split(",")
    alpha, beta = d.alpha_beta(g, x, y)
    if kind == "alpha":
        return alpha
    if kind == "beta":
        return beta
    raise DomainError(f"unknown edge tag {tag!r}")


@dataclass(frozen=True)
class LGraphParams:
    rho: float
    sigma: float
    n_r: int = 1
    n_s: int = 1

    def __post_init__(self):
        if not (self.rho > 0 and self.sigma > 0 and self.rho + self.sigma < pi):
            raise DomainError("need rho > 0, sigma > 0 and rho + sigma < pi")
        for n in (self.n_r, self.n_s):
            if n not in (0, 1, 2):
                raise DomainError("arc counts must be 0, 1 or 2")


def l_graph(p: LGraphParams) -> MetricGraph:
    """Two 2 pi circles C_r, C_s sharing a pi arc from z+ to z-, plus pi arcs.

    Placement along the arcs, read from z+:

        shared arc    z+ --rho-- r+ --(pi - rho - sigma)-- s- --sigma-- z-
        free arc C_r  z+ --(pi - rho)-- r- --rho-- z-
        free arc C_s  z+ --sigma-- s+ --(pi - sigma)-- z-

    so r+/r- and s+/s- are antipodal on their circles. ``n_r`` arcs of
    length pi join r+ to r-, and ``n_s`` join s+ to s-.
    """
    rho, sigma = p.rho, p.sigma
    edges = [
        Edge("z+", "r+", rho, "shared"),
        Edge("r+", "s-", pi - rho - sigma, "shared"),
        Edge("s-", "z-", sigma, "shared"),
        Edge("z+", "r-", pi - rho, "free_r"),
        Edge("r-", "z-", rho, "free_r"),
        Edge("z+", "s+", sigma, "free_s"),
        Edge("s+", "z-", pi - sigma, "free_s"),
    ]
    edges += [Edge("r+", "r-", pi, "H(r)")] * p.n_r
    edges += [Edge("s+", "s-", pi, "H(s)")] * p.n_s
    return MetricGraph(["z+", "z-", "r+", "r-", "s+", "s-"], edges)


def l_graph_diameter_formula(rho: float, sigma: float) -> float:
    """pi + min(rho + sigma, pi - rho, pi - sigma)."""
    LGraphParams(rho, sigma)
    return pi + min(rho + sigma, pi - rho, pi - sigma)
