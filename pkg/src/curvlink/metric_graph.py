"""Finite metric graphs: shortest paths, systole and exact diameter.

A metric graph here is a multigraph whose edges are isometric to intervals of
the stated length. Parallel edges and self-loops are allowed, since two
distinct arcs between the same endpoints bound a genuine embedded circle.
The graph is CAT(1) exactly when its systole (the length of the shortest
embedded circle) is at least 2 pi.
"""

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path as _csgraph_shortest_path

from .errors import DomainError

__all__ = [
    "Edge",
    "MetricGraph",
    "CycleWitness",
    "DiameterResult",
    "shortest_path",
    "distance_matrix",
    "systole",
    "is_cat1",
    "diameter",
    "sampled_diameter",
    "brute_force_systole",
    "graph_to_dict",
    "graph_from_dict",
    "DEFAULT_TOL",
    "BRUTE_FORCE_MAX_VERTICES",
]

DEFAULT_TOL = 1e-9
BRUTE_FORCE_MAX_VERTICES = 12

# lengths equal to within this are treated as the same geometric arc
_SHARED_ARC_RTOL = 1e-12


@dataclass(frozen=True)
class Edge:
    u: Hashable
    v: Hashable
    length: float
    tag: str = ""
    # marks an arc that several builders may emit; duplicates collapse to one
    shared: bool = False

    @property
    def is_loop(self):
        return self.u == self.v

    def other(self, w):
        return self.v if w == self.u else self.u


class MetricGraph:
    """Immutable metric multigraph.

    ``edges`` may contain :class:`Edge` instances or tuples
    ``(u, v, length[, tag[, shared]])``. Endpoints must be declared vertices.
    """

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable = ()):
        verts = []
        seen = set()
        for v in vertices:
            if v in seen:
                raise DomainError(f"duplicate vertex {v!r}")
            seen.add(v)
            verts.append(v)
        self._vertices = tuple(verts)
        self._index = {v: i for i, v in enumerate(self._vertices)}

        kept = []
        shared_seen = {}
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.u not in self._index or e.v not in self._index:
                raise DomainError(f"edge {e.u!r}-{e.v!r} has an undeclared endpoint")
            length = float(e.length)
            if not (math.isfinite(length) and length > 0.0):
                raise DomainError(f"edge length must be positive and finite, got {e.length!r}")
            if length != e.length:
                e = Edge(e.u, e.v, length, e.tag, e.shared)
            if e.shared:
                key = frozenset((e.u, e.v))
                prior = shared_seen.get(key, [])
                if any(math.isclose(p, length, rel_tol=_SHARED_ARC_RTOL) for p in prior):
                    continue
                shared_seen.setdefault(key, []).append(length)
            kept.append(e)
        self._edges = tuple(kept)

        adj = {v: [] for v in self._vertices}
        for k, e in enumerate(self._edges):
            adj[e.u].append((e.v, e.length, k))
            if not e.is_loop:
                adj[e.v].append((e.u, e.length, k))
        self._adj = adj

    @property
    def vertices(self):
        return self._vertices

    @property
    def edges(self):
        return self._edges

    def index(self, v):
        return self._index[v]

    def neighbors(self, v):
        """(neighbor, length, edge index) triples incident to ``v``."""
        return self._adj[v]

    def __contains__(self, v):
        return v in self._index

    def __len__(self):
        return len(self._vertices)

    def __repr__(self):
        return f"MetricGraph({len(self._vertices)} vertices, {len(self._edges)} edges)"

    def max_edge_length(self):
        return max((e.length for e in self._edges), default=0.0)

    def edge_multiset(self, ndigits=12):
        """Sorted canonical description of the edges, for comparisons."""
        out = []
        for e in self._edges:
            ends = tuple(sorted((repr(e.u), repr(e.v))))
            out.append((ends, round(e.length, ndigits)))
        return sorted(out)

    def with_edges(self, extra):
        return MetricGraph(self._vertices, list(self._edges) + list(extra))

    def relabel(self, mapping):
        return MetricGraph(
            [mapping[v] for v in self._vertices],
            [Edge(mapping[e.u], mapping[e.v], e.length, e.tag, e.shared) for e in self._edges],
        )

    def subdivide(self, k, t, new_vertex):
        """Split edge ``k`` at distance ``t`` from its first endpoint."""
        e = self._edges[k]
        if not 0.0 < t < e.length:
            raise DomainError("subdivision point must be interior to the edge")
        if new_vertex in self._index:
            raise DomainError(f"vertex {new_vertex!r} already exists")
        edges = list(self._edges[:k]) + list(self._edges[k + 1:])
        edges.append(Edge(e.u, new_vertex, t, e.tag))
        edges.append(Edge(new_vertex, e.v, e.length - t, e.tag))
        return MetricGraph(self._vertices + (new_vertex,), edges)

    def is_connected(self):
        if not self._vertices:
            return True
        start = self._vertices[0]
        seen = {start}
        stack = [start]
        while stack:
            w = stack.pop()
            for x, _, _ in self._adj[w]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return len(seen) == len(self._vertices)


@dataclass(frozen=True)
class CycleWitness:
    """An embedded circle given as a closed walk.

    ``vertices[i]`` and ``vertices[i + 1]`` are joined by ``edges[i]``; the
    walk returns to ``vertices[0]`` along the last edge.
    """

    vertices: tuple
    edges: tuple
    length: float

    def tags(self, g):
        return [g.edges[k].tag for k in self.edges]

    def is_embedded(self, g):
        if len(set(self.edges)) != len(self.edges):
            return False
        if len(set(self.vertices)) != len(self.vertices):
            return False
        walk = list(self.vertices) + [self.vertices[0]]
        for k, a, b in zip(self.edges, walk, walk[1:]):
            e = g.edges[k]
            if {e.u, e.v} != {a, b}:
                return False
        return True


def _dijkstra(g, source, skip_edge=None, target=None, bound=math.inf):
    dist = {source: 0.0}
    pred = {source: None}
    done = set()
    heap = [(0.0, 0, source)]
    counter = itertools.count(1)
    while heap:
        d, _, w = heapq.heappop(heap)
        if w in done:
            continue
        if d >= bound:
            break
        done.add(w)
        if w == target:
            break
        for x, length, k in g.neighbors(w):
            if k == skip_edge or x in done:
                continue
            nd = d + length
            if nd < dist.get(x, math.inf):
                dist[x] = nd
                pred[x] = (w, k)
                heapq.heappush(heap, (nd, next(counter), x))
    return dist, pred, done


def _walk_back(pred, target):
    verts = [target]
    edges = []
    while pred[verts[-1]] is not None:
        w, k = pred[verts[-1]]
        edges.append(k)
        verts.append(w)
    verts.reverse()
    edges.reverse()
    return verts, edges


def shortest_path(g: MetricGraph, u, v):
    """Return ``(length, vertex_path)`` or ``None`` if ``v`` is unreachable."""
    if u not in g or v not in g:
        raise DomainError(f"unknown vertex {u!r} or {v!r}")
    dist, pred, done = _dijkstra(g, u, target=v)
    if v not in done:
        return None
    verts, _ = _walk_back(pred, v)
    return dist[v], verts


def distance_matrix(g: MetricGraph) -> np.ndarray:
    """All-pairs shortest path lengths, indexed by vertex order; inf if unreachable."""
    n = len(g)
    out = np.full((n, n), np.inf)
    for i, v in enumerate(g.vertices):
        dist, _, done = _dijkstra(g, v)
        for w in done:
            out[i, g.index(w)] = dist[w]
    return out


def systole(g: MetricGraph):
    """Shortest embedded circle, as a :class:`CycleWitness`, or ``None`` for a forest.

    Every embedded circle through a non-loop edge e = (u, v) has length at
    least len(e) + d(u, v) in g with e removed, and the shortest such path
    closes up with e into an embedded circle. Self-loops are circles on their
    own; parallel edges survive the removal of one of them.
    """
    best = math.inf
    witness = None
    for k, e in enumerate(g.edges):
        if e.length >= best:
            continue
        if e.is_loop:
            best = e.length
            witness = CycleWitness((e.u,), (k,), e.length)
            continue
        dist, pred, done = _dijkstra(g, e.u, skip_edge=k, target=e.v, bound=best - e.length)
        if e.v not in done:
            continue
        total = e.length + dist[e.v]
        if total < best:
            verts, edges = _walk_back(pred, e.v)
            best = total
            witness = CycleWitness(tuple(verts), tuple(edges) + (k,), total)
    return witness


def is_cat1(g: MetricGraph, tol: float = DEFAULT_TOL):
    """``(passes, witness)``; passes iff the systole is at least 2 pi - tol.

    On failure the witness is the offending short circle.
    """
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    w = systole(g)
    if w is None or w.length >= 2 * math.pi - tol:
        return True, None
    return False, w


def brute_force_systole(g: MetricGraph) -> float:
    """Minimum length over an explicit enumeration of embedded circles.

    Test oracle only: each circle is grown as a simple path from its smallest
    vertex, with partial paths already as long as the best circle cut off.
    Returns ``inf`` for a forest.
    """
    if len(g) > BRUTE_FORCE_MAX_VERTICES:
        raise DomainError(f"brute force limited to {BRUTE_FORCE_MAX_VERTICES} vertices")
    best = math.inf
    for e in g.edges:
        if e.is_loop:
            best = min(best, e.length)
    order = {v: i for i, v in enumerate(g.vertices)}

    def extend(start, w, length, on_path, used):
        nonlocal best
        for x, el, k in g.neighbors(w):
            if k in used or x == w:
                continue
            total = length + el
            if total >= best:
                continue
            if x == start:
                if len(used) >= 1:
                    best = total
                continue
            if x in on_path or order[x] < order[start]:
                continue
            on_path.add(x)
            used.add(k)
            extend(start, x, total, on_path, used)
            used.discard(k)
            on_path.discard(x)

    for s in g.vertices:
        extend(s, s, 0.0, {s}, set())
    return best


@dataclass(frozen=True)
class DiameterResult:
    """Diameter with a realizing pair of points.

    Points are ``(edge index, offset from edge.u)``.
    """

    length: float
    p: tuple
    q: tuple
    exact_candidates: int = field(default=0, compare=False)


def _pair_arrays(g, D, pairs):
    edges = g.edges
    a = np.array([edges[i].length for i, _ in pairs])
    b = np.array([edges[j].length for _, j in pairs])
    iu = np.array([g.index(edges[i].u) for i, _ in pairs])
    iv = np.array([g.index(edges[i].v) for i, _ in pairs])
    ju = np.array([g.index(edges[j].u) for _, j in pairs])
    jv = np.array([g.index(edges[j].v) for _, j in pairs])
    # route expressions c_x * x + c_y * y + c_0, one per choice of exit/entry endpoint
    cx = np.array([1.0, 1.0, -1.0, -1.0])
    cy = np.array([1.0, -1.0, 1.0, -1.0])
    c0 = np.stack(
        [
            D[iu, ju],
            b + D[iu, jv],
            a + D[iv, ju],
            a + b + D[iv, jv],
        ],
        axis=1,
    )
    return a, b, cx, cy, c0


def _evaluate(cx, cy, c0, x, y, same):
    # x, y: (P, K); c0: (P, 4)
    vals = c0[:, None, :] + cx[None, None, :] * x[..., None] + cy[None, None, :] * y[..., None]
    d = vals.min(axis=-1)
    if same:
        d = np.minimum(d, np.abs(x - y))
    return d


def _crossing_candidates(a, b, cx, cy, c0, same):
    """Vertices of the line arrangement on which the distance is piecewise affine."""
    P = len(a)
    lines = []  # each entry: (A, B, C) arrays of shape (P,) with A x + B y = C
    exprs = [(np.full(P, cx[k]), np.full(P, cy[k]), c0[:, k]) for k in range(4)]
    if same:
        exprs.append((np.ones(P), -np.ones(P), np.zeros(P)))
        exprs.append((-np.ones(P), np.ones(P), np.zeros(P)))
    for (ax, ay, a0), (bx, by, b0) in itertools.combinations(exprs, 2):
        lines.append((ax - bx, ay - by, b0 - a0))
    one, zero = np.ones(P), np.zeros(P)
    lines += [(one, zero, zero), (one, zero, a), (zero, one, zero), (zero, one, b)]

    A = np.stack([ln[0] for ln in lines], axis=1)
    B = np.stack([ln[1] for ln in lines], axis=1)
    C = np.stack([ln[2] for ln in lines], axis=1)
    idx = np.array(list(itertools.combinations(range(len(lines)), 2)))
    A1, B1, C1 = A[:, idx[:, 0]], B[:, idx[:, 0]], C[:, idx[:, 0]]
    A2, B2, C2 = A[:, idx[:, 1]], B[:, idx[:, 1]], C[:, idx[:, 1]]
    det = A1 * B2 - A2 * B1
    ok = np.abs(det) > 1e-12
    safe = np.where(ok, det, 1.0)
    x = (C1 * B2 - C2 * B1) / safe
    y = (A1 * C2 - A2 * C1) / safe
    eps = 1e-9 * np.maximum(1.0, np.maximum(a, b))[:, None]
    inside = ok & (x >= -eps) & (x <= a[:, None] + eps) & (y >= -eps) & (y <= b[:, None] + eps)
    x = np.clip(np.where(inside, x, 0.0), 0.0, a[:, None])
    y = np.clip(np.where(inside, y, 0.0), 0.0, b[:, None])
    return x, y, inside


def _grid_candidates(a, b, resolution):
    t = np.linspace(0.0, 1.0, resolution + 1)
    tx, ty = np.meshgrid(t, t, indexing="ij")
    x = a[:, None] * tx.ravel()[None, :]
    y = b[:, None] * ty.ravel()[None, :]
    return x, y


def diameter(g: MetricGraph, resolution: int = 8) -> DiameterResult:
    """Supremum of the path metric over all pairs of points, interior points included.

    For a point at offset x on edge e and one at offset y on edge f the
    distance is the minimum of four affine expressions (exit e at either end,
    enter f at either end), plus the direct route |x - y| when e = f. That
    minimum is affine on each cell of the arrangement of lines where two
    expressions agree, so its maximum over the box [0, len e] x [0, len f]
    is attained at a crossing point of that arrangement. Those crossing points
    are evaluated exactly; ``resolution`` adds a uniform grid of
    (resolution + 1)^2 sample points per edge pair as a fallback.
    """
    if resolution < 1:
        raise DomainError("resolution must be at least 1")
    if not g.is_connected():
        raise DomainError("diameter requires a connected graph")
    m = len(g.edges)
    if m == 0:
        v = g.vertices[0] if g.vertices else None
        return DiameterResult(0.0, (None, v), (None, v))
    D = distance_matrix(g)
    best = (-1.0, None, None)
    n_exact = 0
    for same in (False, True):
        if same:
            pairs = [(i, i) for i in range(m)]
        else:
            pairs = list(itertools.combinations(range(m), 2))
        if not pairs:
            continue
        a, b, cx, cy, c0 = _pair_arrays(g, D, pairs)
        x, y, inside = _crossing_candidates(a, b, cx, cy, c0, same)
        d = np.where(inside, _evaluate(cx, cy, c0, x, y, same), -np.inf)
        n_exact += int(inside.sum())
        gx, gy = _grid_candidates(a, b, resolution)
        gd = _evaluate(cx, cy, c0, gx, gy, same)
        for xs, ys, ds in ((x, y, d), (gx, gy, gd)):
            flat = int(np.argmax(ds))
            pi_, ki = np.unravel_index(flat, ds.shape)
            if ds[pi_, ki] > best[0]:
                i, j = pairs[pi_]
                best = (float(ds[pi_, ki]), (i, float(xs[pi_, ki])), (j, float(ys[pi_, ki])))
    return DiameterResult(best[0], best[1], best[2], n_exact)


def sampled_diameter(g: MetricGraph, resolution: int) -> float:
    """Diameter over the points that split every edge into ``resolution`` equal parts.

    Independent test oracle: the subdivided graph is handed to scipy's
    Dijkstra. Doubling ``resolution`` refines the sample set, so the value is
    non-decreasing and lies within ``max_edge_length / resolution`` of the
    true diameter.
    """
    if resolution < 1:
        raise DomainError("resolution must be at least 1")
    n = len(g)
    weights = {}
    next_id = n

    def put(i, j, w):
        if i == j:
            return
        key = (min(i, j), max(i, j))
        if w < weights.get(key, math.inf):
            weights[key] = w

    for e in g.edges:
        step = e.length / resolution
        prev = g.index(e.u)
        for _ in range(resolution - 1):
            put(prev, next_id, step)
            prev = next_id
            next_id += 1
        put(prev, g.index(e.v), step)
    if weights:
        rows, cols = zip(*weights.keys())
        data = list(weights.values())
    else:
        rows, cols, data = (), (), ()
    mat = coo_matrix((data, (rows, cols)), shape=(next_id, next_id)).tocsr()
    dist = _csgraph_shortest_path(mat, method="D", directed=False)
    if np.isinf(dist).any():
        raise DomainError("diameter requires a connected graph")
    return float(dist.max())


def graph_to_dict(g: MetricGraph) -> dict:
    return {
        "vertices": [str(v) for v in g.vertices],
        "edges": [
            {"u": str(e.u), "v": str(e.v), "len_rad": e.length, "tag": e.tag} for e in g.edges
        ],
    }


def graph_from_dict(data: dict) -> MetricGraph:
    try:
        vertices = list(data["vertices"])
        raw = data["edges"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"graph JSON needs 'vertices' and 'edges': {exc}") from None
    edges = []
    for item in raw:
        has_deg, has_rad = "len_deg" in item, "len_rad" in item
        if has_deg == has_rad:
            raise DomainError("each edge needs exactly one of 'len_deg' or 'len_rad'")
        raw_len = item["len_deg"] if has_deg else item["len_rad"]
        if not isinstance(raw_len, (int, float)) or isinstance(raw_len, bool):
            raise DomainError(f"edge length must be a number, got {raw_len!r}")
        length = math.radians(raw_len) if has_deg else float(raw_len)
        edges.append(Edge(item["u"], item["v"], length, item.get("tag", "")))
    return MetricGraph(vertices, edges)
