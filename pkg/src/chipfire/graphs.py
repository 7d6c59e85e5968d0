"""Finite connected loopless multigraphs, with the banana family as a first-class
citizen.

Vertex ids are strings.  Banana graphs (two hubs joined by parallel strands) use
the canonical names ``s<strand>.<position>``; the two hubs are ``s0.0`` and
``s0.<n0>``, with accepted aliases ``L`` and ``R``.  Every other constructor
keeps whatever names the caller supplies.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidGraphError, WrongShapeError


@dataclass(frozen=True)
class BananaSpec:
    """Strand lengths of a banana graph, in the order the strands were built."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        if len(self.lengths) < 2:
            raise InvalidGraphError("a banana graph needs at least two strands")
        if any(n < 1 for n in self.lengths):
            raise InvalidGraphError("strand lengths must be positive")

    @property
    def genus(self) -> int:
        return len(self.lengths) - 1

    @property
    def left(self) -> str:
        return "s0.0"

    @property
    def right(self) -> str:
        return f"s0.{self.lengths[0]}"

    def vertex_id(self, alpha: int, i: int) -> str:
        """Canonical id of the vertex at distance i along strand alpha."""
        n = self.lengths[alpha]
        if not 0 <= i <= n:
            raise InvalidGraphError(f"position {i} outside strand {alpha} (length {n})")
        if i == 0:
            return self.left
        if i == n:
            return self.right
        return f"s{alpha}.{i}"

    def resolve(self, name: str) -> str:
        """Normalize a user-facing vertex name (L/R aliases, hub synonyms)."""
        if name == "L":
            return self.left
        if name == "R":
            return self.right
        alpha, i = self._parse(name)
        return self.vertex_id(alpha, i)

    def position(self, vid: str) -> tuple[int, int]:
        """Inverse of vertex_id: (strand, offset), hubs reported on strand 0."""
        alpha, i = self._parse(self.resolve(vid))
        return alpha, i

    def _parse(self, name: str) -> tuple[int, int]:
        if not name.startswith("s") or "." not in name:
            raise WrongShapeError(f"not a banana vertex name: {name!r}")
        head, _, tail = name[1:].partition(".")
        try:
            alpha, i = int(head), int(tail)
        except ValueError:
            raise WrongShapeError(f"not a banana vertex name: {name!r}") from None
        if not 0 <= alpha < len(self.lengths):
            raise WrongShapeError(f"no strand {alpha} in {self}")
        return alpha, i

    def vertex_ids(self) -> list[str]:
        out = [self.left, self.right]
        for alpha, n in enumerate(self.lengths):
            out.extend(f"s{alpha}.{i}" for i in range(1, n))
        return out

    def strands_through(self, vid: str) -> list[tuple[int, int]]:
        """All (strand, offset) incarnations of a vertex; hubs lie on every strand."""
        vid = self.resolve(vid)
        if vid == self.left:
            return [(alpha, 0) for alpha in range(len(self.lengths))]
        if vid == self.right:
            return [(alpha, n) for alpha, n in enumerate(self.lengths)]
        return [self.position(vid)]


def _canon_edge(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class Graph:
    """Immutable connected loopless multigraph.

    Edges are stored as a multiplicity counter on unordered vertex pairs, so
    set-firing moves can weight chip flow by the number of parallel edges.
    """

    __slots__ = (
        "vertices", "edges", "banana", "_vindex", "_adj", "_val",
        "_rank_caches", "_jac_order",
    )

    def __init__(self, vertices: Iterable[str],
                 edges: Iterable[tuple[str, str]] | Mapping[tuple[str, str], int],
                 banana: BananaSpec | None = None):
        vlist = sorted(set(vertices))
        if not vlist:
            raise InvalidGraphError("graph needs at least one vertex")
        vset = set(vlist)
        counter: Counter = Counter()
        if isinstance(edges, Mapping):
            items = edges.items()
        else:
            items = ((e, 1) for e in edges)
        for (a, b), m in items:
            if a not in vset or b not in vset:
                raise InvalidGraphError(f"edge endpoint not a vertex: {(a, b)}")
            if a == b:
                raise InvalidGraphError(f"self-loop at {a!r} not allowed")
            if m < 1:
                raise InvalidGraphError("edge multiplicity must be positive")
            counter[_canon_edge(a, b)] += m

        object.__setattr__(self, "vertices", tuple(vlist))
        object.__setattr__(self, "edges", dict(sorted(counter.items())))
        object.__setattr__(self, "banana", banana)
        object.__setattr__(self, "_vindex", {v: i for i, v in enumerate(vlist)})
        adj: list[list[tuple[int, int]]] = [[] for _ in vlist]
        for (a, b), m in self.edges.items():
            ia, ib = self._vindex[a], self._vindex[b]
            adj[ia].append((ib, m))
            adj[ib].append((ia, m))
        object.__setattr__(self, "_adj", [tuple(row) for row in adj])
        object.__setattr__(self, "_val", tuple(sum(m for _, m in row) for row in adj))
        object.__setattr__(self, "_rank_caches", {})
        object.__setattr__(self, "_jac_order", None)
        self._check_connected()

    def __setattr__(self, *args):
        raise AttributeError("Graph is immutable")

    def _check_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w, _ in self._adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            raise InvalidGraphError("graph is not connected")

    @property
    def num_edges(self) -> int:
        return sum(self.edges.values())

    @property
    def genus(self) -> int:
        return self.num_edges - len(self.vertices) + 1

    @property
    def base_vertex(self) -> str:
        """Global base for reduced forms: the lexicographically least vertex id."""
        return self.vertices[0]

    def valence(self, v: str) -> int:
        return self._val[self._vindex[v]]

    def multiplicity(self, a: str, b: str) -> int:
        return self.edges.get(_canon_edge(a, b), 0)

    def index(self, v: str) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise InvalidGraphError(f"unknown vertex {v!r}") from None

    def resolve(self, name: str) -> str:
        """Map aliases (banana L/R, hub synonyms) onto a canonical vertex id."""
        if name in self._vindex:
            return name
        if self.banana is not None:
            try:
                vid = self.banana.resolve(name)
            except WrongShapeError:
                vid = None
            if vid in self._vindex:
                return vid
        raise InvalidGraphError(f"unknown vertex {name!r}")

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and self.edges == other.edges)

    def __repr__(self):
        return f"Graph({len(self.vertices)} vertices, {self.num_edges} edges, genus {self.genus})"


@dataclass(frozen=True)
class MarkedGraph:
    """A graph with an ordered pair of distinguished vertices.

    u == v is legal but degenerate; operations that need distinct marks say so.
    """

    graph: Graph
    u: str
    v: str

    def __post_init__(self):
        object.__setattr__(self, "u", self.graph.resolve(self.u))
        object.__setattr__(self, "v", self.graph.resolve(self.v))

    @property
    def degenerate(self) -> bool:
        return self.u == self.v

    def swapped(self) -> "MarkedGraph":
        return MarkedGraph(self.graph, self.v, self.u)


def build_banana(lengths: Iterable[int]) -> Graph:
    """Two hub vertices joined by one path per entry of lengths."""
    spec = BananaSpec(tuple(int(n) for n in lengths))
    edges: Counter = Counter()
    for alpha, n in enumerate(spec.lengths):
        for i in range(n):
            a = spec.vertex_id(alpha, i)
            b = spec.vertex_id(alpha, i + 1)
            edges[_canon_edge(a, b)] += 1
    return Graph(spec.vertex_ids(), edges, banana=spec)


def build_theta(a: int, b: int, c: int) -> Graph:
    return build_banana([a, b, c])


def build_cycle(a: int, b: int) -> MarkedGraph:
    """Cycle of length a+b, marked at the two vertices the arcs join."""
    g = build_banana([a, b])
    return MarkedGraph(g, "L", "R")


def build_general(vertices: Iterable[str], edges) -> Graph:
    """Validating constructor for arbitrary graphs."""
    return Graph(vertices, edges)


def vertex_glue(g1: MarkedGraph, g2: MarkedGraph) -> MarkedGraph:
    """Disjoint union with g1's out-mark identified to g2's in-mark.

    The result is marked (u1, v2) and its genus is the sum of the parts.
    """
    return chain_glue([g1, g2])


def chain_glue(components: list[MarkedGraph]) -> MarkedGraph:
    """Iterated vertex gluing of a sequence of twice-marked graphs.

    Component i's vertices are renamed "c<i>.<name>"; each glued pair keeps the
    left-hand name so witnesses stay traceable.
    """
    return chain_glue_maps(components)[0]


def chain_glue_maps(components: list[MarkedGraph]):
    """chain_glue plus the per-component vertex rename maps."""
    if not components:
        raise InvalidGraphError("cannot glue an empty chain")
    vertices: list[str] = []
    edges: Counter = Counter()
    maps: list[dict[str, str]] = []
    prev_out = None
    first_in = None
    for i, comp in enumerate(components):
        prefix = f"c{i}."
        rename = {v: prefix + v for v in comp.graph.vertices}
        if prev_out is not None:
            rename[comp.u] = prev_out
        maps.append(rename)
        for v in comp.graph.vertices:
            vertices.append(rename[v])
        for (a, b), m in comp.graph.edges.items():
            edges[_canon_edge(rename[a], rename[b])] += m
        if i == 0:
            first_in = rename[comp.u]
        prev_out = rename[comp.v]
    return MarkedGraph(Graph(vertices, edges), first_in, prev_out), maps


def _bridges(g: Graph) -> list[tuple[str, str]]:
    """All bridges; a parallel pair is never a bridge."""
    out = []
    for (a, b), m in g.edges.items():
        if m > 1:
            continue
        # connectivity of g minus this edge, from a; multiplicity 1 means the
        # (ia, ib) hop can be skipped wholesale
        ia, ib = g.index(a), g.index(b)
        seen = {ia}
        stack = [ia]
        while stack:
            v = stack.pop()
            for w, _ in g._adj[v]:
                if w in seen or (v, w) in ((ia, ib), (ib, ia)):
                    continue
                seen.add(w)
                stack.append(w)
        if ib not in seen:
            out.append((a, b))
    return out


def contract_bridges(g: Graph, marks: Iterable[str] | None = None):
    """Contract every bridge, returning (bridgeless graph, vertex retraction map).

    Rank computations are unaffected by the retraction, so marked vertices can
    be pushed through the returned map.  Never applied implicitly by other ops.
    """
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    cur = g
    while True:
        bridges = _bridges(cur)
        if not bridges:
            break
        merged = {v: v for v in cur.vertices}

        def cur_find(v):
            while merged[v] != v:
                merged[v] = merged[merged[v]]
                v = merged[v]
            return v

        for a, b in bridges:
            ra, rb = cur_find(a), cur_find(b)
            if ra == rb:
                continue
            keep, drop = (ra, rb) if ra <= rb else (rb, ra)
            merged[drop] = keep
        new_edges: Counter = Counter()
        for (a, b), m in cur.edges.items():
            ra, rb = cur_find(a), cur_find(b)
            if ra == rb:
                continue  # the contracted bridge itself
            new_edges[_canon_edge(ra, rb)] += m
        new_vertices = {cur_find(v) for v in cur.vertices}
        for v in g.vertices:
            r = find(v)
            if r in merged:
                parent[r] = cur_find(r)
        cur = Graph(new_vertices, new_edges)

    vertex_map = {v: find(v) for v in g.vertices}
    if marks is not None:
        missing = [m for m in marks if m not in vertex_map]
        if missing:
            raise InvalidGraphError(f"unknown marked vertices: {missing}")
    return cur, vertex_map


def _det_bareiss(m: list[list[int]]) -> int:
    """Fraction-free exact determinant of an integer matrix (destroys m)."""
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def jacobian_order(g: Graph) -> int:
    """Number of spanning trees = order of the degree-0 class group.

    Computed as the determinant of the reduced Laplacian by exact integer
    elimination; no floating point anywhere.
    """
    if g._jac_order is not None:
        return g._jac_order
    n = len(g.vertices)
    if n == 1:
        order = 1
    else:
        lap = [[0] * (n - 1) for _ in range(n - 1)]
        for i in range(1, n):
            lap[i - 1][i - 1] = g._val[i]
            for j, m in g._adj[i]:
                if j >= 1:
                    lap[i - 1][j - 1] -= m
        order = _det_bareiss(lap)
    if order <= 0:
        raise InvalidGraphError("spanning tree count must be positive on a connected graph")
    object.__setattr__(g, "_jac_order", order)
    return order
