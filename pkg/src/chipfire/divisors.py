"""Chip configurations and the exact engine underneath everything else:
reduced forms via the burning algorithm, Baker-Norine rank, linear equivalence,
and enumeration of the degree-0 class group.

All arithmetic is plain Python integers; reduced divisors at a fixed base
vertex double as canonical class representatives throughout the library.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import AlgorithmError, EnumerationCapError, InvalidGraphError
from .graphs import Graph

DEFAULT_CLASS_CAP = 10 ** 7
_MAX_FIRING_ROUNDS = 10 ** 6


class Divisor:
    """Integer chip assignment on vertex ids.  Zero entries are not stored."""

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        data: dict[str, int] = {}
        for v, c in items:
            c = int(c)
            if c:
                data[v] = data.get(v, 0) + c
                if not data[v]:
                    del data[v]
        object.__setattr__(self, "coeffs", data)
        object.__setattr__(self, "degree", sum(data.values()))

    def __setattr__(self, *a):
        raise AttributeError("Divisor is immutable")

    @staticmethod
    def at(v: str, count: int = 1) -> "Divisor":
        return Divisor({v: count})

    def __getitem__(self, v: str) -> int:
        return self.coeffs.get(v, 0)

    def __add__(self, other: "Divisor") -> "Divisor":
        data = dict(self.coeffs)
        for v, c in other.coeffs.items():
            data[v] = data.get(v, 0) + c
        return Divisor(data)

    def __sub__(self, other: "Divisor") -> "Divisor":
        data = dict(self.coeffs)
        for v, c in other.coeffs.items():
            data[v] = data.get(v, 0) - c
        return Divisor(data)

    def __neg__(self) -> "Divisor":
        return Divisor({v: -c for v, c in self.coeffs.items()})

    def __mul__(self, n: int) -> "Divisor":
        return Divisor({v: n * c for v, c in self.coeffs.items()})

    __rmul__ = __mul__

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.coeffs.values())

    def support(self) -> list[str]:
        return sorted(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "Divisor(0)"
        body = " ".join(f"{v}:{c}" for v, c in self.items())
        return f"Divisor({body})"


@dataclass(frozen=True)
class ReducedForm:
    """A base-reduced divisor together with a replayable set-firing certificate.

    Each certificate entry is (vertex ids fired simultaneously, repeat count);
    applying them in order to the original input reproduces ``divisor`` exactly.
    """

    divisor: Divisor
    base: str
    firing_certificate: tuple[tuple[tuple[str, ...], int], ...]

    def replay(self, graph: Graph, start: Divisor) -> Divisor:
        vec = _vec(graph, start)
        for names, count in self.firing_certificate:
            _fire_set(graph, vec, [graph.index(v) for v in names], count)
        return _from_vec(graph, vec)


def class_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("CHIPFIRE_CLASS_CAP")
    return int(env) if env else DEFAULT_CLASS_CAP


def _vec(g: Graph, d: Divisor) -> list[int]:
    vec = [0] * len(g.vertices)
    for v, c in d.coeffs.items():
        vec[g.index(v)] = c
    return vec


def _from_vec(g: Graph, vec: Iterable[int]) -> Divisor:
    return Divisor({g.vertices[i]: c for i, c in enumerate(vec) if c})


def _fire_set(g: Graph, vec: list[int], members: Iterable[int], count: int = 1) -> None:
    inside = set(members)
    for v in inside:
        for w, m in g._adj[v]:
            if w not in inside:
                vec[v] -= count * m
                vec[w] += count * m


def _bfs_layers(g: Graph, q: int) -> list[list[int]]:
    dist = {q: 0}
    layers = [[q]]
    frontier = [q]
    while frontier:
        nxt = []
        for v in frontier:
            for w, _ in g._adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        if nxt:
            layers.append(nxt)
        frontier = nxt
    return layers


def _reduce_vec(g: Graph, vec: list[int], q: int, record: bool = False):
    """Reduce vec at base q in place; returns the certificate list (or None).

    Stage 1 clears debt off q layer by layer from the outside in, firing the
    ball of closer vertices as often as the worst debtor needs.  Stage 2 is the
    burning algorithm: fire the maximal unburnt set until everything burns.
    """
    cert: list[tuple[tuple[str, ...], int]] | None = [] if record else None
    n = len(vec)
    layers = _bfs_layers(g, q)

    for i in range(len(layers) - 1, 0, -1):
        closer = set()
        for lay in layers[:i]:
            closer.update(lay)
        need = 0
        for v in layers[i]:
            if vec[v] < 0:
                inflow = sum(m for w, m in g._adj[v] if w in closer)
                if inflow <= 0:
                    raise AlgorithmError("BFS layer without inflow")
                need = max(need, (-vec[v] + inflow - 1) // inflow)
        if need:
            _fire_set(g, vec, closer, need)
            if record:
                cert.append((tuple(sorted(g.vertices[v] for v in closer)), need))

    for _ in range(_MAX_FIRING_ROUNDS):
        burnt = [False] * n
        burnt[q] = True
        incoming = [0] * n
        queue = [q]
        while queue:
            v = queue.pop()
            for w, m in g._adj[v]:
                if burnt[w]:
                    continue
                incoming[w] += m
                if incoming[w] > vec[w]:
                    burnt[w] = True
                    queue.append(w)
        unburnt = [v for v in range(n) if not burnt[v]]
        if not unburnt:
            return cert
        count = min(vec[v] // incoming[v] for v in unburnt if incoming[v] > 0)
        if count < 1:
            raise AlgorithmError("burning found an unfireable set")
        for v in unburnt:
            if incoming[v]:
                vec[v] -= count * incoming[v]
                for w, m in g._adj[v]:
                    if burnt[w]:
                        vec[w] += count * m
        if record:
            cert.append((tuple(sorted(g.vertices[v] for v in unburnt)), count))
    raise AlgorithmError("reduction did not terminate; this is a bug")


def _reduced_key(g: Graph, vec: list[int], q: int) -> tuple[int, ...]:
    work = list(vec)
    _reduce_vec(g, work, q)
    return tuple(work)


def dhar_reduce(g: Graph, d: Divisor, q: str) -> ReducedForm:
    """Unique q-reduced divisor linearly equivalent to d, with certificate."""
    qi = g.index(g.resolve(q))
    vec = _vec(g, d)
    cert = _reduce_vec(g, vec, qi, record=True)
    return ReducedForm(_from_vec(g, vec), g.vertices[qi], tuple(cert))


def is_reduced(g: Graph, d: Divisor, q: str) -> bool:
    """True iff d is already q-reduced: nonnegative off q and nothing to fire."""
    qi = g.index(g.resolve(q))
    vec = _vec(g, d)
    if any(c < 0 for i, c in enumerate(vec) if i != qi):
        return False
    return tuple(vec) == _reduced_key(g, vec, qi)


def canonical_divisor(g: Graph) -> Divisor:
    """valence - 2 at every vertex; degree 2g - 2."""
    return Divisor({v: g._val[i] - 2 for i, v in enumerate(g.vertices)})


def _resolve_rds(g: Graph, rank_determining_set):
    if rank_determining_set is None:
        if g.banana is not None:
            hubs = (g.index(g.banana.left), g.index(g.banana.right))
            return hubs, ("rds",) + hubs
        return tuple(range(len(g.vertices))), ("all",)
    if rank_determining_set == "full":
        return tuple(range(len(g.vertices))), ("all",)
    idx = tuple(sorted(g.index(g.resolve(v)) for v in rank_determining_set))
    if not idx:
        raise InvalidGraphError("rank determining set cannot be empty")
    return idx, ("rds",) + idx


def rank(g: Graph, d: Divisor, *, rank_determining_set=None) -> int:
    """Baker-Norine rank by descent over a rank-determining set.

    r(D) >= 0 iff the reduced form has a nonnegative base coefficient, and then
    r(D) = 1 + min over A of r(D - v).  A defaults to the two hubs on banana
    graphs and to the full vertex set otherwise; pass "full" to force the
    latter.
    """
    if d.degree < 0:
        return -1
    rds, mode = _resolve_rds(g, rank_determining_set)
    cache = g._rank_caches.setdefault(mode, {})
    genus = g.genus
    q = 0

    def rec(key: tuple[int, ...]) -> int:
        val = cache.get(key)
        if val is not None:
            return val
        if key[q] < 0:
            val = -1
        else:
            deg = sum(key)
            if deg > 2 * genus - 2:
                val = deg - genus
            else:
                best = None
                for v in rds:
                    child = list(key)
                    child[v] -= 1
                    sub = rec(_reduced_key(g, child, q))
                    if best is None or sub < best:
                        best = sub
                    if best == -1:
                        break
                val = 1 + best
        cache[key] = val
        return val

    return rec(_reduced_key(g, _vec(g, d), q))


def support_complex(g: Graph, d: Divisor) -> set[str]:
    """Vertices the class can send a chip to while staying effective."""
    return {v for v in g.vertices if rank(g, d - Divisor.at(v)) >= 0}


def linear_equivalent(g: Graph, d1: Divisor, d2: Divisor) -> bool:
    """Same degree and identical reduced forms at the global base vertex."""
    if d1.degree != d2.degree:
        return False
    return _reduced_key(g, _vec(g, d1), 0) == _reduced_key(g, _vec(g, d2), 0)


def class_key(g: Graph, d: Divisor) -> tuple[int, ...]:
    """Canonical per-class key: the base-reduced coefficient vector."""
    return _reduced_key(g, _vec(g, d), 0)


def enumerate_jacobian(g: Graph, q: str | None = None, cap: int | None = None) -> list[Divisor]:
    """All degree-0 q-reduced divisors, one per class of the Jacobian.

    Breadth-first closure over the single-chip generators [w - q]; reduced
    vectors are the dedup keys, so no group-structure machinery is needed.
    """
    from .graphs import jacobian_order

    limit = class_cap(cap)
    order = jacobian_order(g)
    if order > limit:
        raise EnumerationCapError(
            f"{order} classes exceeds the cap of {limit} (set CHIPFIRE_CLASS_CAP to raise)")
    qi = g.index(g.resolve(q)) if q is not None else 0
    n = len(g.vertices)
    gens = []
    for w in range(n):
        if w != qi:
            vec = [0] * n
            vec[w] = 1
            vec[qi] -= 1
            gens.append(vec)
    start = tuple([0] * n)
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop()
        for gen in gens:
            child = [a + b for a, b in zip(cur, gen)]
            _reduce_vec(g, child, qi)
            key = tuple(child)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    if len(seen) != order:
        raise AlgorithmError(
            f"class enumeration found {len(seen)} classes, expected {order}")
    return [_from_vec(g, key) for key in sorted(seen)]
