"""Choosing which quadratic terms to keep tridiagonal.

The support-graph preprocessing picks a maximum-weight set of edges that
forms vertex-disjoint paths; those edges become the retained tridiagonal
couplings and everything else is dualized. Pipeline: solve the degree-<=2
maximum-weight subgraph exactly (min-cost flow on bipartite graphs, a
gadget reduction to matching otherwise), break each surviving cycle at its
lightest edge, and concatenate the paths into a variable ordering.

Breaking a cycle of length L >= 3 loses at most 1/3 (bipartite: L >= 4,
at most 1/4) of its weight, and the degree-<=2 optimum dominates the best
path cover, so the result carries >= 2/3 (bipartite: >= 3/4) of the
optimal path-cover weight.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import HasCycle, NotBipartite, TooLarge
from .instance import SupportGraph

MAX_BRUTE_EDGES = 20


@dataclass(frozen=True, eq=False)
class CoverSolution:
    """Chosen edges (i, j, w) plus their decomposition into components.

    Every node has degree <= 2. A length-two cycle is represented by the
    same edge appearing twice, and its weight counts twice.
    """

    edges: tuple[tuple[int, int, float], ...]
    components: tuple[tuple[str, tuple[int, ...]], ...]
    weight: float


@dataclass(frozen=True, eq=False)
class Ordering:
    """Variable permutation with the retained/relaxed edge split.

    pi[t] is the original variable at position t; retained edges are
    consecutive under pi.
    """

    pi: np.ndarray
    retained: tuple[tuple[int, int], ...]
    relaxed: tuple[tuple[int, int], ...]


def _bipartition(g: SupportGraph):
    """2-coloring by BFS; None when some component has an odd cycle."""
    adj: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, j, _ in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    color = np.full(g.n, -1, dtype=np.int64)
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            u = queue.pop(0)
            for v in adj[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    return color


class _MinCostFlow:
    """Successive-shortest-paths min-cost flow with float costs.

    Arc insertion order must be topological (its one-pass relaxation
    seeds the node potentials); augmentation continues while the cheapest
    source-sink path has negative cost, which yields the minimum-cost
    flow over all flow values.
    """

    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[float] = []

    def add(self, u: int, v: int, cap: int, cost: float) -> int:
        idx = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.cost += [cost, -cost]
        self.head[u].append(idx)
        self.head[v].append(idx + 1)
        return idx

    def run(self, src: int, sink: int) -> None:
        inf = float("inf")
        pot = [inf] * self.n
        pot[src] = 0.0
        for arc in range(0, len(self.to), 2):
            u, v = self.to[arc + 1], self.to[arc]
            if self.cap[arc] > 0 and pot[u] + self.cost[arc] < pot[v]:
                pot[v] = pot[u] + self.cost[arc]
        while True:
            dist = [inf] * self.n
            dist[src] = 0.0
            prevarc = [-1] * self.n
            heap = [(0.0, src)]
            while heap:
                du, u = heapq.heappop(heap)
                if du > dist[u]:
                    continue
                for arc in self.head[u]:
                    if self.cap[arc] <= 0:
                        continue
                    v = self.to[arc]
                    nd = du + self.cost[arc] + pot[u] - pot[v]
                    if nd < dist[v] - 1e-15:
                        dist[v] = nd
                        prevarc[v] = arc
                        heapq.heappush(heap, (nd, v))
            if dist[sink] == inf or dist[sink] + pot[sink] - pot[src] >= -1e-12:
                return
            for v in range(self.n):
                if dist[v] < inf:
                    pot[v] += dist[v]
            bottleneck = min(
                self._walk(src, sink, prevarc, lambda arc: self.cap[arc])
            )
            for arc in self._walk(src, sink, prevarc, lambda arc: arc):
                self.cap[arc] -= bottleneck
                self.cap[arc ^ 1] += bottleneck

    def _walk(self, src, sink, prevarc, fn):
        out = []
        v = sink
        while v != src:
            arc = prevarc[v]
            out.append(fn(arc))
            v = self.to[arc ^ 1]
        return out


def _decode_simple(g: SupportGraph, chosen: list[tuple[int, int, float]]):
    """Split a degree-<=2 simple subgraph into path/cycle components."""
    adj: dict[int, list[int]] = {}
    for i, j, _ in chosen:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    for v in adj:
        adj[v].sort()
    seen: set[int] = set()
    comps = []

    def walk(start: int) -> list[int]:
        nodes = [start]
        seen.add(start)
        cur = start
        while True:
            nxt = [v for v in adj[cur] if v not in seen]
            if not nxt:
                return nodes
            cur = nxt[0]
            seen.add(cur)
            nodes.append(cur)

    for v in sorted(adj):
        if v not in seen and len(adj[v]) == 1:
            comps.append(("path", tuple(walk(v))))
    for v in sorted(adj):
        if v not in seen:
            comps.append(("cycle", tuple(walk(v))))
    return tuple(comps)


def _cover_from_chosen(g: SupportGraph, chosen: list[tuple[int, int, float]]):
    return CoverSolution(
        edges=tuple(sorted(chosen)),
        components=_decode_simple(g, chosen),
        weight=float(sum(w for _, _, w in chosen)),
    )


def b2_subgraph_bipartite(g: SupportGraph) -> CoverSolution:
    """Exact maximum-weight degree-<=2 subgraph of a bipartite graph.

    Min-cost flow on the degree-bounded subgraph network (source -> left
    side with capacity 2, one unit arc of cost -w per edge, right side ->
    sink with capacity 2); the constraint matrix is totally unimodular,
    so the flow optimum is integral and exact.
    """
    color = _bipartition(g)
    if color is None:
        raise NotBipartite("support graph has an odd cycle")
    left = [v for v in range(g.n) if color[v] == 0]
    lpos = {v: 2 + k for k, v in enumerate(left)}
    right = [v for v in range(g.n) if color[v] == 1]
    rpos = {v: 2 + len(left) + k for k, v in enumerate(right)}
    net = _MinCostFlow(2 + g.n)
    for v in left:
        net.add(0, lpos[v], 2, 0.0)
    arcs = []
    for i, j, w in g.edges:
        u, v = (i, j) if color[i] == 0 else (j, i)
        arcs.append(net.add(lpos[u], rpos[v], 1, -w))
    for v in right:
        net.add(rpos[v], 1, 2, 0.0)
    net.run(0, 1)
    chosen = [e for e, arc in zip(g.edges, arcs) if net.cap[arc] == 0]
    return _cover_from_chosen(g, chosen)


def b2_subgraph_general(g: SupportGraph) -> CoverSolution:
    """Exact maximum-weight degree-<=2 subgraph of any graph.

    Each edge (u, v, w) becomes a two-node gadget a-b: matching a and b to
    vertex copies selects the edge (contributing 2w), matching a-b skips
    it (contributing w), so a maximum-weight matching exceeds the constant
    sum(w) by exactly the best degree-<=2 subgraph weight.
    """
    gm = nx.Graph()
    for v in range(g.n):
        gm.add_node(("v", v, 0))
        gm.add_node(("v", v, 1))
    for e, (i, j, w) in enumerate(g.edges):
        for copy in range(2):
            gm.add_edge(("v", i, copy), ("a", e), weight=w)
            gm.add_edge(("b", e), ("v", j, copy), weight=w)
        gm.add_edge(("a", e), ("b", e), weight=w)
    matching = nx.max_weight_matching(gm)
    hit: dict[tuple, int] = {}
    for u, v in matching:
        for node in (u, v):
            if node[0] in ("a", "b"):
                other = v if node is u else u
                if other[0] == "v":
                    hit[node] = hit.get(node, 0) + 1
    chosen = [
        (i, j, w)
        for e, (i, j, w) in enumerate(g.edges)
        if hit.get(("a", e)) and hit.get(("b", e))
    ]
    return _cover_from_chosen(g, chosen)


def cycle_cover_general(g: SupportGraph) -> CoverSolution:
    """Maximum-weight cycle cover via node-splitting assignment.

    Every node gets a successor slot; an assignment i -> j along an edge
    keeps that edge as an arc. Antiparallel arc pairs are legal and decode
    as a length-two cycle whose edge weight counts twice. Self and
    non-edge assignments cost nothing and decode as "no successor".
    """
    if not g.edges:
        return CoverSolution(edges=(), components=(), weight=0.0)
    wmat = {}
    cost = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        cost[i, j] = cost[j, i] = -w
        wmat[(i, j)] = wmat[(j, i)] = w
    rows, cols = linear_sum_assignment(cost)
    succ = {}
    pred = {}
    for u, v in zip(rows, cols):
        if u != v and (int(u), int(v)) in wmat:
            succ[int(u)] = int(v)
            pred[int(v)] = int(u)
    edges: list[tuple[int, int, float]] = []
    comps = []
    seen: set[int] = set()

    def follow(start: int) -> list[int]:
        nodes = [start]
        seen.add(start)
        cur = start
        while cur in succ and succ[cur] not in seen:
            cur = succ[cur]
            seen.add(cur)
            nodes.append(cur)
        return nodes

    for v in sorted(succ):
        if v not in seen and v not in pred:
            comps.append(("path", tuple(follow(v))))
    for v in sorted(succ):
        if v not in seen:
            comps.append(("cycle", tuple(follow(v))))
    weight = 0.0
    for kind, nodes in comps:
        pairs = list(zip(nodes, nodes[1:]))
        if kind == "cycle":
            pairs.append((nodes[-1], nodes[0]))
        for u, v in pairs:
            w = wmat[(u, v)]
            edges.append((min(u, v), max(u, v), w))
            weight += w
    return CoverSolution(edges=tuple(sorted(edges)), components=tuple(comps), weight=weight)


def break_cycles(cs: CoverSolution) -> CoverSolution:
    """Drop the lightest edge of every cycle (ties: smallest (i, j));
    a length-two cycle collapses to its single edge."""
    edges = list(cs.edges)
    comps = []
    for kind, nodes in cs.components:
        if kind == "path":
            comps.append((kind, nodes))
            continue
        pairs = list(zip(nodes, nodes[1:])) + [(nodes[-1], nodes[0])]
        if len(nodes) == 2:
            pairs = pairs[:1]  # the duplicated edge, listed once per copy
        lookup = {}
        for u, v in pairs:
            key = (min(u, v), max(u, v))
            for e in edges:
                if (e[0], e[1]) == key:
                    lookup[key] = e[2]
                    break
        drop = min(pairs, key=lambda p: (lookup[(min(p), max(p))], min(p), max(p)))
        k = pairs.index(drop)
        path_nodes = nodes[k + 1 :] + nodes[: k + 1]
        key = (min(drop), max(drop))
        edges.remove((key[0], key[1], lookup[key]))
        comps.append(("path", tuple(path_nodes)))
    return CoverSolution(
        edges=tuple(sorted(edges)),
        components=tuple(comps),
        weight=float(sum(w for _, _, w in edges)),
    )


def make_ordering(cs: CoverSolution, g: SupportGraph) -> Ordering:
    """Concatenate path components (heaviest first) into a permutation.

    Every cover edge joins consecutive positions; isolated nodes go last
    in ascending order.
    """
    wmap = {(i, j): w for i, j, w in g.edges}
    ranked = []
    for kind, nodes in cs.components:
        if kind != "path":
            raise HasCycle("cover still contains a cycle; break cycles first")
        if nodes[-1] < nodes[0]:
            nodes = tuple(reversed(nodes))
        weight = sum(wmap[(min(u, v), max(u, v))] for u, v in zip(nodes, nodes[1:]))
        ranked.append((-weight, nodes))
    ranked.sort()
    pi: list[int] = []
    for _, nodes in ranked:
        pi.extend(nodes)
    touched = set(pi)
    pi.extend(v for v in range(g.n) if v not in touched)
    retained = sorted(
        (min(u, v), max(u, v)) for _, nodes in ranked for u, v in zip(nodes, nodes[1:])
    )
    relaxed = sorted((i, j) for i, j, _ in g.edges if (i, j) not in set(retained))
    return Ordering(
        pi=np.array(pi, dtype=np.int64),
        retained=tuple(retained),
        relaxed=tuple(relaxed),
    )


def path_cover(g: SupportGraph) -> Ordering:
    """Full pipeline: exact degree-<=2 subgraph, cycle breaking, ordering."""
    if _bipartition(g) is not None:
        cs = b2_subgraph_bipartite(g)
    else:
        cs = b2_subgraph_general(g)
    return make_ordering(break_cycles(cs), g)


def brute_force_pstar(g: SupportGraph) -> float:
    """Exhaustive maximum-weight vertex-disjoint path cover (small |E|)."""
    m = len(g.edges)
    if m > MAX_BRUTE_EDGES:
        raise TooLarge(f"|E| = {m} exceeds the exhaustive cap {MAX_BRUTE_EDGES}")
    if m == 0:
        return 0.0
    masks = np.arange(1 << m, dtype=np.uint32)
    ok = np.ones(masks.shape, dtype=bool)
    for v in range(g.n):
        inc = 0
        for e, (i, j, _) in enumerate(g.edges):
            if v in (i, j):
                inc |= 1 << e
        if inc:
            ok &= np.bitwise_count(masks & np.uint32(inc)) <= 2
    best = 0.0
    weights = [w for _, _, w in g.edges]
    for mask in np.flatnonzero(ok):
        mask = int(mask)
        parent: dict[int, int] = {}

        def find(v: int) -> int:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        acyclic = True
        total = 0.0
        for e in range(m):
            if not mask & (1 << e):
                continue
            i, j, w = g.edges[e]
            parent.setdefault(i, i)
            parent.setdefault(j, j)
            ri, rj = find(i), find(j)
            if ri == rj:
                acyclic = False
                break
            parent[ri] = rj
            total += w
        if acyclic and total > best:
            best = total
    return best
