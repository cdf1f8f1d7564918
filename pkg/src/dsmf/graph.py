"""Directed communication-topology analysis.

Vertices are sensors 1..N and an edge (j, i) means j sends to i. The
structure this package cares about: source components (strongly connected
components with no inbound edge from outside), hop-indexed predecessor
sets, predecessor-side eccentricities and the per-component information
window derived from them.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SensorGraph:
    num_sensors: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, num_sensors: int, edges):
        if num_sensors < 1:
            raise ValueError("need at least one sensor")
        clean = set()
        for j, i in edges:
            j, i = int(j), int(i)
            if not (1 <= j <= num_sensors and 1 <= i <= num_sensors):
                raise ValueError(f"edge ({j}, {i}) outside 1..{num_sensors}")
            if j != i:  # self-loops carry no hop information
                clean.add((j, i))
        object.__setattr__(self, "num_sensors", int(num_sensors))
        object.__setattr__(self, "edges", frozenset(clean))

    def predecessors_of(self, i: int) -> list[int]:
        return sorted(j for (j, t) in self.edges if t == i)

    def successors_of(self, j: int) -> list[int]:
        return sorted(t for (s, t) in self.edges if s == j)

    def induced(self, vertices) -> "SensorGraph":
        """Subgraph on ``vertices``, relabeled 1..|vertices| in id order."""
        verts = sorted(vertices)
        index = {v: r + 1 for r, v in enumerate(verts)}
        sub = [(index[j], index[i]) for (j, i) in self.edges
               if j in index and i in index]
        return SensorGraph(len(verts), sub)


@dataclass(frozen=True)
class SourceComponent:
    """A strongly connected component with no inbound outside edges."""

    index: int
    vertices: tuple[int, ...]
    rho_tilde: int
    member_eccentricities: dict[int, int] = field(compare=False)


def _tarjan_sccs(graph: SensorGraph) -> list[list[int]]:
    """Iterative Tarjan; components come out in reverse topological order."""
    n = graph.num_sensors
    succ = {v: [] for v in range(1, n + 1)}
    for j, i in graph.edges:
        succ[j].append(i)
    for v in succ:
        succ[v].sort()
    index = {}
    low = {}
    on_stack = {}
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(1, n + 1):
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack.get(w):
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
    return sccs


def predecessor_hops(graph: SensorGraph, i: int) -> dict[int, set[int]]:
    """Hop-indexed predecessor sets: vertices at shortest directed
    distance exactly rho to sensor i; rho = 0 is {i} itself."""
    if not 1 <= i <= graph.num_sensors:
        raise ValueError(f"vertex {i} outside graph")
    preds = {v: [] for v in range(1, graph.num_sensors + 1)}
    for j, t in graph.edges:
        preds[t].append(j)
    dist = {i: 0}
    frontier = [i]
    hops = {0: {i}}
    rho = 0
    while frontier:
        rho += 1
        nxt = []
        for v in frontier:
            for u in preds[v]:
                if u not in dist:
                    dist[u] = rho
                    nxt.append(u)
        if nxt:
            hops[rho] = set(nxt)
        frontier = nxt
    return hops


def eccentricity(graph: SensorGraph, i: int) -> int:
    """Longest shortest path into i, over vertices that can reach i."""
    hops = predecessor_hops(graph, i)
    return max(hops)


def m_set(graph: SensorGraph, i: int, j: int) -> set[int]:
    """Union of the predecessor hop sets of i up to distance j + 1."""
    if j < 0:
        raise ValueError("hop index must be non-negative")
    hops = predecessor_hops(graph, i)
    out: set[int] = set()
    for rho, members in hops.items():
        if rho <= j + 1:
            out |= members
    return out


def fusion_neighborhood(graph: SensorGraph, i: int) -> list[int]:
    """Self plus 1-hop predecessors, ascending (the fusion scope)."""
    return sorted(m_set(graph, i, 0))


def source_components(graph: SensorGraph) -> list[SourceComponent]:
    """Source components in ascending min-vertex order.

    Eccentricities (and the window offset derived from them) are computed
    inside each component's induced subgraph.
    """
    sccs = _tarjan_sccs(graph)
    member_of = {}
    for idx, comp in enumerate(sccs):
        for v in comp:
            member_of[v] = idx
    has_external_in = [False] * len(sccs)
    for j, i in graph.edges:
        if member_of[j] != member_of[i]:
            has_external_in[member_of[i]] = True
    sources = [comp for idx, comp in enumerate(sccs)
               if not has_external_in[idx]]
    sources.sort(key=min)
    out = []
    for t, comp in enumerate(sources, start=1):
        sub = graph.induced(comp)
        eccs = {}
        for local, v in enumerate(sorted(comp), start=1):
            eccs[v] = eccentricity(sub, local)
        rho_tilde = max(max(e, 1) for e in eccs.values())
        out.append(SourceComponent(index=t, vertices=tuple(sorted(comp)),
                                   rho_tilde=rho_tilde,
                                   member_eccentricities=eccs))
    return out


def coit_window(component: SourceComponent) -> int:
    """Rounds after which every member shares the component's
    observation information (the max of member eccentricities, floored
    at one)."""
    return component.rho_tilde


def reachable_from(graph: SensorGraph, sources) -> set[int]:
    """Forward closure of a vertex set."""
    succ = {v: [] for v in range(1, graph.num_sensors + 1)}
    for j, i in graph.edges:
        succ[j].append(i)
    seen = set(sources)
    frontier = list(seen)
    while frontier:
        v = frontier.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen
