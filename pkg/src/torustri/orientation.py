"""Orientations of torus maps: out-degrees, flows, gamma, Schnyder coloring.

An orientation stores one tail dart per edge; the edge leaves the tail's
vertex.  Gamma of a directed cycle counts edges leaving on its right minus
edges leaving on its left, with sectors resolved per visit (see surface.py
for the sector convention).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .surface import MapError, TorusMap, Walk


class Orientation:
    """A per-edge direction over a TorusMap."""

    def __init__(self, g: TorusMap, tail):
        self.map = g
        self.tail = np.asarray(tail, dtype=np.int64)
        if self.tail.shape[0] != g.m:
            raise MapError("tail table size mismatch")
        if not np.all((self.tail >> 1) == np.arange(g.m)):
            raise MapError("tail[e] must be a dart of edge e")

    def copy(self):
        return Orientation(self.map, self.tail.copy())

    def outdegrees(self):
        return np.bincount(self.map.dart_vertex[self.tail], minlength=self.map.n)

    def reverse_darts(self, darts):
        """Reverse the edges of the given darts (a directed cycle or cut)."""
        t = self.tail.copy()
        for d in darts:
            t[d >> 1] ^= 1
        return Orientation(self.map, t)

    def as_flow(self):
        """+-1 per edge relative to the reference direction (dart 2e)."""
        return np.where(self.tail % 2 == 0, 1, -1).astype(np.int64)

    def __eq__(self, other):
        return (isinstance(other, Orientation) and self.map is other.map
                and np.array_equal(self.tail, other.tail))

    def __hash__(self):
        return hash(self.tail.tobytes())


def is_three_orientation(d: Orientation) -> bool:
    return bool(np.all(d.outdegrees() == 3))


def delta(d: Orientation, d2: Orientation):
    """Characteristic flow of the edges where the orientations differ,
    oriented as in the first one."""
    if d.map is not d2.map:
        raise MapError("orientations live on different maps")
    diff = d.tail != d2.tail
    return np.where(diff, d.as_flow(), 0)


def is_zero_homologous(g: TorusMap, flow) -> bool:
    """Membership of a flow in the integer span of the ccw facial walks."""
    lam = g.solve_face_coefficients(np.asarray(flow, np.int64))
    if lam is None:
        return False
    return all(c.denominator == 1 for c in lam.values())


def gamma(d: Orientation, c: Walk) -> int:
    g = d.map
    cyc = np.asarray(c.darts, np.int64)
    on_cycle = np.zeros(g.m, bool)
    for x in c.darts:
        on_cycle[x >> 1] = True
    return int(kernels.gamma_of_cycle(g.next_ccw, d.tail, on_cycle, cyc))


def is_htc(d: Orientation, basis=None) -> bool:
    g = d.map
    if basis is None:
        basis = g.homology_basis()
    return gamma(d, basis.b1) == 0 and gamma(d, basis.b2) == 0


@dataclass
class SchnyderColoring:
    orientation: Orientation
    color: np.ndarray  # per-edge value in {0, 1, 2}


def color_edges(d: Orientation) -> SchnyderColoring:
    """Recover the edge coloring from a 3-orientation by propagating
    per-vertex color offsets; raises MapError if the orientation is not a
    Schnyder wood."""
    g = d.map
    color, status, where = kernels.color_propagate(
        g.next_ccw, g.dart_vertex, g.vert_off, g.vert_darts, d.tail, g.n)
    if status == 2:
        raise MapError(f"not a Schnyder wood: vertex {where} lacks out-degree 3")
    if status == 1:
        raise MapError(f"not a Schnyder wood: color conflict at vertex {where}")
    return SchnyderColoring(d, color)


def dual_orientation(d: Orientation):
    """The dual orientation: each dual edge runs from the face on the left
    of its primal edge to the face on the right.

    Returns (dual_map, dual_tails): dual dart ids equal primal dart ids.
    """
    g = d.map
    dual_map, _ = g.dual()
    # dual dart of primal dart x sits at face_of[x]; the dual edge of e
    # leaves face_of[tail[e]]
    return dual_map, Orientation(dual_map, d.tail.copy())


def has_noncontractible_directed_cycle(g: TorusMap, d: Orientation) -> bool:
    """True iff the directed graph of d (on map g) contains a directed
    non-contractible cycle.

    Uses crossing potentials on strongly connected components: a directed
    cycle with nonzero crossing number against some basis cycle exists iff
    a potential assignment conflicts inside a component.
    """
    basis = g.homology_basis()
    w1, w2 = basis._weights
    n = g.n
    # directed adjacency: v -> head(tail dart)
    out = [[] for _ in range(n)]
    for e in range(g.m):
        o = int(d.tail[e])
        out[int(g.dart_vertex[o])].append(o)
    comp = _scc(out, g, n)
    pot1 = [None] * n
    pot2 = [None] * n
    for v0 in range(n):
        if pot1[v0] is not None:
            continue
        pot1[v0] = 0
        pot2[v0] = 0
        stack = [v0]
        while stack:
            v = stack.pop()
            for o in out[v]:
                w = int(g.dart_vertex[o ^ 1])
                if comp[w] != comp[v]:
                    continue
                c1 = int(w1[o] - w1[o ^ 1])
                c2 = int(w2[o] - w2[o ^ 1])
                if pot1[w] is None:
                    pot1[w] = pot1[v] + c1
                    pot2[w] = pot2[v] + c2
                    stack.append(w)
                elif (pot1[w] != pot1[v] + c1) or (pot2[w] != pot2[v] + c2):
                    return True
    return False


def _scc(out, g, n):
    """Strongly connected components (iterative Tarjan)."""
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = [0]
    ncomp = [0]
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            edges = out[v]
            while pi < len(edges):
                w = int(g.dart_vertex[edges[pi] ^ 1])
                pi += 1
                if index[w] is None:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    recurse = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp[0]
                    if w == v:
                        break
                ncomp[0] += 1
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp


def monochromatic_cycles(c: SchnyderColoring, i: int):
    """The directed cycles of the color-i functional subgraph, as Walks."""
    g = c.orientation.map
    nxt = {}
    for e in range(g.m):
        if c.color[e] == i:
            o = int(c.orientation.tail[e])
            nxt[int(g.dart_vertex[o])] = o
    state = {}
    cycles = []
    for v0 in nxt:
        if v0 in state:
            continue
        path = []
        pos = {}
        v = v0
        while v in nxt and v not in state and v not in pos:
            pos[v] = len(path)
            path.append(nxt[v])
            v = int(g.dart_vertex[nxt[v] ^ 1])
        if v in pos:
            cycles.append(Walk(tuple(path[pos[v]:])))
        for u in pos:
            state[u] = True
    return cycles


def is_crossing(c: SchnyderColoring) -> bool:
    """True iff for each pair of colors some monochromatic cycles of the
    two colors share a vertex."""
    g = c.orientation.map
    vsets = []
    for i in range(3):
        cycles = monochromatic_cycles(c, i)
        vsets.append([{int(g.dart_vertex[d]) for d in cy.darts} for cy in cycles])
    for i in range(3):
        for j in range(i + 1, 3):
            if not any(a & b for a in vsets[i] for b in vsets[j]):
                return False
    return True


# -- sidecar formats --------------------------------------------------------

def write_torient(d: Orientation) -> str:
    out = [f"torient 1 {d.map.m}"]
    for e in range(d.map.m):
        out.append(f"e {e} {int(d.tail[e])}")
    return "\n".join(out) + "\n"


def parse_torient(g: TorusMap, text: str) -> Orientation:
    lines = [ln for ln in text.split("\n") if ln]
    head = lines[0].split(" ")
    if head[:2] != ["torient", "1"] or len(head) != 3 or int(head[2]) != g.m:
        raise MapError(f"bad torient header: {lines[0]!r}")
    tail = np.full(g.m, -1, np.int64)
    for ln in lines[1:]:
        parts = ln.split(" ")
        if len(parts) != 3 or parts[0] != "e":
            raise MapError(f"bad torient line: {ln!r}")
        e, t = int(parts[1]), int(parts[2])
        if not (0 <= e < g.m) or t >> 1 != e or tail[e] != -1:
            raise MapError(f"bad torient entry: {ln!r}")
        tail[e] = t
    if np.any(tail < 0):
        raise MapError("torient file misses edges")
    return Orientation(g, tail)


def write_tcolor(c: SchnyderColoring) -> str:
    out = ["tcolor 1"]
    for e in range(c.orientation.map.m):
        out.append(f"e {e} {int(c.color[e])}")
    return "\n".join(out) + "\n"


def parse_tcolor(g: TorusMap, d: Orientation, text: str) -> SchnyderColoring:
    lines = [ln for ln in text.split("\n") if ln]
    if lines[0] != "tcolor 1":
        raise MapError(f"bad tcolor header: {lines[0]!r}")
    color = np.full(g.m, -1, np.int64)
    for ln in lines[1:]:
        parts = ln.split(" ")
        if len(parts) != 3 or parts[0] != "e":
            raise MapError(f"bad tcolor line: {ln!r}")
        color[int(parts[1])] = int(parts[2])
    if np.any(color < 0) or np.any(color > 2):
        raise MapError("tcolor file incomplete")
    return SchnyderColoring(d, color)
