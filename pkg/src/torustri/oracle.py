"""Brute-force ground truth on tiny instances, plus fixture generators.

The enumeration cap is hard (m <= 24); correctness beats speed here, so the
enumerator filters all 2^m assignments with no pruning beyond out-degrees.
"""

from __future__ import annotations

import random

import numpy as np

from . import kernels
from .minimize import is_minimal, minimize
from .orientation import Orientation, delta, is_zero_homologous
from .surface import MapError, TorusMap

ORACLE_EDGE_CAP = 24


# -- fixture generators ------------------------------------------------------

def gen_one_vertex() -> TorusMap:
    """The toroidal triangulation on one vertex: three pairwise crossing
    loops, two triangular faces."""
    return TorusMap.from_rotations([[0, 2, 4, 1, 3, 5]], triangulation=True)


def _k7_rotation(deltas):
    """K7 with vertices Z7, edge {i, i+d} for d in 1..3, rotation at i given
    by the difference sequence."""
    def dart(i, dlt):
        if dlt <= 3:
            return 2 * (3 * i + dlt - 1)
        j = (i + dlt) % 7
        return 2 * (3 * j + (7 - dlt) - 1) + 1
    return [[dart(i, dlt) for dlt in deltas] for i in range(7)]


def gen_k7() -> TorusMap:
    """The triangular embedding of K7 on the torus (vertex-transitive,
    degree 6, no separating triangles)."""
    from itertools import permutations
    for rest in permutations((2, 3, 4, 5, 6)):
        deltas = (1,) + rest
        try:
            g = TorusMap.from_rotations(_k7_rotation(deltas), check=True)
        except MapError:
            continue
        if g.f == 14 and np.all(np.bincount(g.face_of) == 3):
            g.require_triangulation()
            return g
    raise MapError("no triangular embedding found for K7")


def split_vertex(next_rot, prev_rot, dvert, nd, w, a, b, new_v):
    """Split vertex w along its darts a, b: w keeps the sector [a..b), the
    new vertex takes [b..a), and three edges (six darts nd..nd+5) are added
    so that all faces stay triangles.  Returns the new dart count."""
    p, q, r = nd, nd + 2, nd + 4
    la = prev_rot[b]   # last dart of w's sector (a if empty)
    lb = prev_rot[a]   # last dart of the new sector (b if empty)
    a1, b1 = a ^ 1, b ^ 1

    def link(x, y):
        next_rot[x] = y
        prev_rot[y] = x

    # u = w keeps (a .. la) + r, p ; v gets (b .. lb) + q, p^1
    link(la, r)
    link(r, p)
    link(p, a)
    link(lb, q)
    link(q, p ^ 1)
    link(p ^ 1, b)
    d = b
    while True:
        dvert[d] = new_v
        d = next_rot[d]
        if d == b:
            break
    dvert[p] = w
    dvert[r] = w
    # x-side copy parallel to edge(a), y-side copy parallel to edge(b)
    link(q ^ 1, next_rot[a1])
    link(a1, q ^ 1)
    dvert[q ^ 1] = dvert[a1]
    link(r ^ 1, next_rot[b1])
    link(b1, r ^ 1)
    dvert[r ^ 1] = dvert[b1]
    return nd + 6


def gen_random(n: int, seed: int) -> TorusMap:
    """Random toroidal triangulation grown from the one-vertex map by
    repeated vertex splits; deterministic per seed."""
    if n < 1:
        raise MapError("n must be >= 1")
    rng = random.Random(seed)
    size = 6 * n
    next_rot = np.empty(size, np.int64)
    prev_rot = np.empty(size, np.int64)
    dvert = np.empty(size, np.int64)
    base = [0, 2, 4, 1, 3, 5]
    for i, d in enumerate(base):
        next_rot[d] = base[(i + 1) % 6]
        prev_rot[base[(i + 1) % 6]] = d
        dvert[d] = 0
    rep = [0]
    deg = [6]
    nd = 6
    for _ in range(n - 1):
        w = rng.randrange(len(rep))
        darts = []
        d = rep[w]
        for _ in range(deg[w]):
            darts.append(d)
            d = int(next_rot[d])
        i = rng.randrange(deg[w])
        j = rng.randrange(deg[w] - 1)
        if j >= i:
            j += 1
        a, b = darts[i], darts[j]
        new_v = len(rep)
        nd = split_vertex(next_rot, prev_rot, dvert, nd, w, a, b, new_v)
        rep[w] = a
        rep.append(b)
        for v, start in ((w, a), (new_v, b)):
            k = 1
            d = int(next_rot[start])
            while d != start:
                k += 1
                d = int(next_rot[d])
            if v == new_v:
                deg.append(k)
            else:
                deg[v] = k
    g = TorusMap(next_rot[:nd], dvert[:nd], n, check=True)
    return g


def insert_vertex_in_face(g: TorusMap, face_dart: int) -> TorusMap:
    """Subdivide the triangular face on the left of face_dart with a new
    degree-3 vertex (creates a separating triangle around it)."""
    circuit = g.face_circuit(face_dart)
    if len(circuit) != 3:
        raise MapError("face is not a triangle")
    rotations = g.rotations()
    nd = 2 * g.m
    c = circuit
    new_darts = [nd, nd + 2, nd + 4]   # a_i toward tail(c_i)
    rotations.append(list(new_darts))
    # insert a_i^1 into the gap between c_i and its rotation successor
    for i in range(3):
        v = int(g.dart_vertex[c[i]])
        rot = rotations[v]
        k = rot.index(c[i])
        rot.insert(k + 1, new_darts[i] ^ 1)
    return TorusMap.from_rotations(rotations, check=True)


# -- enumeration oracles ------------------------------------------------------

def enumerate_three_orientations(g: TorusMap):
    """All 3-orientations of g (m <= 24)."""
    if g.m > ORACLE_EDGE_CAP:
        raise MapError(f"oracle cap exceeded: m = {g.m} > {ORACLE_EDGE_CAP}")
    ea = g.dart_vertex[0::2].copy()
    eb = g.dart_vertex[1::2].copy()
    cnt = int(kernels.enum_orients(ea, eb, g.n, g.m, np.empty(0, np.int64)))
    out = np.empty(cnt, np.int64)
    kernels.enum_orients(ea, eb, g.n, g.m, out)
    res = []
    for i in range(cnt):
        mask = int(out[i])
        tail = np.fromiter(
            (2 * e + ((mask >> e) & 1) for e in range(g.m)), np.int64, g.m)
        res.append(Orientation(g, tail))
    return res


def orientation_class_key(g: TorusMap, d: Orientation):
    """Homology-class invariant: crossing pairings of the orientation flow
    against the basis cycles (equal keys <=> homologous)."""
    basis = g.homology_basis()
    w1, w2 = basis._weights
    t1 = t2 = 0
    for e in range(g.m):
        o = int(d.tail[e])
        t1 += w1[o] - w1[o ^ 1]
        t2 += w2[o] - w2[o ^ 1]
    return (int(t1), int(t2))


def homology_classes(g: TorusMap, orients):
    """Partition into homology classes (keyed by basis pairings, verified
    against the face-span membership test on class representatives)."""
    classes = {}
    for d in orients:
        classes.setdefault(orientation_class_key(g, d), []).append(d)
    out = list(classes.values())
    for cls in out:
        rep = cls[0]
        for d in cls[1:len(cls):max(1, len(cls) - 1)]:
            if not is_zero_homologous(g, delta(d, rep)):
                raise MapError("class key disagrees with homology test")
    return out


def cw_subgraph_tables(g: TorusMap):
    """Per face-subset boundary requirements for the exhaustive clockwise
    0-homologous subgraph scan.

    Returns (bound, req, face_masks): for subset index s, bound[s] has bit e
    set when edge e is on the subset boundary and req[s] gives the required
    tail choices there (bit = tail at dart 2e+1) for the subgraph that is a
    negative combination of the subset's ccw facial walks.
    """
    flows = [g.face_flow(f) for f in range(g.f)]
    ns = 1 << g.f
    bound = np.zeros(ns, np.int64)
    req = np.zeros(ns, np.int64)
    ok = np.zeros(ns, bool)
    for s in range(ns):
        phi = np.zeros(g.m, np.int64)
        for f in range(g.f):
            if (s >> f) & 1:
                phi -= flows[f]
        if np.any(np.abs(phi) > 1):
            continue  # not realizable as an oriented subgraph
        ok[s] = True
        b = r = 0
        for e in range(g.m):
            if phi[e] != 0:
                b |= 1 << e
                if phi[e] < 0:
                    r |= 1 << e
        bound[s] = b
        req[s] = r
    return bound, req, ok


def has_cw_subgraph(g: TorusMap, d: Orientation, f0: int, tables=None) -> bool:
    """Exhaustive check for a clockwise non-empty 0-homologous oriented
    subgraph w.r.t. f0 (0/1 coefficient subsets suffice: general
    coefficients decompose into edge-disjoint such layers)."""
    if tables is None:
        tables = cw_subgraph_tables(g)
    bound, req, ok = tables
    mask = 0
    for e in range(g.m):
        if d.tail[e] & 1:
            mask |= 1 << e
    for s in range(len(bound)):
        if not ok[s] or (s >> f0) & 1 or s == 0:
            continue
        b = int(bound[s])
        if b == 0:
            continue
        if (mask & b) == int(req[s]):
            return True
    return False


def rigid_edges(g: TorusMap, orients):
    """Edges oriented identically in every orientation of the class."""
    if not orients:
        return set()
    base = orients[0].tail
    rigid = np.ones(g.m, bool)
    for d in orients[1:]:
        rigid &= d.tail == base
    return {e for e in range(g.m) if rigid[e]}


def lattice_check(g: TorusMap, cls, f0: int):
    """Verify the lattice structure of one homology class w.r.t. f0.

    Returns a report dict; raises MapError on any violation.
    """
    minima = {}
    tables = cw_subgraph_tables(g)
    for d in cls:
        md = minimize(g, d, f0)
        minima[md.tail.tobytes()] = md
        if not is_minimal(g, md, f0):
            raise MapError("minimize output not minimal")
        if is_minimal(g, d, f0) and not np.array_equal(d.tail, md.tail):
            raise MapError("is_minimal true away from the minimum")
        if has_cw_subgraph(g, d, f0, tables) == is_minimal(g, d, f0):
            raise MapError("cw-subgraph characterization mismatch")
        if not is_zero_homologous(g, delta(d, md)):
            raise MapError("minimize left the homology class")
    if len(minima) != 1:
        raise MapError(f"class has {len(minima)} distinct minima w.r.t. {f0}")
    return {"size": len(cls), "f0": f0}


def write_fixture(path, g: TorusMap):
    from .surface import write_tmap
    with open(path, "w") as fh:
        fh.write(write_tmap(g))
