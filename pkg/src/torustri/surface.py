"""Combinatorial maps on the torus.

A map is stored as a rotation system over darts.  Darts are the integers
``0 .. 2m-1``; the twin of dart ``d`` is ``d ^ 1`` and its edge is
``d >> 1``.  ``next_ccw[d]`` is the next dart counterclockwise around the
same vertex.

Derived structure and conventions (all left/right language in this package
refers to these, anchored on the one-vertex and K7 fixtures):

* face circuits iterate ``sigma(d) = prev_ccw[twin(d)]``; the face of a dart
  lies on its left, and sigma orbits are the counterclockwise facial walks;
* the angle ``(v, d)`` is the corner between ``prev_ccw[d]`` and ``d``; it
  belongs to the face of ``prev_ccw[d]``;
* the dual of an edge directed along dart ``o`` runs from the face of ``o``
  (left) to the face of ``o ^ 1`` (right);
* at a visit of a directed walk with in-germ ``g_in`` (twin of the arriving
  dart) and out-dart ``g_out``, the left sector holds the darts strictly
  between ``g_out`` and ``g_in`` in ccw order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels


class MapError(ValueError):
    """Raised for malformed map files or contract violations."""


@dataclass(frozen=True)
class Angle:
    """An angle of a map: the corner just before `dart` around `vertex`."""
    vertex: int
    dart: int


@dataclass(frozen=True)
class Walk:
    """A walk given as a dart sequence; consecutive darts are head-to-tail."""
    darts: tuple
    closed: bool = True

    def __len__(self):
        return len(self.darts)


class TorusMap:
    """Immutable rotation-system map of genus 1."""

    def __init__(self, next_ccw, dart_vertex, n, check=True, triangulation=None):
        next_ccw = np.asarray(next_ccw, dtype=np.int64)
        dart_vertex = np.asarray(dart_vertex, dtype=np.int64)
        nd = next_ccw.shape[0]
        if nd == 0 or nd % 2:
            raise MapError("dart count must be positive and even")
        self.n = int(n)
        self.m = nd // 2
        self.next_ccw = next_ccw
        self.prev_ccw = np.empty(nd, np.int64)
        self.prev_ccw[next_ccw] = np.arange(nd)
        self.dart_vertex = dart_vertex
        face_of, nf = kernels.face_labels(self.prev_ccw)
        self.face_of = face_of
        self.f = int(nf)
        # CSR of darts around vertices, in rotation order
        order = np.empty(nd, np.int64)
        off = np.zeros(self.n + 1, np.int64)
        np.add.at(off, dart_vertex + 1, 1)
        np.cumsum(off, out=off)
        first = np.full(self.n, -1, np.int64)
        for d in range(nd):
            v = dart_vertex[d]
            if first[v] < 0:
                first[v] = d
        for v in range(self.n):
            d = first[v]
            for k in range(off[v], off[v + 1]):
                order[k] = d
                d = next_ccw[d]
        self.vert_off = off
        self.vert_darts = order
        self._basis = None
        if check:
            self._validate()
        if triangulation:
            self.require_triangulation()

    # -- construction ---------------------------------------------------

    @classmethod
    def from_rotations(cls, rotations, check=True, triangulation=None):
        """Build from per-vertex ccw dart lists."""
        nd = sum(len(r) for r in rotations)
        next_ccw = np.full(nd, -1, np.int64)
        dart_vertex = np.full(nd, -1, np.int64)
        seen = set()
        for v, rot in enumerate(rotations):
            for i, d in enumerate(rot):
                if not (0 <= d < nd):
                    raise MapError(f"dart {d} out of range 0..{nd - 1}")
                if d in seen:
                    raise MapError(f"duplicate dart {d}")
                seen.add(d)
                next_ccw[d] = rot[(i + 1) % len(rot)]
                dart_vertex[d] = v
        for d in range(nd):
            if d not in seen:
                raise MapError(f"missing dart {d}")
            if d ^ 1 not in seen:
                raise MapError(f"twin not involution: dart {d} lacks a partner")
        return cls(next_ccw, dart_vertex, len(rotations), check=check,
                   triangulation=triangulation)

    def _validate(self):
        if self.n - self.m + self.f != 0:
            raise MapError(
                f"not a torus map: n-m+f = {self.n - self.m + self.f}")

    def require_triangulation(self):
        """Check m = 3n, all faces of size 3, no contractible 1- or 2-cycle."""
        if self.m != 3 * self.n:
            raise MapError(f"not a triangulation: m={self.m}, n={self.n}")
        sizes = np.bincount(self.face_of, minlength=self.f)
        if not np.all(sizes == 3):
            raise MapError("not a triangulation: face of size != 3")
        bad = self.contractible_short_cycles()
        if bad:
            raise MapError(f"contractible short cycle: {bad[0]}")

    # -- basic accessors -------------------------------------------------

    def rotations(self):
        out = []
        for v in range(self.n):
            out.append([int(d) for d in
                        self.vert_darts[self.vert_off[v]:self.vert_off[v + 1]]])
        return out

    def sigma(self, d):
        """Face-circuit successor (face on the left of d)."""
        return int(self.prev_ccw[d ^ 1])

    def face_circuit(self, d0):
        """The sigma orbit through d0 (the ccw facial walk)."""
        out = [int(d0)]
        d = self.sigma(d0)
        while d != d0:
            out.append(d)
            d = self.sigma(d)
        return out

    def face_circuits(self):
        starts = {}
        for d in range(2 * self.m):
            starts.setdefault(int(self.face_of[d]), d)
        return [self.face_circuit(starts[fid]) for fid in sorted(starts)]

    def angles(self):
        return [Angle(int(self.dart_vertex[d]), d) for d in range(2 * self.m)]

    def angle_face(self, a: Angle) -> int:
        """The face containing an angle."""
        return int(self.face_of[self.prev_ccw[a.dart]])

    def degree(self, v):
        return int(self.vert_off[v + 1] - self.vert_off[v])

    def face_flow(self, fid):
        """Characteristic flow of the ccw facial walk of face `fid`
        (reference direction of edge e = dart 2e)."""
        phi = np.zeros(self.m, np.int64)
        for d in range(2 * self.m):
            if self.face_of[d] == fid:
                phi[d >> 1] += 1 if d % 2 == 0 else -1
        return phi

    # -- angle graph ------------------------------------------------------

    def angle_step(self, a: Angle, kind: str) -> Angle:
        d = a.dart
        if kind == "next_vertex":
            nd = int(self.next_ccw[d])
        elif kind == "prev_vertex":
            nd = int(self.prev_ccw[d])
        elif kind == "next_face":
            nd = int(self.next_ccw[d ^ 1])
        elif kind == "prev_face":
            nd = int(self.prev_ccw[d]) ^ 1
        else:
            raise ValueError(f"unknown angle step {kind!r}")
        return Angle(int(self.dart_vertex[nd]), nd)

    # -- dual -------------------------------------------------------------

    def dual(self):
        """The dual map and the edge correspondence.

        Edge e of the dual joins the two face-sides of primal edge e; the
        dual dart 2e leaves the face on the left of primal dart 2e.  Per
        dual vertex (= primal face), dual darts are ordered so that the dual
        rotation matches walking around the primal face.
        """
        rotations = [[] for _ in range(self.f)]
        starts = {}
        for d in range(2 * self.m):
            starts.setdefault(int(self.face_of[d]), d)
        for fid in range(self.f):
            for d in self.face_circuit(starts[fid]):
                # dual dart of primal dart d: leaves face_of[d]
                rotations[fid].append(d)
        dual_map = TorusMap.from_rotations(rotations, check=True)
        correspondence = {e: e for e in range(self.m)}
        return dual_map, correspondence

    # -- homology ---------------------------------------------------------

    def homology_basis(self):
        if self._basis is not None:
            return self._basis
        keep = self._unicellular_keep()
        core = self._trim_tree_parts(keep)
        b1, b2 = self._core_cycles(core)
        basis = HomologyBasis(Walk(tuple(b1)), Walk(tuple(b2)))
        w1 = kernels.left_sector_weights(
            self.next_ccw, np.asarray(b1, np.int64), 2 * self.m)
        w2 = kernels.left_sector_weights(
            self.next_ccw, np.asarray(b2, np.int64), 2 * self.m)
        s12 = int(kernels.walk_signature(w2, np.asarray(b1, np.int64)))
        s21 = int(kernels.walk_signature(w1, np.asarray(b2, np.int64)))
        s11 = int(kernels.walk_signature(w1, np.asarray(b1, np.int64)))
        s22 = int(kernels.walk_signature(w2, np.asarray(b2, np.int64)))
        if s11 * s22 - s12 * s21 == 0:
            raise MapError("homology basis degenerate")
        object.__setattr__(basis, "_weights", (w1, w2))
        self._basis = basis
        return basis

    def _unicellular_keep(self):
        """Spanning tree of the dual; keep = primal edges not dualized."""
        keep = np.ones(self.m, bool)
        seen = np.zeros(self.f, bool)
        seen[0] = True
        stack = [0]
        first = {}
        for d in range(2 * self.m):
            first.setdefault(int(self.face_of[d]), d)
        inc = [[] for _ in range(self.f)]
        for e in range(self.m):
            inc[self.face_of[2 * e]].append(e)
            inc[self.face_of[2 * e + 1]].append(e)
        while stack:
            g = stack.pop()
            for e in inc[g]:
                h = int(self.face_of[2 * e] if self.face_of[2 * e] != g
                        else self.face_of[2 * e + 1])
                if self.face_of[2 * e] == self.face_of[2 * e + 1]:
                    continue
                if not seen[h]:
                    seen[h] = True
                    keep[e] = False
                    stack.append(h)
        return keep

    def _trim_tree_parts(self, keep):
        core = keep.copy()
        deg = np.zeros(self.n, np.int64)
        for e in range(self.m):
            if core[e]:
                deg[self.dart_vertex[2 * e]] += 1
                deg[self.dart_vertex[2 * e + 1]] += 1
        queue = [v for v in range(self.n) if deg[v] == 1]
        inc = [[] for _ in range(self.n)]
        for e in range(self.m):
            if core[e]:
                inc[self.dart_vertex[2 * e]].append(e)
                inc[self.dart_vertex[2 * e + 1]].append(e)
        while queue:
            v = queue.pop()
            if deg[v] != 1:
                continue
            for e in inc[v]:
                if core[e]:
                    core[e] = False
                    for d in (2 * e, 2 * e + 1):
                        u = int(self.dart_vertex[d])
                        deg[u] -= 1
                        if deg[u] == 1:
                            queue.append(u)
                    break
        return core

    def _core_cycles(self, core):
        """Split the trimmed core (theta graph or bouquet) into two closed
        dart walks."""
        deg = np.zeros(self.n, np.int64)
        for e in range(self.m):
            if core[e]:
                deg[self.dart_vertex[2 * e]] += 1
                deg[self.dart_vertex[2 * e + 1]] += 1
        branch = [v for v in range(self.n) if deg[v] >= 3]
        if not branch:
            raise MapError("homology core has no branch vertex")
        v0 = branch[0]
        # walk the core from each core dart at v0 to the next branch vertex
        paths = []
        for d in self.vert_darts[self.vert_off[v0]:self.vert_off[v0 + 1]]:
            d = int(d)
            if not core[d >> 1]:
                continue
            path = [d]
            w = int(self.dart_vertex[d ^ 1])
            prev = d
            while deg[w] == 2:
                for x in self.vert_darts[self.vert_off[w]:self.vert_off[w + 1]]:
                    x = int(x)
                    if core[x >> 1] and x != (prev ^ 1):
                        path.append(x)
                        prev = x
                        w = int(self.dart_vertex[x ^ 1])
                        break
                else:
                    raise MapError("homology core is not a theta or bouquet")
            paths.append((path, w))
        if deg[v0] == 4 and len(branch) == 1:
            # bouquet: two loops at v0; paths come in twin pairs
            used = set()
            cycles = []
            for path, w in paths:
                key = frozenset(p >> 1 for p in path)
                if key in used:
                    continue
                used.add(key)
                cycles.append(path)
            if len(cycles) != 2:
                raise MapError("homology core is not a bouquet")
            return cycles[0], cycles[1]
        # theta: three arcs between the two branch vertices
        arcs = [p for p, w in paths if w != v0]
        if len(arcs) != 3 or deg[v0] != 3:
            raise MapError("homology core is not a theta graph")
        rev = lambda path: [x ^ 1 for x in reversed(path)]
        b1 = arcs[0] + rev(arcs[1])
        b2 = arcs[1] + rev(arcs[2])
        return b1, b2

    def crossing_signature(self, w: Walk, b: Walk) -> int:
        """Signed transversal crossings of closed walk w against closed
        walk b (left-to-right minus right-to-left)."""
        wb = kernels.left_sector_weights(
            self.next_ccw, np.asarray(b.darts, np.int64), 2 * self.m)
        return int(kernels.walk_signature(wb, np.asarray(w.darts, np.int64)))

    def is_contractible(self, w: Walk) -> bool:
        basis = self.homology_basis()
        w1, w2 = basis._weights
        arr = np.asarray(w.darts, np.int64)
        return (int(kernels.walk_signature(w1, arr)) == 0
                and int(kernels.walk_signature(w2, arr)) == 0)

    # -- flows ------------------------------------------------------------

    def walk_flow(self, darts):
        phi = np.zeros(self.m, np.int64)
        for d in darts:
            phi[d >> 1] += 1 if d % 2 == 0 else -1
        return phi

    def solve_face_coefficients(self, phi, f0=0):
        """Solve phi = sum(lambda_F * face_flow(F)) over faces != f0.

        Returns the per-face Fraction coefficients (lambda_{f0} = 0) or
        None when phi is not in the span.
        """
        faces = [f for f in range(self.f) if f != f0]
        cols = [self.face_flow(f) for f in faces]
        rows = self.m
        a = [[Fraction(int(cols[j][i])) for j in range(len(faces))]
             + [Fraction(int(phi[i]))] for i in range(rows)]
        piv_rows = []
        r = 0
        for c in range(len(faces)):
            p = next((i for i in range(r, rows) if a[i][c] != 0), None)
            if p is None:
                continue
            a[r], a[p] = a[p], a[r]
            inv = 1 / a[r][c]
            a[r] = [x * inv for x in a[r]]
            for i in range(rows):
                if i != r and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            piv_rows.append((r, c))
            r += 1
        lam = [Fraction(0)] * len(faces)
        for row, col in piv_rows:
            lam[col] = a[row][-1]
        # consistency check
        for i in range(rows):
            s = sum(lam[j] * cols[j][i] for j in range(len(faces)))
            if s != phi[i]:
                return None
        out = {f0: Fraction(0)}
        for j, f in enumerate(faces):
            out[f] = lam[j]
        return out

    # -- short cycles and separating triangles -----------------------------

    def parallel_classes(self):
        by_pair = {}
        for e in range(self.m):
            u = int(self.dart_vertex[2 * e])
            v = int(self.dart_vertex[2 * e + 1])
            by_pair.setdefault((min(u, v), max(u, v)), []).append(e)
        return by_pair

    def contractible_short_cycles(self):
        """All contractible 1- and 2-cycles (as dart walks); empty on valid
        triangulation inputs."""
        bad = []
        for e in range(self.m):
            u = int(self.dart_vertex[2 * e])
            v = int(self.dart_vertex[2 * e + 1])
            if u == v and self.is_contractible(Walk((2 * e,))):
                bad.append((2 * e,))
        for (u, v), edges in self.parallel_classes().items():
            if u == v:
                continue
            for i in range(len(edges)):
                ei = edges[i]
                d1 = 2 * ei if self.dart_vertex[2 * ei] == u else 2 * ei + 1
                for j in range(i + 1, len(edges)):
                    ej = edges[j]
                    d2 = 2 * ej if self.dart_vertex[2 * ej] == v else 2 * ej + 1
                    w = (d1, d2)
                    if self.is_contractible(Walk(w)):
                        bad.append(w)
        return bad

    def separating_triangles(self):
        """All contractible non-facial triangles, with their disk side.

        Returns a list of SeparatingTriangle.  Cost is a common-neighbour
        scan, quadratic in vertex degrees; the encode pipeline never calls
        this (the root choice avoids it).
        """
        out = []
        seen = set()
        for w in self._triangle_walks():
            key = frozenset(d >> 1 for d in w)
            if len(key) < 3 or key in seen:
                continue
            fa = self.face_of[w[0]]
            if all(self.face_of[d] == fa for d in w):
                continue  # a face
            fb = self.face_of[w[0] ^ 1]
            if all(self.face_of[d ^ 1] == fb for d in w):
                continue  # a face on the other side
            if not self.is_contractible(Walk(tuple(w))):
                continue
            seen.add(key)
            out.append(self._classify_triangle(w))
        return out

    def _triangle_walks(self):
        inc = [[] for _ in range(self.n)]
        for d in range(2 * self.m):
            inc[self.dart_vertex[d]].append(d)
        for e in range(self.m):
            u = int(self.dart_vertex[2 * e])
            v = int(self.dart_vertex[2 * e + 1])
            if u == v:
                continue
            for d2 in inc[v]:
                if d2 >> 1 == e:
                    continue
                w = int(self.dart_vertex[d2 ^ 1])
                if w == u or w == v:
                    continue
                for d3 in inc[w]:
                    if d3 >> 1 == e or d3 >> 1 == d2 >> 1:
                        continue
                    if int(self.dart_vertex[d3 ^ 1]) == u:
                        if e < (d2 >> 1) and e < (d3 >> 1):
                            yield [2 * e, d2, d3]

    def _classify_triangle(self, walk):
        tri_edges = {d >> 1 for d in walk}
        blocked = tri_edges
        regions = []
        for side in (0, 1):
            faces = {int(self.face_of[d ^ side]) for d in walk}
            stack = list(faces)
            region = set(faces)
            while stack:
                g = stack.pop()
                for e in range(self.m):
                    if e in blocked:
                        continue
                    fa, fb = int(self.face_of[2 * e]), int(self.face_of[2 * e + 1])
                    if fa == g and fb not in region:
                        region.add(fb)
                        stack.append(fb)
                    elif fb == g and fa not in region:
                        region.add(fa)
                        stack.append(fa)
            regions.append(region)
        tri_vertices = {int(self.dart_vertex[d]) for d in walk}
        chis = []
        interiors = []
        for region in regions:
            vin = set()
            ein = set()
            for e in range(self.m):
                if e in tri_edges:
                    continue
                if (int(self.face_of[2 * e]) in region
                        and int(self.face_of[2 * e + 1]) in region):
                    ein.add(e)
                    for d in (2 * e, 2 * e + 1):
                        u = int(self.dart_vertex[d])
                        if u not in tri_vertices:
                            vin.add(u)
            chis.append(len(vin) - len(ein) + len(region))
            interiors.append((vin, ein, region))
        disk = 0 if chis[0] == 1 else 1
        if chis[disk] != 1:
            raise MapError("separating triangle without a disk side")
        vin, ein, region = interiors[disk]
        return SeparatingTriangle(self, tuple(walk), disk, frozenset(vin),
                                  frozenset(ein), frozenset(region))

    # -- canonical form -----------------------------------------------------

    def canonical_code(self, root: int) -> bytes:
        out = np.empty(4 * self.m, np.int64)
        kernels.canon_transcript(self.next_ccw, int(root), out)
        return out.astype(np.int32).tobytes()

    def min_canonical_code(self) -> bytes:
        return min(self.canonical_code(d) for d in range(2 * self.m))

    def is_isomorphic(self, other: "TorusMap", rooted=None) -> bool:
        if self.n != other.n or self.m != other.m:
            return False
        if rooted is not None:
            da, db = rooted
            return self.canonical_code(da) == other.canonical_code(db)
        code = self.canonical_code(0)
        return any(code == other.canonical_code(d) for d in range(2 * other.m))


@dataclass(frozen=True)
class HomologyBasis:
    b1: Walk
    b2: Walk


@dataclass(frozen=True)
class SeparatingTriangle:
    """A contractible non-facial triangle with its disk side identified."""
    map: TorusMap
    walk: tuple            # the three darts, disk side on the left/right
    disk_side: int         # 0: disk on the left of walk darts, 1: right
    interior_vertices: frozenset
    interior_edges: frozenset
    disk_faces: frozenset

    def angle_in_strict_interior(self, a: Angle) -> bool:
        return a.vertex in self.interior_vertices

    def angle_in_cw_interior(self, a: Angle) -> bool:
        """True unless the angle avoids the disk or is one of the three
        allowed border angles (just before a triangle dart, inside the
        disk sector)."""
        if a.vertex in self.interior_vertices:
            return True
        tri_vertices = {int(self.map.dart_vertex[d]) for d in self.walk}
        if a.vertex not in tri_vertices:
            return False
        # the disk sector at each border vertex runs ccw from the out-dart
        # to the in-germ of the walk traversed with the disk on its left
        walk = list(self.walk)
        if self.disk_side == 1:
            walk = [d ^ 1 for d in reversed(walk)]
        k = len(walk)
        for i in range(k):
            g_in = walk[i] ^ 1
            g_out = walk[(i + 1) % k]
            v = int(self.map.dart_vertex[g_out])
            if v != a.vertex:
                continue
            d = int(self.map.next_ccw[g_out])
            while True:
                # angles inside the closed disk sector end at g_in
                if a.dart == d:
                    return d != g_in
                if d == g_in:
                    break
                d = int(self.map.next_ccw[d])
        return False


# -- TMAP text format ------------------------------------------------------

def parse_tmap(text: str) -> TorusMap:
    """Parse the TMAP format (strict single-space separation)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines:
        raise MapError("empty file")
    head = lines[0].split(" ")
    if head[:2] != ["tmap", "1"] or len(head) not in (4, 5):
        raise MapError(f"bad header: {lines[0]!r}")
    if len(head) == 5 and head[4] != "triangulation":
        raise MapError(f"bad header flag: {head[4]!r}")
    try:
        n, m = int(head[2]), int(head[3])
    except ValueError:
        raise MapError(f"bad header numbers: {lines[0]!r}") from None
    triangulation = len(head) == 5
    if len(lines) != 1 + n:
        raise MapError(f"expected {n} vertex lines, got {len(lines) - 1}")
    rotations = [None] * n
    for line in lines[1:]:
        if line != line.strip() or "  " in line:
            raise MapError(f"bad whitespace in line: {line!r}")
        parts = line.split(" ")
        if parts[0] != "v" or len(parts) < 3:
            raise MapError(f"bad vertex line: {line!r}")
        try:
            vid = int(parts[1])
            darts = [int(x) for x in parts[2:]]
        except ValueError:
            raise MapError(f"bad vertex line: {line!r}") from None
        if not 0 <= vid < n or rotations[vid] is not None:
            raise MapError(f"bad vertex id {vid}")
        rotations[vid] = darts
    nd = sum(len(r) for r in rotations)
    if nd != 2 * m:
        raise MapError(f"dart count {nd} != 2m = {2 * m}")
    return TorusMap.from_rotations(rotations, check=True,
                                   triangulation=triangulation)


def write_tmap(g: TorusMap, triangulation=None) -> str:
    if triangulation is None:
        triangulation = (g.m == 3 * g.n
                         and bool(np.all(np.bincount(g.face_of) == 3)))
    flag = " triangulation" if triangulation else ""
    out = [f"tmap 1 {g.n} {g.m}{flag}"]
    for v, rot in enumerate(g.rotations()):
        out.append("v " + str(v) + " " + " ".join(str(d) for d in rot))
    return "\n".join(out) + "\n"
