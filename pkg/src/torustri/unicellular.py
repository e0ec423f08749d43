"""One-face maps with stems: the traversal output and codec intermediate.

A UnicellularMap lives in the dart space of the triangulation it encodes
(2m darts, twin = xor 1).  A stem is an attached dart whose twin is not
attached; skeleton edges have both darts attached.  The single face's
border is the cyclic sequence of attached darts under

    sigma(t) = prev_rot[twin(t)]   (skeleton darts)
    sigma(t) = prev_rot[t]         (stems bounce at their tip)

The root angle is tracked as a marker sitting immediately after a given
item in sigma order; for traversal outputs that item is the root stem.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .surface import MapError, TorusMap

MARKER = -1  # placeholder: the marker item id is 2m (arrays sized 2m+1)


class UnicellularMap:
    """A map with stems on the torus, rooted at an angle when
    root_after_item is given (the marker sits just after that item on the
    border)."""

    def __init__(self, n, next_rot, prev_rot, dart_vertex, attached,
                 root_after_item=None, check=True):
        self.n = int(n)
        self.next_rot = np.asarray(next_rot, np.int64)
        self.prev_rot = np.asarray(prev_rot, np.int64)
        self.dart_vertex = np.asarray(dart_vertex, np.int64)
        self.attached = np.asarray(attached, bool)
        self.nd = self.next_rot.shape[0]
        self.root_after_item = root_after_item
        self._border = None
        self._walk = None
        if check:
            self.validate_structure()

    # -- derived structure -------------------------------------------------

    def is_stem(self, t) -> bool:
        return bool(self.attached[t] and not self.attached[t ^ 1])

    def stem_items(self):
        att = self.attached
        return [int(d) for d in
                np.flatnonzero(att & ~att[np.arange(self.nd) ^ 1])]

    def skeleton_edges(self):
        att = self.attached
        return [int(e) for e in np.flatnonzero(att[0::2] & att[1::2])]

    def sigma(self, t) -> int:
        if self.attached[t ^ 1]:
            return int(self.prev_rot[t ^ 1])
        return int(self.prev_rot[t])

    def border(self):
        """(nxt_b, prv_b, marker_id, start): border linked lists over items,
        including the root marker when rooted."""
        if self._border is not None:
            return self._border
        order = self._walk_order()
        nd = self.nd
        marker = nd
        nxt = np.full(nd + 1, -1, np.int64)
        prv = np.full(nd + 1, -1, np.int64)
        nxt[order] = np.roll(order, -1)
        prv[np.roll(order, -1)] = order
        start = int(order[0])
        if self.root_after_item is not None:
            a = int(self.root_after_item)
            b = int(nxt[a])
            nxt[a] = marker
            prv[marker] = a
            nxt[marker] = b
            prv[b] = marker
        self._border = (nxt, prv, marker, start)
        return self._border

    def _walk_order(self):
        """The single face circuit as an item array, starting just after
        the root marker when rooted."""
        if self._walk is not None:
            return self._walk
        n_items = int(self.attached.sum())
        if n_items == 0:
            raise MapError("empty map")
        if self.root_after_item is not None:
            prev = int(self.root_after_item)
            start = self.sigma(prev)
        else:
            start = int(np.flatnonzero(self.attached)[0])
        out = np.empty(n_items, np.int64)
        k = int(kernels.border_walk(self.prev_rot, self.attached, start, out))
        if k != n_items:
            raise MapError(f"not unicellular: border covers {k} of "
                           f"{n_items} items")
        self._walk = out
        return out

    def face_walk(self):
        """Border items in sigma order, from the marker when rooted."""
        return [int(t) for t in self._walk_order()]

    def face_count(self) -> int:
        att = np.flatnonzero(self.attached)
        if att.size == 0:
            return 0
        out = np.empty(att.size, np.int64)
        k = int(kernels.border_walk(self.prev_rot, self.attached,
                                    int(att[0]), out))
        if k == att.size:
            return 1
        seen = set()
        faces = 0
        for t0 in att:
            t0 = int(t0)
            if t0 in seen:
                continue
            faces += 1
            t = t0
            while t not in seen:
                seen.add(t)
                t = self.sigma(t)
        return faces

    def stems_in_walk_order(self):
        return [t for t in self.face_walk() if self.is_stem(t)]

    # -- invariants ----------------------------------------------------------

    def validate_structure(self):
        att = np.flatnonzero(self.attached)
        if att.size == 0:
            raise MapError("empty map")
        for d in att:
            d = int(d)
            if not self.attached[self.next_rot[d]]:
                raise MapError(f"rotation leaves attached set at dart {d}")
            if self.prev_rot[self.next_rot[d]] != d:
                raise MapError(f"rotation lists inconsistent at dart {d}")

    def skeleton_core(self):
        """Skeleton edges after iteratively trimming skeleton-degree-1
        vertices (stems do not count)."""
        edges = self.skeleton_edges()
        deg = {}
        inc = {}
        for e in edges:
            for d in (2 * e, 2 * e + 1):
                v = int(self.dart_vertex[d])
                deg[v] = deg.get(v, 0) + 1
                inc.setdefault(v, []).append(e)
        core = set(edges)
        queue = [v for v, k in deg.items() if k == 1]
        while queue:
            v = queue.pop()
            if deg.get(v, 0) != 1:
                continue
            for e in inc[v]:
                if e in core:
                    core.remove(e)
                    for d in (2 * e, 2 * e + 1):
                        u = int(self.dart_vertex[d])
                        deg[u] -= 1
                        if deg[u] == 1:
                            queue.append(u)
                    break
        return core

    def shape(self) -> str:
        """'hexagon' (two corners) or 'square' (one corner)."""
        core = self.skeleton_core()
        deg = {}
        for e in core:
            for d in (2 * e, 2 * e + 1):
                v = int(self.dart_vertex[d])
                deg[v] = deg.get(v, 0) + 1
        corners = sorted(v for v, k in deg.items() if k >= 3)
        if len(corners) == 2 and all(deg[v] == 3 for v in corners):
            return "hexagon"
        if len(corners) == 1 and deg[corners[0]] == 4:
            return "square"
        raise MapError(f"unexpected core corner degrees: "
                       f"{[(v, deg[v]) for v in corners]}")

    def corners(self):
        core = self.skeleton_core()
        deg = {}
        for e in core:
            for d in (2 * e, 2 * e + 1):
                v = int(self.dart_vertex[d])
                deg[v] = deg.get(v, 0) + 1
        return sorted(v for v, k in deg.items() if k >= 3)

    def core_cycles(self):
        """Two closed dart walks spanning the homology of the core."""
        core = self.skeleton_core()
        deg = {}
        inc = {}
        for e in core:
            for d in (2 * e, 2 * e + 1):
                v = int(self.dart_vertex[d])
                deg[v] = deg.get(v, 0) + 1
                inc.setdefault(v, []).append(d)
        corners = [v for v, k in deg.items() if k >= 3]
        v0 = corners[0]
        paths = []
        for d in inc[v0]:
            path = [d]
            w = int(self.dart_vertex[d ^ 1])
            prev = d
            while deg[w] == 2:
                for x in inc[w]:
                    if x != (prev ^ 1):
                        path.append(x)
                        prev = x
                        w = int(self.dart_vertex[x ^ 1])
                        break
            paths.append((path, w))
        if len(corners) == 1:
            used = set()
            cycles = []
            for path, w in paths:
                key = frozenset(p >> 1 for p in path)
                if key in used:
                    continue
                used.add(key)
                cycles.append(path)
            return cycles[0], cycles[1]
        arcs = [p for p, w in paths if w != v0]
        rev = lambda path: [x ^ 1 for x in reversed(path)]
        return arcs[0] + rev(arcs[1]), arcs[1] + rev(arcs[2])

    def stem_counts_ok(self):
        """The stem distribution of rooted traversal outputs: two per
        vertex, +1 at the root vertex, -1 at hexagon corners / -2 at the
        square corner (combined when they coincide)."""
        expect = {v: 2 for v in range(self.n)}
        if self.root_after_item is None:
            raise MapError("stem_counts_ok needs a rooted map")
        nxt, prv, marker, start = self.border()
        root_item = int(prv[marker])
        expect[int(self.dart_vertex[root_item])] += 1
        shape = self.shape()
        cs = self.corners()
        if shape == "hexagon":
            for v in cs:
                expect[v] -= 1
        else:
            expect[cs[0]] -= 2
        have = {v: 0 for v in range(self.n)}
        for s in self.stem_items():
            have[int(self.dart_vertex[s])] += 1
        return have == expect

    # -- conversions ----------------------------------------------------------

    def copy(self):
        return UnicellularMap(self.n, self.next_rot.copy(),
                              self.prev_rot.copy(), self.dart_vertex.copy(),
                              self.attached.copy(), self.root_after_item,
                              check=False)

    def invalidate(self):
        self._border = None
        self._walk = None

    def to_map(self) -> TorusMap:
        if not bool(np.all(self.attached)):
            raise MapError("cannot convert: unattached darts remain")
        return TorusMap(self.next_rot, self.dart_vertex, self.n)


# -- TUNI text format ---------------------------------------------------------

def write_tuni(u: UnicellularMap) -> str:
    """Serialize skeleton (TMAP dart syntax, renumbered), stems by their
    rotation slot, and the root by the item before the marked angle.

    Stems are named s0, s1, ... in file order; a stem anchored on another
    stem's slot names it with its s-index.
    """
    edges = u.skeleton_edges()
    edart = {}
    for j, e in enumerate(edges):
        edart[2 * e] = 2 * j
        edart[2 * e + 1] = 2 * j + 1
    stems = [d for d in range(u.nd) if u.is_stem(d)]
    sid = {d: i for i, d in enumerate(stems)}

    def item_name(d):
        return str(edart[d]) if d in edart else f"s{sid[d]}"

    rots = [[] for _ in range(u.n)]
    for v in range(u.n):
        rots[v] = []
    for d in range(u.nd):
        if u.attached[d]:
            rots[int(u.dart_vertex[d])].append(d)
    lines = [f"tuni 1 {u.n}"]
    for v in range(u.n):
        if not rots[v]:
            raise MapError(f"vertex {v} has no items")
        d0 = rots[v][0]
        cyc = [d0]
        d = int(u.next_rot[d0])
        while d != d0:
            cyc.append(d)
            d = int(u.next_rot[d])
        skel = [d for d in cyc if d in edart]
        lines.append("v " + str(v) + " " +
                     " ".join(str(edart[d]) for d in skel))
    for i, s in enumerate(stems):
        p = int(u.prev_rot[s])
        lines.append(f"stem {int(u.dart_vertex[s])} {item_name(p)}")
    if u.root_after_item is not None:
        t = int(u.root_after_item)
        v = int(u.dart_vertex[t])
        lines.append(f"root {v} {item_name(t)}")
    return "\n".join(lines) + "\n"


def parse_tuni(text: str) -> UnicellularMap:
    lines = [ln for ln in text.split("\n") if ln]
    head = lines[0].split(" ")
    if head[:2] != ["tuni", "1"] or len(head) != 3:
        raise MapError(f"bad tuni header: {lines[0]!r}")
    n = int(head[2])
    vlines = [ln for ln in lines[1:] if ln.startswith("v ")]
    slines = [ln for ln in lines[1:] if ln.startswith("stem ")]
    rlines = [ln for ln in lines[1:] if ln.startswith("root ")]
    if len(vlines) != n or len(rlines) > 1:
        raise MapError("bad tuni structure")
    nskel = sum(len(ln.split(" ")) - 2 for ln in vlines)
    if nskel % 2:
        raise MapError("odd skeleton dart count")
    n_stems = len(slines)
    m_total = nskel // 2 + n_stems
    nd = 2 * m_total
    next_rot = np.full(nd, -1, np.int64)
    prev_rot = np.full(nd, -1, np.int64)
    dvert = np.full(nd, -1, np.int64)
    attached = np.zeros(nd, bool)
    # skeleton darts keep their file ids; stems take darts 2k for
    # k = nskel//2 + j (their twins stay unattached)
    stem_dart = [nskel + 2 * j for j in range(n_stems)]
    rots = [None] * n

    def name_to_item(tok):
        if tok.startswith("s"):
            return stem_dart[int(tok[1:])]
        return int(tok)

    for ln in vlines:
        parts = ln.split(" ")
        v = int(parts[1])
        rots[v] = [int(x) for x in parts[2:]]
    for j, ln in enumerate(slines):
        parts = ln.split(" ")
        if len(parts) != 3:
            raise MapError(f"bad stem line: {ln!r}")
        v = int(parts[1])
        anchor = name_to_item(parts[2])
        d = stem_dart[j]
        rot = rots[v]
        if anchor not in rot:
            raise MapError(f"stem anchor {parts[2]} not at vertex {v}")
        rot.insert(rot.index(anchor) + 1, d)
    for v in range(n):
        rot = rots[v]
        for i, d in enumerate(rot):
            nxt = rot[(i + 1) % len(rot)]
            next_rot[d] = nxt
            prev_rot[nxt] = d
            dvert[d] = v
            attached[d] = True
    root_after = None
    if rlines:
        parts = rlines[0].split(" ")
        root_after = name_to_item(parts[2])
    return UnicellularMap(n, next_rot, prev_rot, dvert, attached, root_after)
