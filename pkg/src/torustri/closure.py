"""Stem closure: recover triangulations from unicellular maps with stems.

An admissible triple is a run [x1, x2, s] of consecutive border items in
face-circuit order with x1, x2 skeleton darts and s a stem.  Closing it
attaches the stem's missing dart immediately ccw-after x1, forming a
triangular face on the left of the stem's edge, and splices the run into
the new dart on the border.  The border keeps three more edges than stems
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .surface import MapError, TorusMap
from .unicellular import UnicellularMap


class SpecialFaceState:
    """Mutable closure state over a working copy of a unicellular map."""

    def __init__(self, u: UnicellularMap, rooted=True):
        self.u = u.copy()
        if rooted and u.root_after_item is None:
            raise MapError("rooted closure needs a root angle")
        if not rooted:
            self.u.root_after_item = None
        nxt, prv, marker, start = self.u.border()
        self.nxt_b = nxt.copy()
        self.prv_b = prv.copy()
        self.marker = marker
        self.start = start
        self.rooted = rooted
        self.is_stem = np.zeros(self.u.nd + 1, bool)
        for t in self.u.stem_items():
            self.is_stem[t] = True
        self.stems_left = int(self.is_stem.sum())
        self.wrapped = False

    def border_items(self):
        out = []
        t = first = self.start
        while True:
            if t != self.marker:
                out.append(int(t))
            t = int(self.nxt_b[t])
            if t == first:
                return out

    def border_counts(self):
        items = self.border_items()
        stems = sum(1 for t in items if self.is_stem[t])
        return len(items) - stems, stems

    def _prv_skip(self, t):
        p = int(self.prv_b[t])
        saw = False
        if self.rooted and p == self.marker:
            saw = True
            p = int(self.prv_b[p])
        return p, saw

    def admissible_triples(self):
        """All runs [x1, x2, s] currently closable (marker-transparent)."""
        out = []
        for s in self.border_items():
            if not self.is_stem[s]:
                continue
            x2, m1 = self._prv_skip(s)
            x1, m2 = self._prv_skip(x2)
            if (not self.is_stem[x1] and not self.is_stem[x2]
                    and x1 != s and x2 != s):
                out.append((int(x1), int(x2), int(s)))
        return out

    def close(self, triple):
        """Close one admissible triple (error when not admissible)."""
        x1, x2, s = triple
        if not self.is_stem[s] or self.is_stem[x1] or self.is_stem[x2]:
            raise MapError("not admissible: need (edge, edge, stem)")
        p2, m1 = self._prv_skip(s)
        p1, m2 = self._prv_skip(p2)
        if (p2, p1) != (x2, x1):
            raise MapError("not admissible: items not consecutive")
        if m1 or m2:
            self.wrapped = True
        u = self.u
        h = s ^ 1
        v = int(u.dart_vertex[x1])
        u.dart_vertex[h] = v
        nx = int(u.next_rot[x1])
        u.next_rot[x1] = h
        u.prev_rot[h] = x1
        u.next_rot[h] = nx
        u.prev_rot[nx] = h
        u.attached[h] = True
        self.is_stem[s] = False
        after = int(self.nxt_b[s])
        before = int(self.prv_b[x1])
        if (m1 or m2) and before == self.marker:
            before = int(self.prv_b[before])
        if m1 or m2:
            self.nxt_b[before] = self.marker
            self.prv_b[self.marker] = before
            self.nxt_b[self.marker] = h
            self.prv_b[h] = self.marker
        else:
            self.nxt_b[before] = h
            self.prv_b[h] = before
        self.nxt_b[h] = after
        self.prv_b[after] = h
        self.stems_left -= 1
        if self.start in (x1, x2, s):
            self.start = h

    def to_map(self) -> TorusMap:
        if self.stems_left:
            raise MapError(f"{self.stems_left} stems not closed")
        u = self.u
        u.attached[:] = True
        return TorusMap(u.next_rot, u.dart_vertex, u.n)


def close_one(state: SpecialFaceState, triple):
    """Close a single admissible triple on the running closure state."""
    state.close(triple)
    return state


def _run_closure(u: UnicellularMap, rooted: bool):
    work = u.copy()
    if not rooted:
        work.root_after_item = None
    nxt, prv, marker, start = work.border()
    nxt = nxt.copy()
    prv = prv.copy()
    is_stem = np.zeros(work.nd + 1, bool)
    n_close = 0
    for t in work.stem_items():
        is_stem[t] = True
        n_close += 1
    closed, wrapped = kernels.closure_run(
        work.next_rot, work.prev_rot, nxt, prv, work.attached, is_stem,
        work.dart_vertex, marker, start, 1 if rooted else 0, n_close)
    work.invalidate()
    return work, int(closed), n_close, bool(wrapped)


def recover_rooted(u: UnicellularMap) -> TorusMap:
    """Single-pass recovery: walk the border from the root angle and close
    each stem as it is met."""
    work, closed, n_close, wrapped = _run_closure(u, rooted=True)
    if closed != n_close:
        raise MapError("not admissible: closure stalled")
    if wrapped:
        raise MapError("not balanced: a closure wrapped over the root angle")
    work.attached[:] = True
    return TorusMap(work.next_rot, work.dart_vertex, work.n)


def recover_unrooted(u: UnicellularMap) -> TorusMap:
    """Root-free recovery: walk the border (up to twice) closing admissible
    triples as they are encountered."""
    work, closed, n_close, _ = _run_closure(u, rooted=False)
    if closed != n_close:
        raise MapError("not admissible: closure stalled")
    work.attached[:] = True
    return TorusMap(work.next_rot, work.dart_vertex, work.n)


def orientation_and_tree(u: UnicellularMap):
    """Directions induced by the root plus the discovery tree.

    Stems point out of their vertex; walking the border against circuit
    order from the root angle (the traversal's visit order), the first-met
    side of each skeleton edge is its tail, and first-met edges that reach
    a new vertex form the spanning tree toward the root.  Returns
    (tails, tree_flags) per edge (-1 / False where the edge is absent).
    """
    if u.root_after_item is None:
        raise MapError("orientation needs a root angle")
    walk = u._walk_order()
    ps_order = walk[::-1].copy()
    tails = np.full(u.nd // 2, -1, np.int64)
    tree = np.zeros(u.nd // 2, bool)
    root_vertex = int(u.dart_vertex[ps_order[0]])
    kernels.walk_orientation(ps_order, u.dart_vertex, u.attached, u.n,
                             root_vertex, tails, tree)
    return tails, tree


def orient_from_root(u: UnicellularMap):
    """Per-edge tail darts induced by the root (see orientation_and_tree)."""
    return orientation_and_tree(u)[0]


@dataclass
class ClassReport:
    in_U_r: bool
    balanced: bool
    gamma0: bool


def validate_class(u: UnicellularMap) -> ClassReport:
    """Membership report for the traversal-image class of rooted
    unicellular maps."""
    n = u.n
    in_u_r = False
    try:
        skeleton = u.skeleton_edges()
        stems = u.stem_items()
        covered = set()
        for e in skeleton:
            covered.add(int(u.dart_vertex[2 * e]))
            covered.add(int(u.dart_vertex[2 * e + 1]))
        in_u_r = (len(skeleton) == n + 1 and len(stems) == 2 * n - 1
                  and u.face_count() == 1
                  and (covered == set(range(n)) or n == 1)
                  and u.shape() in ("hexagon", "square")
                  and u.stem_counts_ok())
    except MapError:
        in_u_r = False
    try:
        _, closed, n_close, wrapped = _run_closure(u, rooted=True)
        balanced = closed == n_close and not wrapped
    except MapError:
        balanced = False
    gamma0 = compute_gamma0(u, stems_only=False)
    return ClassReport(in_u_r, balanced, gamma0)


def compute_gamma0(u: UnicellularMap, stems_only: bool) -> bool:
    """gamma = 0 on both core cycles; edges oriented from the root unless
    stems_only (then only stems count, no root needed)."""
    if stems_only:
        tails = np.full(u.nd // 2, -1, np.int64)
        for s in u.stem_items():
            tails[s >> 1] = s
    else:
        tails = orient_from_root(u)
        for s in u.stem_items():
            tails[s >> 1] = s
    b1, b2 = u.core_cycles()
    for cyc in (b1, b2):
        on_cycle = np.zeros(u.nd // 2, bool)
        for d in cyc:
            on_cycle[d >> 1] = True
        val = int(kernels.gamma_of_cycle(
            u.next_rot, tails, on_cycle, np.asarray(cyc, np.int64)))
        if val != 0:
            return False
    return True


def strip_root_stem(u: UnicellularMap) -> UnicellularMap:
    """Remove the root stem (the stem just before the root angle); the
    result is unrooted with one unattached edge left for completion."""
    nxt, prv, marker, start = u.border()
    s0 = int(prv[marker])
    if not u.is_stem(s0):
        raise MapError("root stem absent")
    work = u.copy()
    work.root_after_item = None
    p, nx = int(work.prev_rot[s0]), int(work.next_rot[s0])
    work.next_rot[p] = nx
    work.prev_rot[nx] = p
    work.attached[s0] = False
    work.invalidate()
    return work


def complete_quadrangle(u2: UnicellularMap, choice: int) -> TorusMap:
    """Close all stems of a stripped map, then finish the final quadrangle
    in one of the four pivot positions (0..3)."""
    if not 0 <= choice < 4:
        raise MapError("choice must be in 0..3")
    free = [e for e in range(u2.nd // 2)
            if not u2.attached[2 * e] and not u2.attached[2 * e + 1]]
    if len(free) != 1:
        raise MapError(f"expected one free edge, found {len(free)}")
    work, closed, n_close, _ = _run_closure(u2, rooted=False)
    if closed != n_close:
        raise MapError("not admissible: closure stalled")
    # the special face is now the unique quadrangular sigma orbit
    seen = set()
    quads = []
    for t0 in range(work.nd):
        if not work.attached[t0] or t0 in seen:
            continue
        cyc = [t0]
        seen.add(t0)
        t = work.sigma(t0)
        while t != t0:
            cyc.append(t)
            seen.add(t)
            t = work.sigma(t)
        if len(cyc) == 4:
            quads.append(cyc)
    if len(quads) != 1:
        raise MapError(f"expected one quadrangle, found {len(quads)}")
    quad = quads[0]
    s = 2 * free[0]
    qk = quad[choice]
    qk1 = quad[(choice + 1) % 4]
    # stem tail into the corner after quad[choice]: rotation slot after qk1
    nx = int(work.next_rot[qk1])
    work.next_rot[qk1] = s
    work.prev_rot[s] = qk1
    work.next_rot[s] = nx
    work.prev_rot[nx] = s
    work.attached[s] = True
    work.dart_vertex[s] = work.dart_vertex[qk1]
    work.invalidate()
    work.root_after_item = s
    final = recover_rooted(work)
    return final
