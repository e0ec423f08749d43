"""Build an HTC orientation from scratch and pick a valid root angle."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import kernels
from .orientation import Orientation, SchnyderColoring, gamma, is_three_orientation
from .surface import Angle, MapError, TorusMap, Walk


@dataclass
class BuildReport:
    iterations: int
    initial_gamma: tuple
    orientation: Orientation


def initial_three_orientation(g: TorusMap) -> Orientation:
    """A 3-orientation via greedy tail assignment plus augmenting-path
    rebalancing."""
    tail, outdeg = kernels.orient_greedy(g.dart_vertex, g.n)
    status = kernels.rebalance_paths(
        g.dart_vertex, g.vert_off, g.vert_darts, tail, outdeg)
    if status != 0:
        raise MapError("internal error: no 3-orientation")
    return Orientation(g, tail)


def _gamma_deltas(g: TorusMap, b_darts):
    """Per-dart contribution of a reversal to gamma on the cycle b:
    (right - left) sector counts, zeroed on b's own edges."""
    nd = 2 * g.m
    cyc = np.asarray(b_darts, np.int64)
    wl = kernels.left_sector_weights(g.next_ccw, cyc, nd)
    # right sectors are the left sectors of the reversed cycle
    rev = np.asarray([d ^ 1 for d in reversed(b_darts)], np.int64)
    wr = kernels.left_sector_weights(g.next_ccw, rev, nd)
    rl = wr - wl
    for d in b_darts:
        rl[d] = rl[d ^ 1] = 0
    return rl


def make_htc(g: TorusMap, d: Orientation, basis=None):
    """Turn a 3-orientation into an HTC one by reversing non-contractible
    middle cycles that reduce |gamma(b1)| + |gamma(b2)|."""
    if not is_three_orientation(d):
        raise MapError("make_htc needs a 3-orientation")
    if basis is None:
        basis = g.homology_basis()
    b1 = list(basis.b1.darts)
    b2 = list(basis.b2.darts)
    w1, w2 = basis._weights
    rl1 = _gamma_deltas(g, b1)
    rl2 = _gamma_deltas(g, b2)
    cur = d.copy()
    g1 = gamma(cur, basis.b1)
    g2 = gamma(cur, basis.b2)
    report = BuildReport(0, (g1, g2), cur)
    if g1 == 0 and g2 == 0:
        return cur, report

    stamp = np.zeros(g.n, np.int8)
    visit_pos = np.empty(g.n, np.int64)
    path = np.empty(g.n + 1, np.int64)
    nd = 2 * g.m
    attempts = 0
    limit = 64 * g.m
    start = 0
    rng = random.Random(0xC0FFEE)
    while g1 != 0 or g2 != 0:
        if attempts >= limit:
            cyc = _fallback_cycle(g, cur, rl1, rl2, g1, g2, rng)
            if cyc is None:
                raise MapError("htc search exhausted")
        else:
            attempts += 1
            sd = start % nd
            start += 1
            first, t = kernels.middle_walk(
                g.next_ccw, g.dart_vertex, cur.tail, sd, stamp, visit_pos, path)
            for i in range(t):
                stamp[g.dart_vertex[path[i]]] = 0
            if first < 0:
                continue
            cyc = [int(x) for x in path[first:t]]
        d1 = sum(int(rl1[x ^ 1] - rl1[x]) for x in cyc)
        d2 = sum(int(rl2[x ^ 1] - rl2[x]) for x in cyc)
        if abs(g1 + d1) + abs(g2 + d2) < abs(g1) + abs(g2):
            cur = cur.reverse_darts(cyc)
            g1 += d1
            g2 += d2
            report.iterations += 1
    report.orientation = cur
    return cur, report


def _fallback_cycle(g: TorusMap, d: Orientation, rl1, rl2, g1, g2, rng,
                    tries=20000):
    """Sample directed out-walks for a cycle whose reversal strictly
    reduces the gamma potential."""
    out = [[] for _ in range(g.n)]
    for e in range(g.m):
        o = int(d.tail[e])
        out[int(g.dart_vertex[o])].append(o)
    for _ in range(tries):
        v = rng.randrange(g.n)
        pos = {}
        path = []
        while v not in pos:
            pos[v] = len(path)
            o = out[v][rng.randrange(3)]
            path.append(o)
            v = int(g.dart_vertex[o ^ 1])
        cyc = path[pos[v]:]
        d1 = sum(int(rl1[x ^ 1] - rl1[x]) for x in cyc)
        d2 = sum(int(rl2[x ^ 1] - rl2[x]) for x in cyc)
        if abs(g1 + d1) + abs(g2 + d2) < abs(g1) + abs(g2):
            return cyc
    return None


def pick_root(g: TorusMap, c: SchnyderColoring) -> Angle:
    """Root angle at a vertex of a monochromatic cycle.

    Follows the color-0 path from vertex 0 until a vertex repeats; the
    returned angle sits just before the cycle's outgoing dart there, which
    keeps it out of the clockwise interior of every separating triangle.
    """
    g_map = c.orientation.map
    nxt = np.full(g_map.n, -1, np.int64)
    for e in range(g_map.m):
        if c.color[e] == 0:
            o = int(c.orientation.tail[e])
            nxt[int(g_map.dart_vertex[o])] = o
    seen = {}
    v = 0
    while v not in seen:
        seen[v] = True
        v = int(g_map.dart_vertex[nxt[v] ^ 1])
    v0 = v
    d_out = int(nxt[v0])
    return Angle(v0, d_out)


def monochromatic_cycle_through(c: SchnyderColoring, v0: int, color=0) -> Walk:
    """The directed monochromatic cycle through v0 (which must lie on one)."""
    g = c.orientation.map
    nxt = {}
    for e in range(g.m):
        if c.color[e] == color:
            o = int(c.orientation.tail[e])
            nxt[int(g.dart_vertex[o])] = o
    path = []
    v = v0
    while True:
        path.append(nxt[v])
        v = int(g.dart_vertex[nxt[v] ^ 1])
        if v == v0:
            return Walk(tuple(path))
        if len(path) > g.n:
            raise MapError(f"vertex {v0} is not on a color-{color} cycle")
