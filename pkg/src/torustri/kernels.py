"""Array kernels for the hot paths.

All functions here take flat numpy arrays and scalars only, so the same
source runs compiled (numba nopython) or interpreted; see :mod:`torustri._jit`.

Conventions (anchored on the one-vertex and K7 fixtures, see surface.py):

* darts are ``0..2m-1``, ``twin(d) = d ^ 1``, ``edge(d) = d >> 1``;
* ``next_ccw`` / ``prev_ccw`` are the vertex rotations (counterclockwise);
* the face circuit successor is ``sigma(d) = prev_ccw[d ^ 1]``; the face of a
  dart lies on the left of it;
* an orientation is a per-edge tail dart (the edge leaves the tail's vertex);
* at a visit of a directed walk (in-germ g_in = previous dart ^ 1, out-dart
  g_out), the left sector is the set of darts strictly between g_out and
  g_in in ccw order.
"""

import numpy as np

from ._jit import jit


@jit
def face_labels(prev_ccw):
    """Label sigma-orbits.  Returns (face_of, n_faces)."""
    nd = prev_ccw.shape[0]
    face_of = np.full(nd, -1, np.int64)
    nf = 0
    for d0 in range(nd):
        if face_of[d0] >= 0:
            continue
        d = d0
        while face_of[d] < 0:
            face_of[d] = nf
            d = prev_ccw[d ^ 1]
        nf += 1
    return face_of, nf


@jit
def ps_walk(next_ccw, tail, d0):
    """Run the angle-walk traversal from state dart d0.

    Returns (states, cases, count).  states[i] is the dart considered at
    step i; cases[i] in 1..4: 1 = unmarked entering (keep edge), 2 = unmarked
    leaving (stem), 3 = marked entering, 4 = marked leaving.
    """
    nd = next_ccw.shape[0]
    marked = np.zeros(nd >> 1, np.bool_)
    states = np.empty(nd, np.int64)
    cases = np.empty(nd, np.int8)
    d = d0
    t = 0
    while True:
        e = d >> 1
        leaving = tail[e] == d
        if not marked[e]:
            c = 2 if leaving else 1
        else:
            c = 4 if leaving else 3
        states[t] = d
        cases[t] = c
        t += 1
        marked[e] = True
        if c == 1 or c == 4:
            d = next_ccw[d ^ 1]
        else:
            d = next_ccw[d]
        if d == d0:
            break
        if t >= nd:
            return states, cases, -1  # unreachable: angles are not revisited
    return states, cases, t


@jit
def orient_greedy(dart_vertex, n):
    """Greedy tail assignment: each edge picks the endpoint with the smaller
    out-degree so far.  Returns (tail, outdeg)."""
    nd = dart_vertex.shape[0]
    m = nd >> 1
    tail = np.empty(m, np.int64)
    outdeg = np.zeros(n, np.int64)
    for e in range(m):
        a = dart_vertex[2 * e]
        b = dart_vertex[2 * e + 1]
        if outdeg[a] <= outdeg[b]:
            tail[e] = 2 * e
            outdeg[a] += 1
        else:
            tail[e] = 2 * e + 1
            outdeg[b] += 1
    return tail, outdeg


@jit
def rebalance_paths(dart_vertex, vert_off, vert_darts, tail, outdeg):
    """Fix out-degrees to 3 everywhere by reversing directed paths from
    surplus to deficit vertices.  Each round runs one multi-source BFS and
    harvests as many edge-disjoint paths as it can.  Returns 0 on success,
    1 if no augmenting path exists (an invalid input map)."""
    n = outdeg.shape[0]
    m = tail.shape[0]
    parent = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    deficits = np.empty(n, np.int64)
    used = np.zeros(m, np.bool_)
    while True:
        qn = 0
        surplus = 0
        for v in range(n):
            parent[v] = -1
            if outdeg[v] > 3:
                queue[qn] = v
                qn += 1
                parent[v] = -2
                surplus += outdeg[v] - 3
        if qn == 0:
            return 0
        ndef = 0
        qi = 0
        while qi < qn:
            v = queue[qi]
            qi += 1
            for k in range(vert_off[v], vert_off[v + 1]):
                d = vert_darts[k]
                if tail[d >> 1] != d:
                    continue
                w = dart_vertex[d ^ 1]
                if parent[w] != -1:
                    continue
                parent[w] = d
                if outdeg[w] < 3:
                    deficits[ndef] = w
                    ndef += 1
                queue[qn] = w
                qn += 1
        if ndef == 0:
            return 1
        progress = 0
        for i in range(ndef):
            w = deficits[i]
            if outdeg[w] >= 3:
                continue
            # trial walk to a still-surplus vertex over unused parent edges
            x = w
            ok = True
            while outdeg[x] <= 3:
                d = parent[x]
                if d < 0 or used[d >> 1]:
                    ok = False
                    break
                x = dart_vertex[d]
            if not ok:
                continue
            x = w
            outdeg[x] += 1
            while True:
                d = parent[x]
                used[d >> 1] = True
                tail[d >> 1] = d ^ 1
                x = dart_vertex[d]
                if outdeg[x] > 3:
                    outdeg[x] -= 1
                    break
            progress += 1
        if progress == 0:
            return 1
        for e in range(m):
            used[e] = False


@jit
def minimize_cuts(face_of, tail, f0, nfaces):
    """Reverse dual directed cuts until every face has a directed path to f0
    in the dual orientation; mutates tail in place.

    The dual of an edge with tail dart o runs from the face on its left to
    the face on its right: face_of[o] -> face_of[o ^ 1].  Returns the number
    of cut rounds (-1 on a disconnected dual, which valid maps never have).
    """
    m = tail.shape[0]
    # CSR of primal edges around faces
    off = np.zeros(nfaces + 1, np.int64)
    for e in range(m):
        off[face_of[2 * e] + 1] += 1
        off[face_of[2 * e + 1] + 1] += 1
    for i in range(nfaces):
        off[i + 1] += off[i]
    inc = np.empty(2 * m, np.int64)
    pos = off.copy()
    for e in range(m):
        a = face_of[2 * e]
        b = face_of[2 * e + 1]
        inc[pos[a]] = e
        pos[a] += 1
        inc[pos[b]] = e
        pos[b] += 1

    in_x = np.zeros(nfaces, np.bool_)
    queue = np.empty(nfaces, np.int64)
    boundary = np.empty(2 * m + 1, np.int64)
    nb = 0
    rounds = 0

    in_x[f0] = True
    queue[0] = f0
    qn = 1
    qi = 0
    reached = 1
    while True:
        while qi < qn:
            g = queue[qi]
            qi += 1
            for k in range(off[g], off[g + 1]):
                e = inc[k]
                o = tail[e]
                src = face_of[o]
                dst = face_of[o ^ 1]
                if dst == g and not in_x[src]:
                    in_x[src] = True
                    queue[qn] = src
                    qn += 1
                    reached += 1
                elif src == g and not in_x[dst]:
                    boundary[nb] = e
                    nb += 1
        if reached >= nfaces:
            return rounds
        # round: the cut is every boundary edge still crossing out of X;
        # collect it whole before reversing anything
        rounds += 1
        ncut = 0
        nb2 = 0
        for k in range(nb):
            e = boundary[k]
            o = tail[e]
            src = face_of[o]
            dst = face_of[o ^ 1]
            if in_x[src] and not in_x[dst]:
                boundary[2 * m - ncut] = e
                ncut += 1
            elif in_x[src] != in_x[dst]:
                boundary[nb2] = e
                nb2 += 1
        nb = nb2
        if ncut == 0:
            return -1
        for k in range(ncut):
            e = boundary[2 * m - k]
            o = tail[e]
            dst = face_of[o ^ 1]
            tail[e] = o ^ 1
            if not in_x[dst]:
                in_x[dst] = True
                queue[qn] = dst
                qn += 1
                reached += 1


@jit
def dual_reaches_all(face_of, tail, f0, nfaces):
    """True iff every dual vertex has a directed path to f0."""
    m = tail.shape[0]
    in_x = np.zeros(nfaces, np.bool_)
    queue = np.empty(nfaces, np.int64)
    in_x[f0] = True
    queue[0] = f0
    qn = 1
    qi = 0
    reached = 1
    while qi < qn:
        g = queue[qi]
        qi += 1
        for e in range(m):
            o = tail[e]
            if face_of[o ^ 1] == g:
                h = face_of[o]
                if not in_x[h]:
                    in_x[h] = True
                    queue[qn] = h
                    qn += 1
                    reached += 1
    return reached == nfaces


@jit
def color_propagate(next_ccw, dart_vertex, vert_off, vert_darts, tail, n):
    """Propagate per-vertex color offsets across edges.

    Returns (color, status, where): status 0 ok, 1 conflict, 2 bad local
    structure; on failure, `where` names the offending vertex.
    """
    nd = next_ccw.shape[0]
    m = nd >> 1
    rank = np.full(nd, -1, np.int64)   # out-darts: 0,1,2 ccw from the anchor
    gap = np.full(nd, -1, np.int64)    # in-darts: index of preceding out-dart
    for v in range(n):
        a = -1
        for k in range(vert_off[v], vert_off[v + 1]):
            d = vert_darts[k]
            if tail[d >> 1] == d and (a < 0 or d < a):
                a = d
        if a < 0:
            return np.empty(0, np.int64), 2, v
        r = 0
        d = a
        for _ in range(vert_off[v + 1] - vert_off[v]):
            if tail[d >> 1] == d:
                rank[d] = r
                r += 1
            else:
                gap[d] = r - 1
            d = next_ccw[d]
        if r != 3:
            return np.empty(0, np.int64), 2, v
    # an edge with tail dart o constrains x[tail] - x[head] =
    # gap[o^1] - rank[o] - 1 (mod 3)
    x = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for v0 in range(n):
        if x[v0] >= 0:
            continue
        x[v0] = 0
        queue[0] = v0
        qn = 1
        qi = 0
        while qi < qn:
            v = queue[qi]
            qi += 1
            for k in range(vert_off[v], vert_off[v + 1]):
                d = vert_darts[k]
                o = tail[d >> 1]
                u = dart_vertex[o]
                w = dart_vertex[o ^ 1]
                need = (gap[o ^ 1] - rank[o] - 1) % 3
                if x[u] >= 0 and x[w] >= 0:
                    if (x[u] - x[w]) % 3 != need:
                        return np.empty(0, np.int64), 1, v
                elif x[u] >= 0:
                    x[w] = (x[u] - need) % 3
                    queue[qn] = w
                    qn += 1
                elif x[w] >= 0:
                    x[u] = (x[w] + need) % 3
                    queue[qn] = u
                    qn += 1
    color = np.empty(m, np.int64)
    for e in range(m):
        o = tail[e]
        color[e] = (x[dart_vertex[o]] + rank[o]) % 3
    return color, 0, -1


@jit
def left_sector_weights(next_ccw, cyc, nd):
    """Crossing cochain of a closed walk: w[x] counts how often dart x lies
    strictly inside a left sector of the walk."""
    w = np.zeros(nd, np.int64)
    k = cyc.shape[0]
    for i in range(k):
        g_in = cyc[i] ^ 1
        g_out = cyc[(i + 1) % k]
        if g_out == g_in:
            continue  # U-turn hugs the edge: no crossings at this visit
        x = next_ccw[g_out]
        while x != g_in:
            w[x] += 1
            x = next_ccw[x]
    return w


@jit
def walk_signature(w, walk):
    """Signed crossing number of a closed walk against the cochain w."""
    s = 0
    for i in range(walk.shape[0]):
        d = walk[i]
        s += w[d] - w[d ^ 1]
    return s


@jit
def gamma_of_cycle(next_ccw, tail, on_cycle_edge, cyc):
    """gamma = (#edges leaving on the right) - (#edges leaving on the left)
    for a cycle given as a dart sequence with a traversal direction."""
    k = cyc.shape[0]
    right = 0
    left = 0
    for i in range(k):
        g_in = cyc[i] ^ 1
        g_out = cyc[(i + 1) % k]
        if g_out == g_in:
            continue
        x = next_ccw[g_out]
        while x != g_in:
            if not on_cycle_edge[x >> 1] and tail[x >> 1] == x:
                left += 1
            x = next_ccw[x]
        x = next_ccw[g_in]
        while x != g_out:
            if not on_cycle_edge[x >> 1] and tail[x >> 1] == x:
                right += 1
            x = next_ccw[x]
    return right - left


@jit
def middle_walk(next_ccw, dart_vertex, tail, start, stamp, visit_pos, path):
    """Follow the middle path from an out-dart until a vertex repeats.

    Writes the walk into path; returns (first, t) so that path[first:t] is
    the terminal cycle and path[:t] the full walk (for clearing stamps).
    Returns (-1, 0) if start is not an out-dart, (-2, t) if some vertex has
    out-degree < 2 (not a 3-orientation).
    """
    if tail[start >> 1] != start:
        return -1, 0
    d = start
    t = 0
    while True:
        v = dart_vertex[d]
        if stamp[v] != 0:
            return visit_pos[v], t
        stamp[v] = 1
        visit_pos[v] = t
        path[t] = d
        t += 1
        g = d ^ 1
        x = next_ccw[g]
        cnt = 0
        nxt = -1
        while x != g:
            if tail[x >> 1] == x:
                cnt += 1
                if cnt == 2:
                    nxt = x
                    break
            x = next_ccw[x]
        if nxt < 0:
            return -2, t
        d = nxt


@jit
def closure_run(next_rot, prev_rot, nxt_b, prv_b, attached, is_stem,
                dart_vertex, marker_id, start, has_marker, n_close):
    """Close stems on the special-face border.

    The border lists nxt_b/prv_b run in face-circuit (sigma) order and, when
    has_marker != 0, include the root-marker pseudo-item marker_id.  Each
    closure finds the first stem s ahead of the cursor whose two preceding
    border items are attached skeleton darts, and splices the run
    [x1, x2, s] into the new dart of the reattached edge.

    Returns (closed, wrapped): stems closed, and whether any closure
    consumed the marker position (balanced inputs never wrap).  Returns
    closed = -1 when stuck.  Mutates all list arrays in place.
    """
    closed = 0
    wrapped = 0
    cursor = nxt_b[marker_id] if has_marker != 0 else start
    steps = 0
    limit = 8 * next_rot.shape[0] + 64
    while closed < n_close:
        steps += 1
        if steps > limit:
            return -1, wrapped
        if (has_marker != 0 and cursor == marker_id) or not is_stem[cursor]:
            cursor = nxt_b[cursor]
            continue
        s = cursor
        saw_marker = 0
        x2 = prv_b[s]
        if has_marker != 0 and x2 == marker_id:
            saw_marker = 1
            x2 = prv_b[x2]
        x1 = prv_b[x2]
        if has_marker != 0 and x1 == marker_id:
            saw_marker = 1
            x1 = prv_b[x1]
        if is_stem[x1] or is_stem[x2] or x1 == s or x2 == s:
            cursor = nxt_b[s]
            continue
        if saw_marker != 0:
            wrapped = 1
        h = s ^ 1
        # rotation: insert h immediately ccw-after x1
        v = dart_vertex[x1]
        dart_vertex[h] = v
        nx = next_rot[x1]
        next_rot[x1] = h
        prev_rot[h] = x1
        next_rot[h] = nx
        prev_rot[nx] = h
        attached[h] = True
        is_stem[s] = False
        # border: replace [x1, x2, s] by [h]
        after = nxt_b[s]
        before = prv_b[x1]
        if saw_marker != 0 and before == marker_id:
            before = prv_b[before]
        if saw_marker != 0:
            nxt_b[before] = marker_id
            prv_b[marker_id] = before
            nxt_b[marker_id] = h
            prv_b[h] = marker_id
        else:
            nxt_b[before] = h
            prv_b[h] = before
        nxt_b[h] = after
        prv_b[after] = h
        closed += 1
        cursor = after
    return closed, wrapped


@jit
def enum_orients(ea, eb, n, m, out):
    """All 2^m edge-direction assignments filtered to out-degree 3.

    Bit e of a mask set means edge e leaves eb[e]; clear means it leaves
    ea[e].  Masks are written into out unless it is empty (count-only pass);
    returns the count.
    """
    outdeg = np.empty(n, np.int64)
    store = out.shape[0] > 0
    cnt = 0
    for mask in range(1 << m):
        for v in range(n):
            outdeg[v] = 0
        ok = True
        for e in range(m):
            if (mask >> e) & 1:
                v = eb[e]
            else:
                v = ea[e]
            outdeg[v] += 1
            if outdeg[v] > 3:
                ok = False
                break
        if ok:
            good = True
            for v in range(n):
                if outdeg[v] != 3:
                    good = False
                    break
            if good:
                if store:
                    out[cnt] = mask
                cnt += 1
    return cnt


@jit
def scan_cw_subgraph(d_mask, bound_masks, req_masks, skip_flags):
    """True iff some face subset (not skipped) is a clockwise 0-homologous
    oriented subgraph of the orientation encoded by d_mask: every boundary
    edge of the subset is directed as req within bound."""
    ns = bound_masks.shape[0]
    for s in range(ns):
        if skip_flags[s]:
            continue
        b = bound_masks[s]
        if b == 0:
            continue
        if (d_mask & b) == req_masks[s]:
            return True
    return False


@jit
def border_walk(prev_rot, attached, start, out):
    """Face-circuit order of the attached items from `start`: successor is
    prev_rot[twin] for skeleton darts and prev_rot[self] for stems.
    Returns the item count (-1 if the orbit overflows `out`)."""
    t = start
    k = 0
    while True:
        out[k] = t
        k += 1
        tw = t ^ 1
        if attached[tw]:
            t = prev_rot[tw]
        else:
            t = prev_rot[t]
        if t == start:
            return k
        if k >= out.shape[0]:
            return -1


@jit
def submap_rotation(dart_vertex, vert_off, vert_darts, attached, n):
    """Per-vertex rotation linked lists restricted to attached darts."""
    nd = dart_vertex.shape[0]
    next_rot = np.full(nd, -1, np.int64)
    prev_rot = np.full(nd, -1, np.int64)
    for v in range(n):
        first = -1
        last = -1
        for k in range(vert_off[v], vert_off[v + 1]):
            d = vert_darts[k]
            if not attached[d]:
                continue
            if first < 0:
                first = d
            else:
                next_rot[last] = d
                prev_rot[d] = last
            last = d
        if first >= 0:
            next_rot[last] = first
            prev_rot[first] = last
    return next_rot, prev_rot


@jit
def walk_orientation(walk_ps, dart_vertex, attached, n, root_vertex,
                     tails, tree):
    """First-met sides along the traversal order: fills per-edge tail darts
    and flags the discovery-tree edges (first-met skeleton edges reaching a
    new vertex)."""
    visited = np.zeros(n, np.bool_)
    visited[root_vertex] = True
    for i in range(walk_ps.shape[0]):
        t = walk_ps[i]
        e = t >> 1
        if tails[e] >= 0:
            continue
        tails[e] = t
        if attached[t ^ 1]:
            v = dart_vertex[t]
            if not visited[v]:
                visited[v] = True
                tree[e] = True


@jit
def dual_tree_keep(face_of, nfaces):
    """Spanning tree of the dual by BFS; keep = primal edges whose dual is
    not a tree edge."""
    nd = face_of.shape[0]
    m = nd >> 1
    off = np.zeros(nfaces + 1, np.int64)
    for d in range(nd):
        off[face_of[d] + 1] += 1
    for i in range(nfaces):
        off[i + 1] += off[i]
    inc = np.empty(nd, np.int64)
    pos = off.copy()
    for d in range(nd):
        f = face_of[d]
        inc[pos[f]] = d
        pos[f] += 1
    keep = np.ones(m, np.bool_)
    seen = np.zeros(nfaces, np.bool_)
    queue = np.empty(nfaces, np.int64)
    seen[0] = True
    queue[0] = 0
    qn = 1
    qi = 0
    while qi < qn:
        g = queue[qi]
        qi += 1
        for k in range(off[g], off[g + 1]):
            d = inc[k]
            h = face_of[d ^ 1]
            if not seen[h]:
                seen[h] = True
                keep[d >> 1] = False
                queue[qn] = h
                qn += 1
    return keep


@jit
def trim_degree_one(core, dart_vertex, vert_off, vert_darts):
    """Iteratively delete degree-1 vertices from the kept subgraph."""
    n = vert_off.shape[0] - 1
    deg = np.zeros(n, np.int64)
    for v in range(n):
        for k in range(vert_off[v], vert_off[v + 1]):
            d = vert_darts[k]
            if core[d >> 1]:
                deg[v] += 1
    stack = np.empty(n, np.int64)
    sn = 0
    for v in range(n):
        if deg[v] == 1:
            stack[sn] = v
            sn += 1
    while sn > 0:
        sn -= 1
        v = stack[sn]
        if deg[v] != 1:
            continue
        for k in range(vert_off[v], vert_off[v + 1]):
            d = vert_darts[k]
            if core[d >> 1]:
                core[d >> 1] = False
                deg[v] -= 1
                u = dart_vertex[d ^ 1]
                deg[u] -= 1
                if deg[u] == 1:
                    stack[sn] = u
                    sn += 1
                break
    return core


@jit
def dual_forest_check(face_of, q_edges, nfaces):
    """(has_cycle, n_components) of the dual subgraph on the given edges."""
    parent = np.arange(nfaces)
    cyc = 0
    for i in range(q_edges.shape[0]):
        e = q_edges[i]
        a = face_of[2 * e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = face_of[2 * e + 1]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            cyc = 1
        else:
            parent[a] = b
    ncomp = 0
    for x in range(nfaces):
        if parent[x] == x:
            ncomp += 1
    return cyc, ncomp


@jit
def canon_transcript(next_ccw, root, out):
    """Canonical transcript of a rooted rotation system.

    Darts are labeled in deterministic discovery order from the root
    (following next_ccw first, then twin); the transcript lists, for each
    dart in label order, the labels of its next_ccw and twin darts.  Equal
    transcripts <=> rooted-isomorphic maps.
    """
    nd = next_ccw.shape[0]
    label = np.full(nd, -1, np.int64)
    order = np.empty(nd, np.int64)
    label[root] = 0
    order[0] = root
    filled = 1
    i = 0
    while i < filled:
        d = order[i]
        a = next_ccw[d]
        if label[a] < 0:
            label[a] = filled
            order[filled] = a
            filled += 1
        b = d ^ 1
        if label[b] < 0:
            label[b] = filled
            order[filled] = b
            filled += 1
        i += 1
    for i in range(nd):
        d = order[i]
        out[2 * i] = label[next_ccw[d]]
        out[2 * i + 1] = label[d ^ 1]
    return filled
