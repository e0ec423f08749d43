"""Bit-exact optimal codec: triangulation <-> TPS1 container.

Encoding runs the full pipeline: homology basis, 3-orientation, HTC fixing,
root choice, minimization, traversal, special-edge cutting, the 4n-2 bit
tree word, and its big-integer rank.  Decoding inverts every stage and ends
with the rooted closure.

Container layout (see README): magic "TPS1", version 0x01, LEB128 n, then a
bitstream: four metadata fields of ceil(log2(8n)) bits each (two stem
indices, then two reattachment corners), the payload rank in
ceil(log2 C(4n-2, n-1)) bits, zero-padded to a byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .enumerative import binom, word_rank, word_unrank
from .minimize import is_minimal, minimize
from .orientation import color_edges
from .schnyder import initial_three_orientation, make_htc, pick_root
from .surface import MapError, TorusMap
from .traversal import check_unicellular, run_ps
from .closure import orient_from_root, recover_rooted
from .unicellular import UnicellularMap

MAGIC = b"TPS1"
VERSION = 1


@dataclass
class TreeWithStems:
    """Rooted plane tree with exactly two stems per vertex."""
    u: UnicellularMap

    @property
    def n(self):
        return self.u.n

    def walk_length(self):
        return len(self.u.face_walk())


@dataclass
class CodeWord:
    n: int
    stem_indices: tuple       # positions of the two cut edges' stems
    targets: tuple            # reattachment corners, in face-walk indexing
    payload_rank: int

    def payload_bits(self):
        return payload_bit_length(self.n)

    def meta_width(self):
        return meta_field_width(self.n)


def payload_bit_length(n: int) -> int:
    return (binom(4 * n - 2, n - 1) - 1).bit_length()


def meta_field_width(n: int) -> int:
    return max(1, (8 * n - 1).bit_length())


class _stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, et, ev, tb):
        if et is not None and issubclass(et, MapError) \
                and not str(ev).startswith("stage:"):
            raise MapError(f"stage: {self.name}, error: {ev}") from ev
        return False


# -- cutting and reattaching the special edges --------------------------------

def tree_edges_of(u: UnicellularMap):
    """The discovery tree: walking the border in traversal order from the
    root, each vertex's first-met skeleton edge is its parent edge."""
    nxt, prv, marker, start = u.border()
    root_item = int(prv[marker])
    visited = {int(u.dart_vertex[root_item])}
    tree = set()
    seen_edges = set()
    t = root_item
    first = t
    while True:
        if t != marker and u.attached[t ^ 1]:
            e = t >> 1
            if e not in seen_edges:
                seen_edges.add(e)
                v = int(u.dart_vertex[t])
                if v not in visited:
                    visited.add(v)
                    tree.add(e)
        t = int(prv[t])
        if t == first:
            break
    return tree


def cut_special_edges(u: UnicellularMap):
    """Cut the two non-tree skeleton edges into stems, drop the root stem,
    and report where everything goes back.

    Returns (TreeWithStems, CodeWord-without-rank).
    """
    if u.root_after_item is None:
        raise MapError("cut needs a rooted unicellular map")
    tails = orient_from_root(u)
    tree = tree_edges_of(u)
    specials = [e for e in u.skeleton_edges() if e not in tree]
    if len(specials) != 2:
        raise MapError(f"no spanning tree toward root: "
                       f"{len(specials)} non-tree edges")
    work = u.copy()
    heads = [int(tails[e]) ^ 1 for e in specials]
    for h in heads:
        p, nx = int(work.prev_rot[h]), int(work.next_rot[h])
        work.next_rot[p] = nx
        work.prev_rot[nx] = p
        work.attached[h] = False
    work.invalidate()
    # enumerate the walk of the tree plus all stems (root stem included)
    walk = work.face_walk()
    pos = {t: i for i, t in enumerate(walk)}
    k = len(walk)
    if k != 4 * u.n - 1:
        raise MapError("not unicellular after cutting")
    stems = [t for t in walk if work.is_stem(t)]
    stem_pos = {t: i for i, t in enumerate(stems)}
    nxt, prv, marker, start = work.border()
    s0 = int(prv[marker])
    if not work.is_stem(s0):
        raise MapError("no spanning tree toward root: root stem absent")
    pairs = sorted(
        (stem_pos[int(tails[e])], e, h)
        for e, h in zip(specials, heads))
    (i1, e1, h1), (i2, e2, h2) = pairs
    a1 = int(u.prev_rot[h1])
    while a1 in (h1, h2):
        a1 = int(u.prev_rot[a1])
    t1 = (pos[a1] - 1) % k
    a2 = int(u.prev_rot[h2])
    if a2 == h1:
        t2 = k  # immediately after the first special's reattached dart
    else:
        while a2 in (h1, h2):
            a2 = int(u.prev_rot[a2])
        t2 = (pos[a2] - 1) % k
    meta = CodeWord(u.n, (i1, i2), (t1, t2), -1)
    # drop the root stem; the root angle keeps its border slot
    w0 = int(prv[s0])
    p, nx = int(work.prev_rot[s0]), int(work.next_rot[s0])
    work.next_rot[p] = nx
    work.prev_rot[nx] = p
    work.attached[s0] = False
    work.invalidate()
    work.root_after_item = w0
    return TreeWithStems(work), meta


def reattach_special_edges(tree: TreeWithStems, meta: CodeWord) -> UnicellularMap:
    """Inverse of cut_special_edges: put the root stem back at the root
    angle, then rebuild the two special edges from the stored indices."""
    u = tree.u.copy()
    n = u.n
    free = [e for e in range(u.nd // 2)
            if not u.attached[2 * e] and not u.attached[2 * e + 1]]
    if len(free) != 1:
        raise MapError(f"expected one free edge for the root stem, "
                       f"found {len(free)}")
    s0 = 2 * free[0]
    walk = u.face_walk()
    t0 = walk[0]
    nx = int(u.next_rot[t0])
    u.next_rot[t0] = s0
    u.prev_rot[s0] = t0
    u.next_rot[s0] = nx
    u.prev_rot[nx] = s0
    u.attached[s0] = True
    u.dart_vertex[s0] = u.dart_vertex[t0]
    u.invalidate()
    u.root_after_item = s0
    walk = u.face_walk()
    k = len(walk)
    if k != 4 * n - 1:
        raise MapError("invalid word: wrong walk length after root stem")
    stems = [t for t in walk if u.is_stem(t)]
    i1, i2 = meta.stem_indices
    t1, t2 = meta.targets
    if not (0 <= i1 < i2 < len(stems)) or not (0 <= t1 < k) \
            or not (0 <= t2 <= k):
        raise MapError("invalid word: metadata out of range")
    s_1, s_2 = int(stems[i1]), int(stems[i2])
    h1, h2 = s_1 ^ 1, s_2 ^ 1
    alpha1 = walk[(t1 + 1) % k]
    for h, alpha in ((h1, alpha1), (h2, None)):
        if alpha is None:
            alpha = h1 if t2 == k else walk[(t2 + 1) % k]
        nx = int(u.next_rot[alpha])
        u.next_rot[alpha] = h
        u.prev_rot[h] = alpha
        u.next_rot[h] = nx
        u.prev_rot[nx] = h
        u.attached[h] = True
        u.dart_vertex[h] = u.dart_vertex[alpha]
    u.invalidate()
    return u


# -- tree <-> word -------------------------------------------------------------

def tree_to_bits(tree: TreeWithStems):
    """Walk the tree face from the root angle: 1 going down an edge, 0
    going up an edge or past a stem."""
    u = tree.u
    word = []
    seen = set()
    for t in u.face_walk():
        if u.attached[t ^ 1]:
            e = t >> 1
            if e in seen:
                word.append(0)
            else:
                seen.add(e)
                word.append(1)
        else:
            word.append(0)
    return word


def bits_to_tree(word) -> TreeWithStems:
    """The unique tree with two stems per vertex encoding to `word`."""
    ln = len(word)
    if ln < 2 or ln % 4 != 2:
        raise MapError(f"invalid word: length {ln} != 2 (mod 4)")
    n = (ln + 2) // 4
    ones = sum(1 for b in word if b)
    if ones != n - 1:
        raise MapError(f"invalid word: weight {ones} != {n - 1}")
    nd = 6 * n
    next_rot = np.full(nd, -1, np.int64)
    prev_rot = np.full(nd, -1, np.int64)
    dvert = np.full(nd, -1, np.int64)
    attached = np.zeros(nd, bool)
    edge_ctr = 0          # tree edges 0..n-2
    stem_ctr = n - 1      # stems n-1..3n-2; the root stem edge is 3n-1
    vstack = [0]
    items_stack = [[]]
    germ_stack = [-1]
    stems_at = [0]
    nvert = 1
    last = None

    def close_vertex():
        v = vstack.pop()
        items = items_stack.pop()
        germ = germ_stack.pop()
        rot = ([germ] if germ >= 0 else []) + items[::-1]
        for i, d in enumerate(rot):
            y = rot[(i + 1) % len(rot)]
            next_rot[d] = y
            prev_rot[y] = d
            dvert[d] = v
            attached[d] = True
        return germ

    walk = []
    for bit in word:
        v = vstack[-1]
        if bit:
            d = 2 * edge_ctr
            edge_ctr += 1
            items_stack[-1].append(d)
            walk.append(d)
            vstack.append(nvert)
            items_stack.append([])
            germ_stack.append(d ^ 1)
            stems_at.append(0)
            nvert += 1
        else:
            if stems_at[len(vstack) - 1] < 2:
                s = 2 * stem_ctr
                stem_ctr += 1
                items_stack[-1].append(s)
                walk.append(s)
                stems_at[len(vstack) - 1] += 1
            else:
                if len(vstack) == 1:
                    raise MapError("invalid word: walk climbs past the root")
                germ = close_vertex()
                stems_at.pop()
                walk.append(germ)
    if len(vstack) != 1:
        raise MapError("invalid word: unclosed subtrees remain")
    if stems_at[0] != 2:
        raise MapError("invalid word: root lacks its two stems")
    close_vertex()
    if edge_ctr != n - 1 or stem_ctr != 3 * n - 1:
        raise MapError("invalid word: inconsistent structure")
    u = UnicellularMap(n, next_rot, prev_rot, dvert, attached,
                       root_after_item=walk[-1], check=False)
    return TreeWithStems(u)


# -- container ------------------------------------------------------------------

class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, width: int):
        if width == 0:
            return
        if value < 0 or value >> width:
            raise MapError(f"value {value} does not fit {width} bits")
        for i in range(width - 1, -1, -1):
            self.acc = (self.acc << 1) | ((value >> i) & 1)
            self.nbits += 1
            if self.nbits == 8:
                self.out.append(self.acc)
                self.acc = 0
                self.nbits = 0

    def flush(self) -> bytes:
        if self.nbits:
            self.out.append(self.acc << (8 - self.nbits))
            self.acc = 0
            self.nbits = 0
        return bytes(self.out)


class _BitReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self, width: int) -> int:
        if width == 0:
            return 0
        end = self.pos + width
        if end > 8 * len(self.data):
            raise MapError("invalid word: container truncated")
        v = 0
        for i in range(self.pos, end):
            v = (v << 1) | ((self.data[i >> 3] >> (7 - (i & 7))) & 1)
        self.pos = end
        return v


def _write_varint(out: bytearray, v: int):
    while True:
        b = v & 0x7F
        v >>= 7
        if v:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _read_varint(data: bytes, pos: int):
    v = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise MapError("invalid word: truncated varint")
        b = data[pos]
        pos += 1
        v |= (b & 0x7F) << shift
        shift += 7
        if not b & 0x80:
            return v, pos


def code_to_bytes(code: CodeWord) -> bytes:
    out = bytearray(MAGIC)
    out.append(VERSION)
    _write_varint(out, code.n)
    w = meta_field_width(code.n)
    bw = _BitWriter()
    bw.write(code.stem_indices[0], w)
    bw.write(code.stem_indices[1], w)
    bw.write(code.targets[0], w)
    bw.write(code.targets[1], w)
    bw.write(code.payload_rank, payload_bit_length(code.n))
    out.extend(bw.flush())
    return bytes(out)


def code_from_bytes(data: bytes) -> CodeWord:
    if data[:4] != MAGIC:
        raise MapError("invalid word: bad magic")
    if len(data) < 5 or data[4] != VERSION:
        raise MapError("invalid word: bad version")
    n, pos = _read_varint(data, 5)
    if n < 1:
        raise MapError("invalid word: bad n")
    w = meta_field_width(n)
    br = _BitReader(data[pos:])
    i1 = br.read(w)
    i2 = br.read(w)
    t1 = br.read(w)
    t2 = br.read(w)
    rank = br.read(payload_bit_length(n))
    return CodeWord(n, (i1, i2), (t1, t2), rank)


# -- end-to-end -----------------------------------------------------------------

def encode(g: TorusMap) -> bytes:
    """Encode a toroidal triangulation into a TPS1 container."""
    with _stage("surface"):
        g.require_triangulation()
        g.homology_basis()
    with _stage("schnyder_build"):
        d0 = initial_three_orientation(g)
        dh, _report = make_htc(g, d0)
        coloring = color_edges(dh)
        a0 = pick_root(g, coloring)
        f0 = g.angle_face(a0)
    with _stage("lattice_min"):
        dmin = minimize(g, dh, f0)
    with _stage("ps_traversal"):
        out = run_ps(g, dmin, a0)
        ok, reason = check_unicellular(g, out)
        if not ok:
            raise MapError(f"traversal output not unicellular: {reason}")
    with _stage("codec"):
        tree, meta = cut_special_edges(out.u)
        word = tree_to_bits(tree)
        meta.payload_rank = word_rank(word)
        return code_to_bytes(meta)


def decode(data: bytes) -> TorusMap:
    """Decode a TPS1 container back to a toroidal triangulation."""
    with _stage("codec"):
        code = code_from_bytes(data)
        total = binom(4 * code.n - 2, code.n - 1)
        if not 0 <= code.payload_rank < total:
            raise MapError("invalid word: rank out of range")
        word = word_unrank(4 * code.n - 2, code.n - 1, code.payload_rank)
        tree = bits_to_tree(word)
        u = reattach_special_edges(tree, code)
    with _stage("closure"):
        g = recover_rooted(u)
        g.require_triangulation()
    return g
