"""The generalized angle-walk traversal (Algorithm PS).

The traversal state is a dart (vertex + edge + which end of a loop); the
visited angle sits just before the state dart around its vertex.  Four
cases drive the walk; kept edges (case 1) and stems (case 2) assemble the
output map, whose embedded structure inherits the input rotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .orientation import Orientation
from .surface import Angle, MapError, TorusMap
from .unicellular import UnicellularMap


@dataclass
class PsOutput:
    u: UnicellularMap
    q_edges: list              # edges whose duals form the co-tree
    states: np.ndarray         # state dart per step
    cases: np.ndarray          # 1..4 per step
    root_vertex: int
    _g: TorusMap = field(repr=False, default=None)

    @property
    def angle_cycle(self):
        """The visited angles, in order (one per step)."""
        dv = self._g.dart_vertex
        return [Angle(int(dv[s]), int(s)) for s in self.states]


def run_ps(g: TorusMap, d: Orientation, a0: Angle) -> PsOutput:
    """Run the traversal from root angle a0 on orientation d.

    Always terminates; the output is a unicellular map covering all edges
    exactly when d is the minimal HTC orientation w.r.t. the face of a0 and
    a0 avoids the strict interior of every separating triangle.
    """
    states, cases, t = kernels.ps_walk(g.next_ccw, d.tail, int(a0.dart))
    if t < 0:
        raise MapError("internal error: traversal revisited an angle")
    states = np.asarray(states[:t])
    cases = np.asarray(cases[:t])
    nd = 2 * g.m
    attached = np.zeros(nd, bool)
    keep = states[cases == 1]
    attached[keep] = True
    attached[keep ^ 1] = True
    stems = states[cases == 2]
    attached[stems] = True
    next_rot, prev_rot = kernels.submap_rotation(
        g.dart_vertex, g.vert_off, g.vert_darts, attached, g.n)
    root_after = int(states[0]) if cases[0] == 2 else None
    u = UnicellularMap(g.n, next_rot, prev_rot, g.dart_vertex.copy(),
                       attached, root_after, check=False)
    q_edges = [int(s) >> 1 for s in stems]
    return PsOutput(u, q_edges, states, cases, int(g.dart_vertex[a0.dart]), g)


def check_unicellular(g: TorusMap, out: PsOutput):
    """Verify the traversal output: kept edges span the vertices, the duals
    of the stems form a spanning tree, and the output has a single face.

    Returns (True, None) or (False, reason) with reason one of
    'unreached_vertex', 'dual_cycle', 'face_count'.
    """
    keep = out.states[out.cases == 1]
    covered = np.zeros(g.n, bool)
    covered[out.root_vertex] = True
    covered[g.dart_vertex[keep]] = True
    covered[g.dart_vertex[keep ^ 1]] = True
    if not covered.all():
        return False, "unreached_vertex"
    cyc, ncomp = kernels.dual_forest_check(
        g.face_of, np.asarray(out.q_edges, np.int64), g.f)
    if cyc:
        return False, "dual_cycle"
    if ncomp != 1:
        return False, "face_count"
    if out.u.face_count() != 1:
        return False, "face_count"
    return True, None
