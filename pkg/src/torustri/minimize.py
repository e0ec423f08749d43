"""Minimal orientation w.r.t. a root face, by dual directed-cut reversal.

The minimum of the lattice of homologous orientations is the unique one in
which every face has a directed path to f0 in the dual orientation;
reversing the directed cut around the reachable set and re-seeding the
reachability worklist converges there reversing each edge at most once.
"""

from __future__ import annotations

from . import kernels
from .orientation import Orientation
from .surface import MapError, TorusMap


def minimize(g: TorusMap, d: Orientation, f0: int) -> Orientation:
    if not 0 <= f0 < g.f:
        raise MapError(f"no face {f0}")
    tail = d.tail.copy()
    rounds = kernels.minimize_cuts(g.face_of, tail, f0, g.f)
    if rounds < 0:
        raise MapError("dual graph disconnected")
    return Orientation(g, tail)


def is_minimal(g: TorusMap, d: Orientation, f0: int) -> bool:
    if not 0 <= f0 < g.f:
        raise MapError(f"no face {f0}")
    return bool(kernels.dual_reaches_all(g.face_of, d.tail, f0, g.f))
