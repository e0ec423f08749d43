"""torustri: optimal succinct codec for toroidal triangulations."""

from .surface import (Angle, HomologyBasis, MapError, TorusMap, Walk,
                      parse_tmap, write_tmap)
from .orientation import (Orientation, SchnyderColoring, color_edges, delta,
                          dual_orientation, gamma,
                          has_noncontractible_directed_cycle, is_crossing,
                          is_htc, is_three_orientation, is_zero_homologous,
                          monochromatic_cycles)
from .schnyder import BuildReport, initial_three_orientation, make_htc, pick_root
from .minimize import is_minimal, minimize

__version__ = "0.1.0"

__all__ = [
    "Angle", "BuildReport", "HomologyBasis", "MapError", "Orientation",
    "SchnyderColoring", "TorusMap", "Walk", "color_edges", "delta",
    "dual_orientation", "gamma", "has_noncontractible_directed_cycle",
    "initial_three_orientation", "is_crossing", "is_htc", "is_minimal",
    "is_three_orientation", "is_zero_homologous", "make_htc", "minimize",
    "monochromatic_cycles", "parse_tmap", "pick_root", "write_tmap",
]
