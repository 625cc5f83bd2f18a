"""Pixel-space box geometry shared by static boxes, detections and tracks.

Coordinates follow the half-open convention: 0 <= xmin < xmax <= width and
0 <= ymin < ymax <= height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CharonetteError


class MalformedBoxError(CharonetteError):
    code = "malformed_box"
    status = 422


@dataclass(frozen=True, order=True)
class BoxGeometry:
    xmin: int
    ymin: int
    xmax: int
    ymax: int

    def well_formed(self, width: int | None = None, height: int | None = None) -> bool:
        if not (0 <= self.xmin < self.xmax and 0 <= self.ymin < self.ymax):
            return False
        if width is not None and self.xmax > width:
            return False
        if height is not None and self.ymax > height:
            return False
        return True


def require_box(box: BoxGeometry, width: int | None = None, height: int | None = None) -> BoxGeometry:
    if not box.well_formed(width, height):
        raise MalformedBoxError(f"malformed box {box} for bounds {width}x{height}")
    return box


def round_half_up(x: float) -> int:
    # round() is banker's rounding; exports want the conventional .5 -> up
    return math.floor(x + 0.5)


def interpolate_box(a: BoxGeometry, b: BoxGeometry, t: float) -> BoxGeometry:
    """Coordinate-wise linear blend of two boxes, t in [0, 1], integer output."""
    return BoxGeometry(
        round_half_up(a.xmin + (b.xmin - a.xmin) * t),
        round_half_up(a.ymin + (b.ymin - a.ymin) * t),
        round_half_up(a.xmax + (b.xmax - a.xmax) * t),
        round_half_up(a.ymax + (b.ymax - a.ymax) * t),
    )
