"""Overlap-junction geometry.

A junction is the overlap of a bottom electrode strip of width w_bot with a
top electrode strip of width w_top.  The top strip also climbs over the two
edges of the bottom strip, so in parallel with the plate overlap there are two
sidewall strips of height h (the bottom-electrode thickness) and length w_top.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["JunctionGeometry", "DEFAULT_BOTTOM_THICKNESS_UM"]

# Bottom electrode thickness used throughout the reference process [um].
DEFAULT_BOTTOM_THICKNESS_UM = 0.12


@dataclass(frozen=True)
class JunctionGeometry:
    """Electrode widths and bottom-layer thickness, all in um."""

    w_top: float
    w_bot: float
    h: float = DEFAULT_BOTTOM_THICKNESS_UM

    def __post_init__(self):
        for name in ("w_top", "w_bot", "h"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise ValueError(f"{name} must be positive, got {value}")

    def top_area(self) -> float:
        """Plate overlap area w_top * w_bot [um^2]."""
        return self.w_top * self.w_bot

    def sidewall_area(self) -> float:
        """Combined area of the two edge strips, 2 * h * w_top [um^2]."""
        return 2.0 * self.h * self.w_top
