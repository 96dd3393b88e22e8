"""Caption crop planning: a 3x3 grid of cells plus the full frame."""
from __future__ import annotations

from dataclasses import dataclass

GRID = 3


@dataclass(frozen=True)
class CropPlan:
    """Ten pixel rectangles (x, y, w, h): nine grid cells row-major, then the full image."""

    regions: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self) -> None:
        if len(self.regions) != GRID * GRID + 1:
            raise ValueError(f"a crop plan has {GRID * GRID + 1} regions")


def plan_grid_crops(width_px: int, height_px: int) -> CropPlan:
    """Tile the image into 3x3 cells (last row/column absorbs the remainder),
    then append the full frame as the tenth region.
    """
    if width_px < GRID or height_px < GRID:
        raise ValueError(f"image must be at least {GRID}x{GRID} pixels")
    cw = width_px // GRID
    ch = height_px // GRID
    regions: list[tuple[int, int, int, int]] = []
    for r in range(GRID):
        for c in range(GRID):
            w = width_px - c * cw if c == GRID - 1 else cw
            h = height_px - r * ch if r == GRID - 1 else ch
            regions.append((c * cw, r * ch, w, h))
    regions.append((0, 0, width_px, height_px))
    return CropPlan(regions=tuple(regions))
