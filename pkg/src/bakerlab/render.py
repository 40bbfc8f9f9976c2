"""Deterministic PPM rendering of the excluded-disk geometry with overlays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mapfamily import MapModel, _dist_translates_array
from .parallel import map_ordered

# band colors by distance to the pole translates
COLOR_CORE = (178, 34, 34)        # inside the epsilon disks
COLOR_COLLAR = (247, 166, 93)     # collar between epsilon and delta
COLOR_CERTIFIED = (255, 255, 255)  # certified region beyond the delta disks
COLOR_ORBIT = (24, 64, 220)
COLOR_LOOP = (18, 138, 66)


@dataclass(frozen=True)
class Viewport:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("degenerate viewport")


def render_region(model: MapModel, viewport: Viewport, width: int, height: int,
                  orbit_points=None, loop_vertices=None) -> np.ndarray:
    """Row-major, top-left-origin RGB image of the excluded-disk bands.

    Pixels sample the viewport at cell centers and are classified by the
    distance to the pole translates: below epsilon, below delta, certified.
    Optional overlays paint orbit points and loop vertices.
    """
    if width <= 0 or height <= 0:
        raise ValueError("resolution must be positive")
    xs = viewport.x_min + (np.arange(width) + 0.5) * (viewport.x_max - viewport.x_min) / width
    ys = viewport.y_max - (np.arange(height) + 0.5) * (viewport.y_max - viewport.y_min) / height

    def _rows(block: np.ndarray) -> np.ndarray:
        z = xs[None, :] + 1j * ys[block, None]
        d = _dist_translates_array(model, z)
        img = np.empty(z.shape + (3,), dtype=np.uint8)
        img[:] = COLOR_CERTIFIED
        img[d < model.delta] = COLOR_COLLAR
        img[d < model.epsilon] = COLOR_CORE
        return img

    blocks = np.array_split(np.arange(height), min(height, max(1, 8)))
    pixels = np.concatenate(map_ordered(_rows, blocks), axis=0)

    for pts, color in ((orbit_points, COLOR_ORBIT), (loop_vertices, COLOR_LOOP)):
        if pts is None:
            continue
        pts = np.asarray(pts, dtype=np.complex128).ravel()
        col = np.floor((pts.real - viewport.x_min)
                       / (viewport.x_max - viewport.x_min) * width).astype(np.int64)
        row = np.floor((viewport.y_max - pts.imag)
                       / (viewport.y_max - viewport.y_min) * height).astype(np.int64)
        keep = (col >= 0) & (col < width) & (row >= 0) & (row < height)
        pixels[row[keep], col[keep]] = color
    return pixels


def ppm_bytes(pixels: np.ndarray) -> bytes:
    """Binary PPM (P6, 8-bit) encoding of an (H, W, 3) uint8 array."""
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise ValueError("expected an (H, W, 3) uint8 array")
    h, w = pixels.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + pixels.tobytes()


def write_ppm(path, pixels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(pixels))
