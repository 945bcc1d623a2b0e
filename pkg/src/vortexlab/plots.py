"""Deterministic SVG figures of the ring curve.

Hand-written SVG text (no plotting dependency) so identical inputs yield
byte-identical files: two panels per snapshot, an orthographic 3-d
projection and a top (xy) view, both with annotated axes.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["render_ring_svg"]

_PANEL = 440
_MARGIN = 40
_WIDTH = 2 * _PANEL + 3 * _MARGIN
_HEIGHT = _PANEL + 2 * _MARGIN

# fixed orthographic camera: azimuth -60 deg, elevation 22 deg
_AZ = math.radians(-60.0)
_EL = math.radians(22.0)
_RIGHT = np.array([-math.sin(_AZ), math.cos(_AZ), 0.0])
_UP = np.array(
    [-math.sin(_EL) * math.cos(_AZ), -math.sin(_EL) * math.sin(_AZ), math.cos(_EL)]
)


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _project_ortho(points: np.ndarray) -> np.ndarray:
    return np.stack([points @ _RIGHT, points @ _UP], axis=-1)


def _project_top(points: np.ndarray) -> np.ndarray:
    return points[:, :2].copy()


def _panel_transform(uv: np.ndarray, x0: float):
    """Scale/center 2-d data into one panel (y flipped for SVG)."""
    center = 0.5 * (uv.max(axis=0) + uv.min(axis=0))
    span = float(np.max(uv.max(axis=0) - uv.min(axis=0)))
    if span <= 0.0:
        span = 1.0
    scale = 0.82 * _PANEL / span

    def to_px(p):
        return (
            x0 + _PANEL / 2 + scale * (p[0] - center[0]),
            _MARGIN + _PANEL / 2 - scale * (p[1] - center[1]),
        )

    return to_px


def _polyline(points_px, stroke: str, width: float) -> str:
    pts = " ".join(f"{_fmt(u)},{_fmt(w)}" for u, w in points_px)
    return f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'


def _axis_lines(project, to_px, axis_len: float, labels) -> list:
    origin = np.zeros((1, 3))
    parts = []
    for i, label in enumerate(labels):
        if label is None:
            continue
        tip = np.zeros((1, 3))
        tip[0, i] = axis_len
        seg = project(np.vstack([origin, tip]))
        p0, p1 = to_px(seg[0]), to_px(seg[1])
        parts.append(
            f'<line x1="{_fmt(p0[0])}" y1="{_fmt(p0[1])}" x2="{_fmt(p1[0])}" '
            f'y2="{_fmt(p1[1])}" stroke="#999999" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(p1[0] + 4)}" y="{_fmt(p1[1] - 4)}" font-size="13" '
            f'fill="#555555">{label}</text>'
        )
    return parts


def render_ring_svg(points: np.ndarray, title: str) -> str:
    """Two-panel SVG of a closed ring curve given as an (N, 3) point array."""
    closed = np.vstack([points, points[:1]])
    axis_len = 1.1 * float(np.max(np.abs(points)))
    if axis_len <= 0.0:
        axis_len = 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_MARGIN}" y="{_MARGIN - 14}" font-size="15" fill="#222222">{title}</text>',
    ]

    for panel, (project, label, axes) in enumerate(
        [
            (_project_ortho, "3d view", ("x", "y", "z")),
            (_project_top, "top view", ("x", "y", None)),
        ]
    ):
        x0 = _MARGIN + panel * (_PANEL + _MARGIN)
        uv_axes = project(
            np.vstack([closed, np.zeros((1, 3)), axis_len * np.eye(3)])
        )
        to_px = _panel_transform(uv_axes, x0)
        parts.append(
            f'<rect x="{x0}" y="{_MARGIN}" width="{_PANEL}" height="{_PANEL}" '
            f'fill="none" stroke="#cccccc"/>'
        )
        parts.extend(_axis_lines(project, to_px, axis_len, axes))
        parts.append(_polyline([to_px(p) for p in project(closed)], "#1f4e9c", 1.8))
        parts.append(
            f'<text x="{x0 + 6}" y="{_MARGIN + _PANEL - 8}" font-size="13" '
            f'fill="#555555">{label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
