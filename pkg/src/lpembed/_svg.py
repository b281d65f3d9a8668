"""Minimal flat SVG scatter writer (first two coordinates only)."""

import numpy as np


def write_scatter_svg(path, points, size=480, margin=24, radius=1.4, color="#1f6fb4"):
    pts = np.atleast_2d(np.asarray(points, dtype=float))[:, :2]
    lo = pts.min(axis=0)
    span = np.maximum(pts.max(axis=0) - lo, 1e-12)
    scale = (size - 2 * margin) / span
    xy = (pts - lo) * scale + margin
    xy[:, 1] = size - xy[:, 1]  # flip y for screen coordinates
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for x, y in xy:
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{color}"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
