"""Phase-diagram rendering from the exported CSV files."""

from __future__ import annotations

import csv

import numpy as np
from matplotlib.colors import BoundaryNorm, ListedColormap
from matplotlib.patches import Patch

from .style import CURVE_STYLE, REGION_COLORS, REGION_LABELS, apply_style, save_both

GRID_HEADER = ["b", "z0sq", "region", "F_I", "F_II", "F_III"]
CURVES_HEADER = ["curve", "b", "z0sq", "residual"]


class MalformedInput(ValueError):
    pass


def _read_grid(path: str):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != GRID_HEADER:
            raise MalformedInput(f"{path}: unexpected grid header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                b, z = float(row[0]), float(row[1])
                region = int(row[2])
                if region not in REGION_COLORS:
                    raise ValueError(f"region {region}")
            except (ValueError, IndexError) as exc:
                raise MalformedInput(f"{path}: bad grid row {lineno}: {exc}") from exc
            rows.append((b, z, region))
    if not rows:
        raise MalformedInput(f"{path}: empty grid")
    return rows


def _read_curves(path: str):
    curves: dict[str, list[tuple[float, float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CURVES_HEADER:
            raise MalformedInput(f"{path}: unexpected curves header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                name = row[0]
                b, z = float(row[1]), float(row[2])
                float(row[3])
            except (ValueError, IndexError) as exc:
                raise MalformedInput(f"{path}: bad curve row {lineno}: {exc}") from exc
            curves.setdefault(name, []).append((b, z))
    return curves


def _grid_axes(rows):
    bs = np.array(sorted({b for b, _, _ in rows}))
    zs = np.array(sorted({z for _, z, _ in rows}))
    region = np.full((len(zs), len(bs)), -1, dtype=int)
    b_index = {b: i for i, b in enumerate(bs)}
    z_index = {z: j for j, z in enumerate(zs)}
    for b, z, r in rows:
        region[z_index[z], b_index[b]] = r
    if (region < 0).any():
        raise MalformedInput("grid rows do not fill a complete rectangle")
    return bs, zs, region


def plot_phase_diagram(grid_csv: str, curves_csv: str, out_image: str):
    """Shaded region plot with the boundary curves overlaid.

    Returns the (png, svg) paths written.
    """
    import matplotlib.pyplot as plt

    apply_style()
    bs, zs, region = _grid_axes(_read_grid(grid_csv))
    curves = _read_curves(curves_csv)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    # map region codes onto a discrete colormap (boundary code 0 last)
    order = [1, 2, 3, 0]
    code_to_level = {code: k for k, code in enumerate(order)}
    levels = np.vectorize(code_to_level.get)(region)
    cmap = ListedColormap([REGION_COLORS[c] for c in order])
    norm = BoundaryNorm(np.arange(len(order) + 1) - 0.5, cmap.N)
    ax.pcolormesh(bs, zs, levels, cmap=cmap, norm=norm, shading="nearest")

    for name in ("gamma1", "gamma2", "gamma3", "z_minus"):
        if name in curves:
            pts = np.array(curves[name])
            ax.plot(pts[:, 0], pts[:, 1], **CURVE_STYLE[name])

    present = sorted({int(r) for r in region.ravel()},
                     key=lambda c: code_to_level[c])
    handles = [Patch(facecolor=REGION_COLORS[c], label=REGION_LABELS[c])
               for c in present]
    handles += [ax.lines[i] for i in range(len(ax.lines))]
    ax.legend(handles=handles, loc="upper left", fontsize=8)
    ax.set_xlabel(r"$b$")
    ax.set_ylabel(r"$|z_0|^2$")
    ax.set_xlim(bs.min(), bs.max())
    ax.set_ylim(zs.min(), zs.max())
    fig.tight_layout()
    out = save_both(fig, out_image)
    plt.close(fig)
    return out
