"""Shared figure styling and deterministic rendering setup."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE_VERSION = "1"

REGION_COLORS = {
    1: "#74a9cf",   # star region
    2: "#fdbb84",   # v region
    3: "#b3de69",   # factorized region
    0: "#bdbdbd",   # boundary ties
}
REGION_LABELS = {1: r"$\Omega_1$", 2: r"$\Omega_2$", 3: r"$\Omega_3$",
                 0: "boundary"}
CURVE_STYLE = {
    "gamma1": dict(color="#08306b", lw=1.8, label=r"$\gamma_1$"),
    "gamma2": dict(color="#7a0177", lw=1.8, label=r"$\gamma_2$"),
    "gamma3": dict(color="#b30000", lw=1.8, label=r"$\gamma_3$"),
    "z_minus": dict(color="#525252", lw=1.0, ls="--", label=r"$z_-$"),
}


def apply_style() -> None:
    plt.rcdefaults()
    plt.rcParams.update({
        "figure.dpi": 140,
        "savefig.dpi": 140,
        "font.size": 10,
        "axes.grid": True,
        "grid.alpha": 0.25,
        "legend.frameon": False,
        "svg.hashsalt": "plotkit-" + STYLE_VERSION,  # reproducible SVG ids
    })


def save_both(fig, out_image: str):
    """Write PNG and SVG siblings for the requested output path."""
    from pathlib import Path

    base = Path(out_image)
    if base.suffix.lower() in (".png", ".svg"):
        base = base.with_suffix("")
    png, svg = base.with_suffix(".png"), base.with_suffix(".svg")
    fig.savefig(png, metadata={"Software": f"plotkit/{STYLE_VERSION}"})
    fig.savefig(svg, metadata={"Date": None})
    return png, svg
