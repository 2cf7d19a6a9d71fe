"""Ratio-vs-displacement comparison plot from mc/limits JSON payloads."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

from .style import apply_style, save_both


class MalformedInput(ValueError):
    pass


MC_REQUIRED = ("ratio", "ci_low", "ci_high", "n", "p", "z0", "zeta1", "zeta2")


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def _abs_delta(payload: dict) -> float:
    (r1, i1), (r2, i2) = payload["zeta1"], payload["zeta2"]
    return math.hypot(r1 - r2, i1 - i2)


def _check_metadata(mc: dict, limits: dict, path: str) -> None:
    cfg = limits.get("config", {})
    if not math.isclose(mc["p"], cfg.get("p", math.nan),
                        rel_tol=0, abs_tol=1e-12):
        raise MalformedInput(f"{path}: p={mc['p']} does not match the "
                             f"limits payload p={cfg.get('p')}")
    if mc["z0"] != cfg.get("z0"):
        raise MalformedInput(f"{path}: z0={mc['z0']} does not match the "
                             f"limits payload z0={cfg.get('z0')}")


def plot_ratio_convergence(mc_json_list: Sequence[str], limits_json: str,
                           out_image: str):
    """MC ratio points with CIs against the theoretical scan curve.

    One errorbar series per matrix size found in the MC payloads; the
    theoretical curve comes from the "scan" array of the limits payload.
    Returns the (png, svg) paths written.
    """
    import matplotlib.pyplot as plt

    apply_style()
    limits = _load_json(limits_json)
    for key in ("region", "ratio", "config"):
        if key not in limits:
            raise MalformedInput(f"{limits_json}: missing field {key!r}")

    series: dict[int, list[tuple[float, float, float, float]]] = {}
    for path in mc_json_list:
        payload = _load_json(path)
        missing = [k for k in MC_REQUIRED if k not in payload]
        if missing:
            raise MalformedInput(f"{path}: missing fields {missing}")
        _check_metadata(payload, limits, path)
        series.setdefault(int(payload["n"]), []).append(
            (_abs_delta(payload), payload["ratio"],
             payload["ci_low"], payload["ci_high"]))

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    scan = limits.get("scan") or []
    if scan:
        xs = [pt["abs_delta"] for pt in scan]
        ys = [pt["ratio"] for pt in scan]
        ax.plot(xs, ys, color="black", lw=1.6, label="limit law")
    else:
        ax.axhline(limits["ratio"], color="black", lw=1.6, label="limit law")

    for n in sorted(series):
        pts = sorted(series[n])
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        lo = [p[1] - p[2] for p in pts]
        hi = [p[3] - p[1] for p in pts]
        ax.errorbar(xs, ys, yerr=[lo, hi], fmt="o", ms=4, capsize=3,
                    label=f"MC n={n}")

    ax.set_xlabel(r"$|\zeta_1 - \zeta_2|$")
    ax.set_ylabel("normalized ratio")
    region = limits["region"]
    ax.set_title(f"region {region}: MC against the limit law", fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = save_both(fig, out_image)
    plt.close(fig)
    return out
