"""Calibration report rendering: residual tables, CSV, and figures."""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dlt import CalibrationResult, Correspondence
from .fileio import format_float


def error_table(result: CalibrationResult, name: str = "1") -> str:
    """Per-axis mean reprojection errors, one row per camera position."""
    r = result.errors
    lines = [
        f"{'camera position':<18}{'mean error u':>16}{'mean error v':>16}{'rms':>14}",
        f"{name:<18}{r.mean_u:>16.4f}{r.mean_v:>16.4f}{r.rms:>14.4g}",
    ]
    return "\n".join(lines)


def write_residuals_csv(
    path, corrs: Sequence[Correspondence], result: CalibrationResult
) -> None:
    """Per-point observed, reprojected, and residual pixel coordinates."""
    r = result.errors
    with open(path, "w", encoding="utf-8") as f:
        f.write("index,u_obs,v_obs,u_proj,v_proj,du,dv\n")
        for i, (c, proj, res) in enumerate(zip(corrs, r.projected, r.residuals)):
            f.write(
                ",".join(
                    [str(i)]
                    + [
                        format_float(v)
                        for v in (c.pixel.u, c.pixel.v, proj.u, proj.v, res.u, res.v)
                    ]
                )
                + "\n"
            )


def render_reprojection_figure(
    path, corrs: Sequence[Correspondence], result: CalibrationResult
) -> None:
    """Observed-vs-reprojected overlay and residual scatter, saved as an image."""
    r = result.errors
    obs_u = [c.pixel.u for c in corrs]
    obs_v = [c.pixel.v for c in corrs]
    proj_u = [p.u for p in r.projected]
    proj_v = [p.v for p in r.projected]
    du = [p.u for p in r.residuals]
    dv = [p.v for p in r.residuals]

    fig, (ax_img, ax_res) = plt.subplots(1, 2, figsize=(10, 4.5))
    ax_img.scatter(obs_u, obs_v, s=40, facecolors="none", edgecolors="tab:blue",
                   label="observed")
    ax_img.scatter(proj_u, proj_v, s=18, marker="x", color="tab:red",
                   label="reprojected")
    ax_img.set_xlabel("u (px)")
    ax_img.set_ylabel("v (px)")
    ax_img.invert_yaxis()
    ax_img.set_title("image points")
    ax_img.legend(loc="best", fontsize=8)
    ax_img.set_aspect("equal", adjustable="datalim")

    ax_res.axhline(0.0, color="0.6", lw=0.8)
    ax_res.axvline(0.0, color="0.6", lw=0.8)
    ax_res.scatter(du, dv, s=24, color="tab:green")
    ax_res.set_xlabel("du (px)")
    ax_res.set_ylabel("dv (px)")
    ax_res.set_title(
        f"residuals: mean=({r.mean_u:.4f}, {r.mean_v:.4f}), rms={r.rms:.4g}"
    )

    fig.tight_layout()
    fig.savefig(os.fspath(path), dpi=120)
    plt.close(fig)
