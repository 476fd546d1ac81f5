"""Static line charts of sweep results (SVG via matplotlib)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "ghatom",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.labelsize": 9,
    "lines.linewidth": 1.0,
    "figure.figsize": (5.0, 6.0),
}

PANELS = {
    "R": (("absR1sq", r"$|R_1|^2$"), ("ThetaR", r"$\Theta_1^R$ (rad)"), ("yR", r"$\tilde y_R$")),
    "T": (("absT1sq", r"$|T_1|^2$"), ("ThetaT", r"$\Theta_1^T$ (rad)"), ("yT", r"$\tilde y_T$")),
    "dressed": (
        ("delta_eff", r"$\tilde\delta$"),
        ("Vp_re", r"Re $\tilde V_\pm$"),
        ("ap_re", r"Re $\tilde\alpha_\pm$"),
    ),
}
# second curve drawn on the same panel
PARTNER = {"Vp_re": ("Vm_re", r"$-$"), "ap_re": ("am_re", r"$-$")}


def sweep_figure(rows, kind: str):
    theta = np.array([r.theta_deg for r in rows])
    fig, axes = plt.subplots(3, 1, sharex=True)
    for ax, (name, label) in zip(axes, PANELS[kind]):
        ax.plot(theta, [getattr(r, name) for r in rows], color="C0", label="+" if name in PARTNER else None)
        if name in PARTNER:
            other, tag = PARTNER[name]
            ax.plot(theta, [getattr(r, other) for r in rows], color="C3", ls="--", label=tag)
            ax.legend(frameon=False, loc="best")
        ax.set_ylabel(label)
    axes[-1].set_xlabel(r"$\theta$ (deg)")
    fig.align_ylabels(axes)
    fig.tight_layout()
    return fig


def save_svg(fig, path) -> None:
    # no timestamp, fixed ids: identical rows give identical files
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_sweep_svgs(rows, stem) -> list[str]:
    """Write <stem>_R.svg, <stem>_T.svg and <stem>_dressed.svg; return paths."""
    paths = []
    with plt.rc_context(STYLE):
        for kind in ("R", "T", "dressed"):
            path = f"{stem}_{kind}.svg"
            save_svg(sweep_figure(rows, kind), path)
            paths.append(path)
    return paths
