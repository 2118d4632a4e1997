"""Figure renderers: pure post-processing of sweep CSVs.

Each renderer redraws one figure family (line dashes per eps / d / initial
state, blue first sink, red second sink) from the columns alone; nothing
here recomputes physics, the only derived data are the regular meshes for
the surface plots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schemas import Table, read_table  # noqa: E402

GAMMA1 = r"$\Gamma_1$ [ps$^{-1}$]"
GAMMA2 = r"$\Gamma_2$ [ps$^{-1}$]"

#: family line styles: solid, dashed, dotted, dash-dot, long-dashed
DASHES = ["solid", "dashed", "dotted", "dashdot", (0, (8, 3))]

#: Fig. 6 legend: solid SiteB, dashed SiteA, dot-dashed band+, dotted band-
INIT_STYLES = {
    "siteB": "solid",
    "siteA": "dashed",
    "plus": "dashdot",
    "minus": "dotted",
}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    inputs: tuple
    output: str
    dpi: int = 150
    styles: dict = field(default_factory=dict)


def render(spec: FigureSpec) -> Path:
    """Validate the inputs, draw the figure, and write a deterministic PNG."""
    table = read_table(spec.inputs, spec.figure_id)
    fig = _RENDERERS[spec.figure_id](table, spec)
    out = Path(spec.output)
    fig.savefig(out, dpi=spec.dpi, metadata={"Software": "figgen"})
    plt.close(fig)
    return out


def _family_style(spec: FigureSpec, key, index: int):
    return spec.styles.get(key, DASHES[index % len(DASHES)])


def _render_fig3(table: Table, spec: FigureSpec):
    eps_values = table.unique("eps")
    fig = plt.figure(figsize=(9, 4 * eps_values.size))
    for i, eps in enumerate(eps_values):
        part = table.where(eps=eps)
        for j, width in enumerate(("Y1", "Y2")):
            ax = fig.add_subplot(eps_values.size, 2, 2 * i + j + 1, projection="3d")
            xs, ys, zz = part.mesh("gamma1", "gamma2", width)
            xx, yy = np.meshgrid(xs, ys)
            ax.plot_surface(xx, yy, np.ma.masked_invalid(zz), cmap="viridis")
            ax.set_xlabel(GAMMA1)
            ax.set_ylabel(GAMMA2)
            ax.set_zlabel(rf"$\Upsilon_{j + 1}$ [ps$^{{-1}}$]")
            ax.set_title(rf"$\varepsilon = {eps:g}$ ps$^{{-1}}$")
    fig.tight_layout()
    return fig


def _render_fig4(table: Table, spec: FigureSpec):
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.5))
    for i, eps in enumerate(table.unique("eps")):
        part = table.where(eps=eps)
        order = np.argsort(part["gamma1"])
        g1 = part["gamma1"][order]
        style = _family_style(spec, eps, i)
        label = rf"$\varepsilon = {eps:g}$"
        left.plot(g1, part["Y1"][order], color="tab:blue", linestyle=style, label=label)
        left.plot(g1, part["Y2"][order], color="tab:red", linestyle=style)
        right.plot(g1, part["spacing"][order], color="tab:blue", linestyle=style,
                   label=label)
        right.plot(g1, part["width_sum"][order], color="tab:green", linestyle=style)
    left.set_xlabel(GAMMA1)
    left.set_ylabel(r"$\Upsilon_\alpha$ [ps$^{-1}$]")
    left.legend(fontsize=8)
    right.set_xlabel(GAMMA1)
    right.set_ylabel(r"$\Delta\mathcal{E}$, $\Upsilon_1+\Upsilon_2$ [ps$^{-1}$]")
    right.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _render_fig5(table: Table, spec: FigureSpec):
    eps_values = table.unique("eps")
    fig = plt.figure(figsize=(5.5 * eps_values.size, 4.5))
    for i, eps in enumerate(eps_values):
        part = table.where(eps=eps)
        ax = fig.add_subplot(1, eps_values.size, i + 1, projection="3d")
        for sheet, cmap in (("E1", "autumn"), ("E2", "winter")):
            xs, ys, zz = part.mesh("v_re", "v_im", sheet)
            xx, yy = np.meshgrid(xs, ys)
            ax.plot_surface(xx, yy, np.ma.masked_invalid(zz), cmap=cmap, alpha=0.85)
        ax.set_xlabel(r"$X$ [ps$^{-1}$]")
        ax.set_ylabel(r"$Y$ [ps$^{-1}$]")
        ax.set_zlabel(r"$\mathcal{E}_\alpha$ [ps$^{-1}$]")
        ax.set_title(rf"$\varepsilon = {eps:g}$ ps$^{{-1}}$")
    fig.tight_layout()
    return fig


def _efficiency_lines(table: Table, spec: FigureSpec, family: str, style_of):
    fig, ax = plt.subplots(figsize=(7, 5))
    for i, key in enumerate(table.unique(family)):
        part = table.where(**{family: key})
        order = np.argsort(part["gamma1"])
        g1 = part["gamma1"][order]
        style = style_of(spec, key, i)
        label = f"{family} = {key}" if not isinstance(key, str) else key
        ax.plot(g1, part["eta1"][order], color="tab:blue", linestyle=style,
                label=rf"$\eta_1$, {label}")
        ax.plot(g1, part["eta2"][order], color="tab:red", linestyle=style)
    ax.set_xlabel(GAMMA1)
    ax.set_ylabel(r"$\eta_n$")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _render_fig6(table: Table, spec: FigureSpec):
    def style_of(s, key, i):
        return s.styles.get(key, INIT_STYLES.get(key, DASHES[i % len(DASHES)]))

    return _efficiency_lines(table, spec, "init", style_of)


def _render_fig7(table: Table, spec: FigureSpec):
    fig = plt.figure(figsize=(10, 4.5))
    for j, eta in enumerate(("eta1", "eta2")):
        ax = fig.add_subplot(1, 2, j + 1, projection="3d")
        xs, ys, zz = table.mesh("gamma1", "gamma2", eta)
        xx, yy = np.meshgrid(xs, ys)
        ax.plot_surface(xx, yy, np.ma.masked_invalid(zz), cmap="viridis")
        ax.set_xlabel(GAMMA1)
        ax.set_ylabel(GAMMA2)
        ax.set_zlabel(rf"$\eta_{j + 1}$")
    fig.tight_layout()
    return fig


def _render_fig8(table: Table, spec: FigureSpec):
    valid = table.where(valid=True)
    fig = plt.figure(figsize=(6.5, 5))
    ax = fig.add_subplot(projection="3d")
    xs, ys, zz = valid.mesh("gamma1", "eps", "eta0")
    xx, yy = np.meshgrid(xs, ys)
    ax.plot_surface(xx, yy, np.ma.masked_invalid(zz), cmap="viridis")
    ax.set_xlabel(GAMMA1)
    ax.set_ylabel(r"$\varepsilon$ [ps$^{-1}$]")
    ax.set_zlabel(r"$\eta_0$")
    fig.tight_layout()
    return fig


def _render_fig9(table: Table, spec: FigureSpec):
    def style_of(s, key, i):
        return _family_style(s, key, i)

    return _efficiency_lines(table, spec, "d", style_of)


_RENDERERS = {
    3: _render_fig3,
    4: _render_fig4,
    5: _render_fig5,
    6: _render_fig6,
    7: _render_fig7,
    8: _render_fig8,
    9: _render_fig9,
}

SUPPORTED_FIGURES = tuple(sorted(_RENDERERS))
