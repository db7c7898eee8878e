"""Figure rendering for the command line reports.

Kept separate so matplotlib is only imported when a config asks for a
figure. Everything uses the object-oriented Agg backend directly; no
pyplot, no global state.
"""
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .records import TrajectoryRecord

_LABEL_COLORS = {
    "REDUCED_INADMISSIBLE": "#7f7f7f",
    "NEGATIVE_EVOLVING": "#d62728",
    "ENTANGLEMENT_INCREASING": "#9467bd",
    "CONSISTENT": "#2ca02c",
    "skipped": "#c7c7c7",
}


def _new_figure(nrows: int = 1):
    fig = Figure(figsize=(7.0, 2.8 * nrows + 0.8), constrained_layout=True)
    FigureCanvasAgg(fig)
    axes = fig.subplots(nrows, 1, sharex=(nrows > 1))
    return fig, (axes if nrows > 1 else [axes])


def _save(fig, path: str):
    fig.savefig(path, dpi=150)


def render_evolve(record: TrajectoryRecord, path: str):
    fig, (top, bottom) = _new_figure(2)
    t = record.t
    top.plot(t, record.columns["rho1"], label="rho1")
    top.plot(t, record.columns["re_rho3"], label="Re rho3")
    top.plot(t, record.columns["im_rho3"], label="Im rho3")
    top.set_ylabel("entries")
    top.legend(loc="best", fontsize="small")
    bottom.plot(t, record.columns["min_eig"], label="min eigenvalue")
    bottom.plot(t, record.columns["det"], label="det")
    bottom.axhline(0.0, color="k", lw=0.6)
    bottom.set_xlabel("t")
    bottom.set_ylabel("positivity")
    bottom.legend(loc="best", fontsize="small")
    _save(fig, path)


def render_concurrence(record: TrajectoryRecord, path: str):
    fig, (top, bottom) = _new_figure(2)
    t = record.t
    top.plot(t, record.columns["concurrence"], color="#9467bd")
    top.set_ylabel("concurrence")
    bottom.plot(t, record.columns["D1"], label="D1")
    bottom.plot(t, record.columns["D2"], label="D2")
    bottom.plot(t, record.columns["min_eig"], label="min eigenvalue")
    bottom.axhline(0.0, color="k", lw=0.6)
    bottom.set_xlabel("t")
    bottom.set_ylabel("positivity")
    bottom.legend(loc="best", fontsize="small")
    _save(fig, path)


def render_choi(record: TrajectoryRecord, path: str):
    fig, (ax,) = _new_figure(1)
    for name in ("eig1", "eig2", "eig3", "eig4"):
        ax.plot(record.t, record.columns[name], label=name)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("Choi eigenvalues")
    ax.legend(loc="best", fontsize="small")
    _save(fig, path)


def render_witness(record: TrajectoryRecord, path: str):
    fig, (ax,) = _new_figure(1)
    ax.plot(record.t, record.columns["det"], label="det")
    ax.plot(record.t, record.columns["min_eig"], label="min eigenvalue")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("witness trajectory")
    ax.legend(loc="best", fontsize="small")
    _save(fig, path)


def render_scan_family(rows: list, path: str):
    """Scatter of the (mu, nu) grid colored by classification."""
    fig, (ax,) = _new_figure(1)
    groups: dict = {}
    for row in rows:
        label = row.get("label", "skipped")
        mu = row.get("mu", row.get("grid", {}).get("mu"))
        nu = row.get("nu", row.get("grid", {}).get("nu"))
        groups.setdefault(label, ([], []))
        groups[label][0].append(mu)
        groups[label][1].append(nu)
    for label, (mus, nus) in sorted(groups.items()):
        ax.scatter(mus, nus, s=14, label=label,
                   color=_LABEL_COLORS.get(label, "#1f77b4"))
    ax.set_xlabel("mu")
    ax.set_ylabel("nu")
    ax.legend(loc="best", fontsize="small")
    _save(fig, path)


def render_scan_bloch(summary: dict, path: str):
    """Admissible fraction bar plus the boundary samples by radius."""
    fig, (ax,) = _new_figure(1)
    frac = summary["admissible_fraction"]
    ax.bar(["admissible", "inadmissible"], [frac, 1.0 - frac],
           color=["#2ca02c", "#d62728"])
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("Bloch ball volume fraction")
    ax.set_title(f"{summary['n_admissible']} of {summary['n_points']} "
                 "sampled states admissible")
    _save(fig, path)
