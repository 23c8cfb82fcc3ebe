"""Matplotlib renderings written as deterministic SVG (or PNG by suffix)."""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "selfsquare"
plt.rcParams["svg.fonttype"] = "none"

__all__ = [
    "presentation_figure",
    "partition_figure",
    "bounds_figure",
    "family_figure",
    "save",
    "to_svg",
]


def _finish(fig, path=None):
    if path is None:
        return fig
    save(fig, path)
    return None


def save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".png":
        fig.savefig(path, dpi=120, metadata={"Software": None})
    else:
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def to_svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def _planar(p):
    xs, ys = [], []
    for pt in p.points:
        c = pt.coords
        xs.append(float(c[0]))
        ys.append(float(c[1]) if len(c) > 1 else 0.0)
    return xs, ys


def presentation_figure(p, title="", path=None):
    """Planar scatter for one-atom presentations, a labeled cell chart otherwise."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if p.dim() <= 2:
        xs, ys = _planar(p)
        ker = [i for i, pt in enumerate(p.points) if pt.kernel]
        free = [i for i, pt in enumerate(p.points) if not pt.kernel]
        ranks = [p.points[i].iso_rank for i in free]
        ax.scatter([xs[i] for i in ker], [ys[i] for i in ker], s=10, c="black", marker="s", label="kernel")
        sc = ax.scatter([xs[i] for i in free], [ys[i] for i in free], s=14, c=ranks, cmap="viridis", label="isolated rank")
        if free:
            fig.colorbar(sc, ax=ax, label="CB rank")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(loc="upper right", fontsize=7)
    else:
        # no faithful planar drawing; show cell sizes by label
        counts = {}
        for c in p.cells:
            counts[str(c.label)] = counts.get(str(c.label), 0) + 1
        names = sorted(counts)
        ax.barh(range(len(names)), [counts[n] for n in names], color="tab:blue")
        ax.set_yticks(range(len(names)), names, fontsize=7)
        ax.set_xlabel("cells")
    ax.set_title(title or f"stage {p.stage}")
    fig.tight_layout()
    return _finish(fig, path)


def partition_figure(p, family, title="", path=None):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    xs, ys = _planar(p)
    cmap = plt.get_cmap("tab20")
    for k, c in enumerate(family.cells):
        ax.scatter([xs[i] for i in c.members], [ys[i] for i in c.members], s=12, color=cmap(k % 20))
    ax.set_title(title or f"{len(family)} cells, mesh {family.mesh()}")
    fig.tight_layout()
    return _finish(fig, path)


def bounds_figure(runs: dict, title="", path=None):
    """Per-step bounds of back-and-forth traces against the 2^(-floor(n/2)+1) envelope."""
    fig, ax = plt.subplots(figsize=(6, 4))
    longest = 0
    for name, bounds in runs.items():
        ax.plot(range(len(bounds)), [float(b) for b in bounds], marker="o", ms=3, label=str(name))
        longest = max(longest, len(bounds))
    ax.plot(range(longest), [2.0 ** (-(n // 2) + 1) for n in range(longest)], "k--", lw=1, label="envelope")
    ax.set_yscale("log", base=2)
    ax.set_xlabel("step n")
    ax.set_ylabel("bound")
    ax.legend(fontsize=7)
    ax.set_title(title or "back-and-forth bounds")
    fig.tight_layout()
    return _finish(fig, path)


def family_figure(sets, horizon: int = 24, title="", path=None):
    fig, ax = plt.subplots(figsize=(6, max(2.5, 0.12 * len(sets) + 1)))
    grid = [[1 if n in m else 0 for n in range(1, horizon + 1)] for m in sets]
    ax.imshow(grid, aspect="auto", cmap="Greys", interpolation="nearest")
    ax.set_xticks(range(0, horizon, 2), [str(n) for n in range(1, horizon + 1, 2)], fontsize=6)
    ax.set_xlabel("k")
    ax.set_ylabel("member")
    ax.set_title(title or "membership k in M")
    fig.tight_layout()
    return _finish(fig, path)
