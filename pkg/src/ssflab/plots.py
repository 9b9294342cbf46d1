"""Figure rendering for experiment reports.

Each command's report can be rendered to PNG files next to the CSV output.
Figures are a convenience view of the same tables; the delimited output
remains the regression surface.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .report import Report

DPI = 150


def _table(report: Report, name: str):
    for t in report.tables:
        if t.name == name:
            return t
    return None


def _save(fig, out_dir: Path, stem: str) -> Path:
    path = out_dir / f"{stem}.png"
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_ptf(report: Report, out_dir: Path):
    t = _table(report, "trace_formula")
    if t is None:
        return []
    data = np.array([[float(v) for v in row] for row in t.rows])
    ts, lhs, quad, erfv, res_lr, res_quad = data.T[:6]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax1.plot(ts, lhs, "o-", label="heat-trace gap (lhs)")
    ax1.plot(ts, erfv, "s--", label="erf form (rhs)")
    ax1.plot(ts, quad, "x:", label="quadrature (rhs)")
    ax1.set_xlabel("t")
    ax1.set_ylabel("value")
    ax1.legend(fontsize=8)
    ax2.semilogy(ts, np.maximum(res_lr, 1e-18), "o-", label="|lhs - rhs|")
    ax2.semilogy(ts, np.maximum(res_quad, 1e-18), "s--", label="|quad - erf|")
    ax2.set_xlabel("t")
    ax2.set_ylabel("residual")
    ax2.legend(fontsize=8)
    return [_save(fig, out_dir, f"{report.command}_trace_formula")]


def _staircase(ax, rows, label=None):
    if not rows:
        return
    bp = np.array([r[0] for r in rows])
    right = np.array([r[1] for r in rows])
    xs = np.concatenate(([bp[0] - 0.5 * max(1.0, bp[-1] - bp[0])], bp, [bp[-1] + 0.5 * max(1.0, bp[-1] - bp[0])]))
    ys = np.concatenate(([0.0], right, [right[-1]]))
    ax.step(xs, ys, where="post", label=label)


def render_ssf(report: Report, out_dir: Path):
    out = []
    t = _table(report, "shift_function")
    if t is not None:
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        _staircase(ax, [(float(r[0]), float(r[1])) for r in t.rows])
        ax.set_xlabel("lambda")
        ax.set_ylabel("xi")
        out.append(_save(fig, out_dir, f"{report.command}_shift_function"))
    t = _table(report, "cutoff_gaps")
    if t is not None and t.rows:
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        lv = [float(r[0]) for r in t.rows]
        gp = [max(float(r[1]), 1e-18) for r in t.rows]
        ax.semilogy(lv, gp, "o-")
        ax.set_xlabel("cutoff level")
        ax.set_ylabel("weighted L1 gap")
        out.append(_save(fig, out_dir, f"{report.command}_cutoff_gaps"))
    return out


def render_pushnitski(report: Report, out_dir: Path):
    out = []
    t = _table(report, "abel")
    if t is not None:
        data = np.array([[float(v) for v in row] for row in t.rows])
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.plot(data[:, 0], data[:, 1], "o", label="windowed discrete xi")
        ax.plot(data[:, 0], data[:, 2], "s--", label="Abel transform")
        ax.set_xlabel("lambda")
        ax.set_ylabel("xi(lambda; H2, H1)")
        ax.legend(fontsize=8)
        out.append(_save(fig, out_dir, f"{report.command}_abel"))
    t = _table(report, "laplace")
    if t is not None:
        data = np.array([[float(v) for v in row] for row in t.rows])
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.semilogy(data[:, 0], np.maximum(data[:, 3], 1e-18), "o-")
        ax.set_xlabel("t")
        ax.set_ylabel("Laplace residual")
        out.append(_save(fig, out_dir, f"{report.command}_laplace"))
    return out


def render_witten(report: Report, out_dir: Path):
    out = []
    t = _table(report, "semigroup_trace")
    if t is not None:
        data = np.array([[float(v) for v in row] for row in t.rows])
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.plot(data[:, 0], data[:, 1], "o-", label="tr(e^{-tH1} - e^{-tH2})")
        ax.set_xlabel("t")
        ax.set_ylabel("semigroup value")
        ax.legend(fontsize=8)
        out.append(_save(fig, out_dir, f"{report.command}_semigroup"))
    t = _table(report, "resolvent_trace")
    if t is not None:
        data = np.array([[float(v) for v in row] for row in t.rows])
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        for k in sorted(set(int(r) for r in data[:, 0])):
            sel = data[:, 0] == k
            ax.plot(data[sel, 1], data[sel, 2], "o-", label=f"k={k}")
        ax.set_xlabel("lambda")
        ax.set_ylabel("resolvent value")
        ax.legend(fontsize=8)
        out.append(_save(fig, out_dir, f"{report.command}_resolvent"))
    return out


def render_dirac(report: Report, out_dir: Path):
    out = []
    t = _table(report, "spectrum")
    if t is not None:
        data = np.array([[float(v) for v in row] for row in t.rows])
        fig, ax = plt.subplots(figsize=(5.2, 3.4))
        ax.plot(data[:, 0], data[:, 1], ".", ms=3, label="assembled")
        ax.plot(data[:, 0], data[:, 2], "x", ms=3, label="symbol")
        ax.set_xlabel("index")
        ax.set_ylabel("eigenvalue")
        ax.legend(fontsize=8)
        out.append(_save(fig, out_dir, f"{report.command}_spectrum"))
    t = _table(report, "diagnostics")
    if t is not None and t.rows:
        labels = [f"{r[0]}:{r[1]}" for r in t.rows]
        ratios = [float(r[4]) for r in t.rows]
        fig, ax = plt.subplots(figsize=(5.6, 3.4))
        ax.bar(range(len(ratios)), ratios)
        ax.axhline(0.8, color="k", lw=0.8, ls="--")
        ax.axhline(1.25, color="k", lw=0.8, ls="--")
        ax.set_xticks(range(len(ratios)))
        ax.set_xticklabels(labels, rotation=45, fontsize=7)
        ax.set_ylabel("refinement ratio")
        out.append(_save(fig, out_dir, f"{report.command}_diagnostics"))
    return out


RENDERERS = {
    "ptf": render_ptf,
    "ssf": render_ssf,
    "pushnitski": render_pushnitski,
    "witten": render_witten,
    "dirac": render_dirac,
}


def render(report: Report, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    renderer = RENDERERS.get(report.command)
    return renderer(report, out) if renderer else []
