"""Rendering: one figure per spec, deterministic output, atomic writes.

Figure kinds
------------
energy-decay
    log-scale energy versus time, one curve per oscillation frequency eta,
    from ``t,E,D,eta`` records.
resolvent-vs-tau
    <tau> * resolvent norm versus tau per eta for controlled damping, or the
    normalized ``bound_ratio`` column for the trapped-ray regime, from
    resolvent-scan CSVs.  An optional overlay draws the constant-damping
    closed form 1/(a0 tau) above the mass shell.
semiclassical-heatmap
    eps*h*norm over the (h, eps) grid of a semiclassical scan.
uniformity-bars
    fitted decay rate gamma (or verified polynomial constant c_hat) per eta,
    from fit CSVs.

Rendering is deterministic for identical inputs: fixed style, hashed SVG
ids, no embedded timestamps.  Output files are written atomically
(temp-then-rename), so a failed render never leaves a partial file.
"""

from __future__ import annotations

import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from kgplots.spec import REQUIRED_COLUMNS, FigureSpec, SpecError, load_table

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "kgplots",
}

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _floats(table: dict, col: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in table[col]])
    except ValueError as exc:
        raise SpecError(f"column '{col}' holds non-numeric data: {exc}") from exc


def _eta_groups(tables: list, eta_col: str = "eta"):
    """Yield (eta, table) pairs sorted by eta, one group per distinct eta."""
    groups = {}
    for table in tables:
        for eta in sorted(set(_floats(table, eta_col))):
            mask = _floats(table, eta_col) == eta
            groups.setdefault(eta, []).append(
                {col: np.asarray(vals)[mask] for col, vals in
                 ((c, _floats(table, c)) for c in table
                  if _numeric(table[c]))})
    return sorted(groups.items())


def _numeric(values) -> bool:
    try:
        float(values[0])
        return True
    except (ValueError, TypeError):
        return False


def _draw_energy_decay(ax, tables, spec):
    e_min, e_max = np.inf, -np.inf
    for i, (eta, parts) in enumerate(_eta_groups(tables)):
        for j, part in enumerate(parts):
            ax.semilogy(part["t"], part["E"], color=_COLORS[i % len(_COLORS)],
                        label=f"eta = {eta:g}" if j == 0 else None)
            e_min = min(e_min, float(np.min(part["E"])))
            e_max = max(e_max, float(np.max(part["E"])))
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.legend()
    return {"E_min": e_min, "E_max": e_max}


def _constant_closed_form(taus: np.ndarray, a0: float, m: float) -> np.ndarray:
    """Resolvent norm of the constant-damping pencil, maximized over fibers.

    With a = a0 the symbol is x + m - tau^2 - i tau a0 with x = |2 pi n +
    sigma|^2 ranging over [0, inf); the closest approach to zero is tau*a0
    above the mass shell and the corner distance below it.
    """
    taus = np.asarray(taus, dtype=float)
    above = taus**2 >= m
    dist = np.where(above, np.abs(taus) * a0,
                    np.hypot(m - taus**2, taus * a0))
    return 1.0 / dist


def _draw_resolvent_vs_tau(ax, tables, spec):
    column = spec.overlay.get("column", "tau_bracket_norm")
    if column not in ("tau_bracket_norm", "bound_ratio"):
        raise SpecError(f"resolvent-vs-tau column must be tau_bracket_norm "
                        f"or bound_ratio, got {column}")
    info = {}
    for i, (eta, parts) in enumerate(_eta_groups(tables)):
        for j, part in enumerate(parts):
            order = np.argsort(part["tau"])
            ax.plot(part["tau"][order], part[column][order], marker="o",
                    markersize=3, color=_COLORS[i % len(_COLORS)],
                    label=f"eta = {eta:g}" if j == 0 else None)
    if spec.overlay.get("kind") == "constant-closed-form":
        a0 = float(spec.overlay.get("a0", 1.0))
        m = float(spec.overlay.get("m", 1.0))
        devs = []
        for eta, parts in _eta_groups(tables):
            for part in parts:
                taus = part["tau"]
                exact = np.hypot(1.0, taus) * _constant_closed_form(taus, a0, m)
                computed = part[column]
                devs.append(np.max(np.abs(computed - exact) / exact))
        taus = np.geomspace(
            min(np.min(p["tau"]) for _, ps in _eta_groups(tables) for p in ps),
            max(np.max(p["tau"]) for _, ps in _eta_groups(tables) for p in ps),
            200)
        ax.plot(taus, np.hypot(1.0, taus) * _constant_closed_form(taus, a0, m),
                "k--", linewidth=1, label="closed form (a constant)")
        info["overlay_max_rel_dev"] = float(max(devs))
    ax.set_xlabel("tau")
    ax.set_ylabel(column.replace("_", " "))
    ax.legend()
    return info


def _draw_semiclassical_heatmap(ax, tables, spec):
    # scan rows record the equivalent pencil parameters eta = 1/eps,
    # tau = 1/(eps h); invert them to recover the (h, eps) grid.
    eps_all, h_all, field = [], [], []
    for table in tables:
        eta = _floats(table, "eta")
        tau = _floats(table, "tau")
        norm = _floats(table, "norm")
        eps = 1.0 / eta
        h = eta / tau
        eps_all.extend(eps)
        h_all.extend(h)
        field.extend(eps * h * norm)
    eps_axis = np.array(sorted(set(np.round(eps_all, 12))))
    h_axis = np.array(sorted(set(np.round(h_all, 12))))
    grid = np.full((len(eps_axis), len(h_axis)), np.nan)
    for e, h, v in zip(eps_all, h_all, field):
        i = int(np.argmin(np.abs(eps_axis - e)))
        j = int(np.argmin(np.abs(h_axis - h)))
        grid[i, j] = v
    if np.isnan(grid).any():
        raise SpecError("semiclassical scan does not cover a full (h, eps) grid")
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(h_axis)), [f"{h:g}" for h in h_axis])
    ax.set_yticks(range(len(eps_axis)), [f"{e:g}" for e in eps_axis])
    ax.set_xlabel("h")
    ax.set_ylabel("eps")
    ax.grid(False)
    plt.colorbar(im, ax=ax, label="eps * h * norm")
    return {"field_min": float(np.min(grid)), "field_max": float(np.max(grid))}


def _draw_uniformity_bars(ax, tables, spec):
    etas, values, models = [], [], []
    for table in tables:
        etas.extend(_floats(table, "eta"))
        values.extend(_floats(table, "gamma_or_c"))
        models.extend(table["model"])
    order = np.argsort(etas)
    etas = np.asarray(etas)[order]
    values = np.asarray(values)[order]
    label = "gamma" if models[0] == "exponential" else "c_hat"
    ax.bar(range(len(etas)), values, color=_COLORS[0],
           tick_label=[f"{e:g}" for e in etas])
    ax.set_xlabel("eta")
    ax.set_ylabel(label)
    vmin, vmax = float(np.min(values)), float(np.max(values))
    return {"ratio": vmax / vmin if vmin > 0 else float("inf")}


_DRAWERS = {
    "energy-decay": _draw_energy_decay,
    "resolvent-vs-tau": _draw_resolvent_vs_tau,
    "semiclassical-heatmap": _draw_semiclassical_heatmap,
    "uniformity-bars": _draw_uniformity_bars,
}


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns drawer metadata (overlay deviations etc.)."""
    required = REQUIRED_COLUMNS[spec.kind]
    tables = [load_table(p, required) for p in spec.inputs]
    for table in tables:
        for col in required:
            if col != "model":
                _floats(table, col)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            info = _DRAWERS[spec.kind](ax, tables, spec)
            if spec.title:
                ax.set_title(spec.title)
            if spec.kind != "semiclassical-heatmap":
                ax.set_xscale(spec.x_scale)
                if spec.kind != "energy-decay":
                    ax.set_yscale(spec.y_scale)
            _atomic_savefig(fig, spec.output)
        finally:
            plt.close(fig)
    return info


def _atomic_savefig(fig, path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    suffix = os.path.splitext(path)[1]
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=suffix)
    os.close(fd)
    try:
        fig.savefig(tmp, format=suffix.lstrip("."), metadata=_no_dates(suffix))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _no_dates(suffix: str) -> dict:
    if suffix == ".svg":
        return {"Date": None}
    return {}
