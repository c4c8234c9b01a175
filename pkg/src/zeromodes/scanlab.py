"""Parameter scans, log fits, saturation detection and figure tables.

A scan evaluates one model pipeline on every point of a one-dimensional
grid.  Grid points are independent, so they can run in a process pool;
rows always come back in grid order.  Tables are written as CSV with
``#``-prefixed header lines that carry the full configuration, floats
formatted with 17 significant digits so reruns are byte-identical.
"""

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import boson_chain, boson_pair, fermion_chain
from .errors import FitError, ZeromodesError

__all__ = [
    "Model",
    "Sweep",
    "ScanConfig",
    "ScanTable",
    "FitResult",
    "Saturation",
    "MAX_GRID",
    "make_grid",
    "parse_grid",
    "run_scan",
    "fit_log",
    "detect_saturation",
    "saturation_vs_L1",
    "asymptotic_table",
    "format_value",
    "table_to_csv",
    "table_to_json",
    "write_table",
    "read_csv",
    "figure_tables",
]

MAX_GRID = 10**6


class Model(enum.Enum):
    BOSON_PAIR = "BosonPair"
    BOSON_CHAIN = "BosonChain"
    FERMION = "Fermion"


class Sweep(enum.Enum):
    TAU = "Tau"
    MASS = "Mass"
    K = "K"
    SUBSYSTEM_L = "SubsystemL"


_ALLOWED = {
    Model.BOSON_PAIR: (Sweep.TAU,),
    Model.BOSON_CHAIN: (Sweep.MASS, Sweep.SUBSYSTEM_L),
    Model.FERMION: (Sweep.K, Sweep.SUBSYSTEM_L),
}

COLUMNS = {
    Model.BOSON_PAIR: ("param", "S", "alpha", "mu_minus", "zero_mode", "status", "error"),
    Model.BOSON_CHAIN: (
        "param", "S", "max_nu", "min_mu", "zero_mode_count", "chain_min_freq", "status", "error",
    ),
    Model.FERMION: (
        "param", "S", "min_dist_half", "near_half_count", "gap", "status", "error",
    ),
}


def make_grid(start, stop, count, spacing="linear"):
    """``count`` points from ``start`` to ``stop`` inclusive, linear or log spaced."""
    count = int(count)
    if count < 1 or count > MAX_GRID:
        raise ValueError(f"grid count must be in [1, {MAX_GRID}], got {count}")
    if spacing == "linear":
        vals = np.linspace(start, stop, count)
    elif spacing == "log":
        if not (start > 0 and stop > 0):
            raise ValueError("log grids need positive end points")
        vals = np.geomspace(start, stop, count)
    else:
        raise ValueError(f"spacing must be 'linear' or 'log', got {spacing!r}")
    return tuple(float(v) for v in vals)


def parse_grid(text):
    """Parse ``"a,b,c"`` (explicit) or ``"start:stop:count[:log]"``."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"range grid must be start:stop:count[:linear|log], got {text!r}")
        spacing = parts[3] if len(parts) == 4 else "linear"
        return make_grid(float(parts[0]), float(parts[1]), int(parts[2]), spacing)
    vals = tuple(float(v) for v in text.split(",") if v.strip())
    if not vals:
        raise ValueError("empty grid")
    return vals


@dataclass(frozen=True)
class ScanConfig:
    """What to scan: model, swept variable, grid and the fixed parameters."""

    model: Model
    sweep: Sweep
    grid: tuple
    fixed: dict = field(default_factory=dict)
    out: str = ""

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "sweep", Sweep(self.sweep))
        grid = tuple(float(x) for x in self.grid)
        object.__setattr__(self, "grid", grid)
        if self.sweep not in _ALLOWED[self.model]:
            raise ValueError(f"{self.model.value} cannot sweep {self.sweep.value}")
        if not grid:
            raise ValueError("grid must be non-empty")
        if len(grid) > MAX_GRID:
            raise ValueError(f"grid has {len(grid)} points, limit is {MAX_GRID}")
        if not all(math.isfinite(x) for x in grid):
            raise ValueError("grid values must be finite")
        steps = np.diff(grid)
        if len(grid) > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("grid must be strictly monotone")
        if self.sweep is Sweep.SUBSYSTEM_L and not all(x == int(x) and x >= 1 for x in grid):
            raise ValueError("subsystem sizes must be positive integers")

    def to_dict(self):
        return {
            "model": self.model.value,
            "sweep": self.sweep.value,
            "grid": list(self.grid),
            "fixed": dict(sorted(self.fixed.items())),
            "out": self.out,
        }


@dataclass
class ScanTable:
    """Rows (dicts keyed by ``columns``) plus the configuration that produced them."""

    config: dict
    columns: tuple
    rows: list

    def column(self, name):
        return np.array([r[name] for r in self.rows], dtype=float)

    def ok_rows(self):
        return [r for r in self.rows if r.get("status", "ok") == "ok"]


@dataclass(frozen=True)
class FitResult:
    A: float
    B: float
    residual_rms: float
    window: tuple


@dataclass(frozen=True)
class Saturation:
    saturated: bool
    plateau_value: float
    onset_index: int


# -- row evaluation -------------------------------------------------------


def _boson_pair_row(fixed, tau):
    base = boson_pair.PairCouplings(*fixed.get("base", (2.0, 1.0, 2.0, 1.0)))
    kind = boson_pair.PathKind(fixed.get("kind", "II"))
    path = boson_pair.DegeneracyPath(base, kind, fixed.get("p_j", 1.0), fixed.get("p_l", 1.0))
    tol = fixed.get("tol") or boson_pair.ZERO_TOL_REL
    u, v = boson_pair.path_gaps(path, tau)
    alpha = boson_pair.alpha_from_gaps(base.k, base.m, u, v)
    mu_p = (2.0 * base.k + u) * (2.0 * base.m + v)
    return {
        "S": boson_pair.entropy_from_alpha(alpha),
        "alpha": alpha,
        "mu_minus": u * v,
        "zero_mode": int(u * v < tol * mu_p),
    }


def _boson_chain_row(fixed, sweep, x):
    n = int(fixed.get("n", 40))
    mass = float(fixed.get("mass", 0.1))
    sub = fixed.get("subsystem", n // 2)
    if sweep is Sweep.MASS:
        mass = x
    else:
        sub = int(x)
    sites = tuple(range(int(sub))) if np.isscalar(sub) else tuple(int(s) for s in sub)
    spec = boson_chain.ChainSpec(n, mass, fixed.get("lattice_a", 1.0), fixed.get("boundary", "periodic"))
    eps = fixed.get("tol") or boson_chain.EPS_ZERO
    X, P = boson_chain.build_couplings(spec)
    cov = boson_chain.ground_covariance(X, P)
    sp = boson_chain.symplectic_spectrum(boson_chain.reduce(cov, sites), eps)
    return {
        "S": boson_chain.spectrum_entropy(sp.symplectic_eigenvalues),
        "max_nu": float(sp.symplectic_eigenvalues[-1]),
        "min_mu": float(sp.ent_mode_frequencies[-1]),
        "zero_mode_count": sp.zero_mode_count,
        "chain_min_freq": boson_chain.chain_min_frequency(X, P),
    }


def _fermion_row(fixed, sweep, x):
    K = float(fixed.get("K", 0.0))
    L = int(fixed.get("L", 1))
    if sweep is Sweep.K:
        K = x
    else:
        L = int(x)
    n_cells = fixed.get("n_cells")
    spec = (
        fermion_chain.FermionSpec.thermodynamic(K, L)
        if n_cells is None
        else fermion_chain.FermionSpec.from_K(K, int(n_cells))
    )
    corr = fermion_chain.assemble_correlation(L, spec)
    lam = corr.eigenvalues
    return {
        "S": fermion_chain.fermion_entropy(corr),
        "min_dist_half": float(np.min(np.abs(lam - 0.5))),
        "near_half_count": fermion_chain.count_near_half(lam, fixed.get("delta", 0.05)),
        "gap": float(np.min(fermion_chain.dispersion(
            fermion_chain.momentum_grid(spec.n_cells, spec.lattice_a), spec.mass, spec.lattice_a,
        ))) * spec.lattice_a,
    }


def _evaluate(model, sweep, fixed, x):
    """One table row; pipeline errors are caught and recorded, not raised."""
    columns = COLUMNS[model]
    row = {c: math.nan for c in columns}
    row["param"] = x
    try:
        if model is Model.BOSON_PAIR:
            row.update(_boson_pair_row(fixed, x))
        elif model is Model.BOSON_CHAIN:
            row.update(_boson_chain_row(fixed, sweep, x))
        else:
            row.update(_fermion_row(fixed, sweep, x))
        row["status"], row["error"] = "ok", ""
    except (ZeromodesError, ValueError) as exc:
        row["status"], row["error"] = "failed", f"{type(exc).__name__}: {exc}"
    return row


def run_scan(cfg, workers=1):
    """Evaluate ``cfg`` on every grid point.

    With ``workers > 1`` points are distributed over a process pool; the
    result does not depend on the worker count.
    """
    fn = partial(_evaluate, cfg.model, cfg.sweep, dict(cfg.fixed))
    if workers and workers > 1 and len(cfg.grid) > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            rows = list(pool.map(fn, cfg.grid))
    else:
        rows = [fn(x) for x in cfg.grid]
    return ScanTable(cfg.to_dict(), COLUMNS[cfg.model], rows)


# -- analysis -------------------------------------------------------------


def _xy(table, x_column, y_column):
    if isinstance(table, ScanTable):
        return table.column(x_column), table.column(y_column)
    x, y = table
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def fit_log(table, x_column="param", window=None, y_column="S"):
    """Least-squares fit ``y = A ln(x) + B`` on rows ``window = (lo, hi)`` (half-open).

    ``table`` is a :class:`ScanTable` or an ``(x, y)`` pair.  The default
    window is the upper half of the rows.

    Raises
    ------
    FitError
        Fewer than three points, non-positive or non-finite data, or all
        ``x`` equal.
    """
    x, y = _xy(table, x_column, y_column)
    n = x.size
    lo, hi = (n // 2, n) if window is None else (int(window[0]), int(window[1]))
    if not 0 <= lo < hi <= n:
        raise FitError(f"window {(lo, hi)} outside the {n} available rows")
    xs, ys = x[lo:hi], y[lo:hi]
    if xs.size < 3:
        raise FitError(f"need at least 3 points in the window, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise FitError("non-finite values in the fit window")
    if np.any(xs <= 0):
        raise FitError("log fit needs x > 0")
    t = np.log(xs)
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx <= 1e-300:
        raise FitError("singular design: all x equal")
    A = float(tc @ (ys - ys.mean())) / sxx
    B = float(ys.mean() - A * t.mean())
    resid = ys - (A * t + B)
    return FitResult(A, B, float(math.sqrt(np.mean(resid**2))), (lo, hi))


def detect_saturation(table, rel_tol=1e-2, column="S"):
    """Does the tail of a sorted table sit on a plateau?

    The last quarter of the rows is the tail; it is saturated when its spread
    is below ``rel_tol`` times its mean, which is the plateau value.  The
    onset is the first row from which every later row stays within
    ``rel_tol`` of the plateau (-1 when not saturated).
    """
    y = table.column(column) if isinstance(table, ScanTable) else np.asarray(table, dtype=float)
    n = y.size
    if n < 8:
        raise ValueError(f"saturation detection needs at least 8 rows, got {n}")
    tail = y[n - math.ceil(n / 4):]
    plateau = float(tail.mean())
    thresh = rel_tol * abs(plateau)
    saturated = bool(tail.max() - tail.min() <= thresh)
    onset = -1
    if saturated:
        inside = np.abs(y - plateau) <= thresh
        bad = np.nonzero(~inside)[0]
        onset = 0 if bad.size == 0 else int(bad[-1]) + 1
    return Saturation(saturated, plateau, onset)


def saturation_vs_L1(K_grid, L_max=32, n_cells=None, rel_tol=1e-2):
    """Plateau entropy of an ``L = 1..L_max`` scan against the single-cell entropy."""
    rows = []
    for K in K_grid:
        K = float(K)
        if not K > 0:
            raise ValueError(f"K must be positive, got {K}")
        S = fermion_chain.entropy_curve(K, range(1, L_max + 1), n_cells)
        sat = detect_saturation(S, rel_tol)
        plateau, s1 = sat.plateau_value, float(S[0])
        gap = abs(plateau - s1) / plateau if plateau > 0 else (0.0 if s1 == 0 else math.inf)
        rows.append({
            "K": K, "plateau": plateau, "S_L1": s1, "rel_gap": gap,
            "saturated": int(sat.saturated), "onset_index": sat.onset_index,
        })
    config = {"table": "saturation_vs_L1", "L_max": L_max, "n_cells": n_cells, "rel_tol": rel_tol}
    return ScanTable(config, ("K", "plateau", "S_L1", "rel_gap", "saturated", "onset_index"), rows)


def asymptotic_table(K_grid):
    rows = []
    for K in K_grid:
        est = fermion_chain.asymptotic_entropy(K)
        rows.append({
            "K": est.K, "zeta_plus": est.roots[0], "zeta_minus": est.roots[1],
            "S_estimate": est.S_estimate, "small_K_law": est.small_K_law,
        })
    cols = ("K", "zeta_plus", "zeta_minus", "S_estimate", "small_K_law")
    return ScanTable({"table": "asymptotic"}, cols, rows)


# -- output ---------------------------------------------------------------


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def table_to_csv(table):
    buf = io.StringIO()
    buf.write("# zeromodes table\n")
    buf.write("# config: " + json.dumps(table.config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([format_value(r[c]) for c in table.columns])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def table_to_json(table):
    doc = {
        "config": table.config,
        "columns": list(table.columns),
        "rows": [{c: _json_safe(r[c]) for c in table.columns} for r in table.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_table(table, path, json_mirror=False):
    """Write CSV to ``path``; with ``json_mirror`` also ``path`` with a ``.json`` suffix."""
    with open(path, "w", newline="") as fh:
        fh.write(table_to_csv(table))
    if json_mirror:
        jpath = str(path).rsplit(".", 1)[0] + ".json"
        with open(jpath, "w") as fh:
            fh.write(table_to_json(table))
        return jpath
    return None


def _parse_cell(s):
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(path):
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    config = {}
    body = []
    for line in lines:
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: "):])
        elif not line.startswith("#"):
            body.append(line)
    reader = csv.reader(body)
    columns = tuple(next(reader))
    rows = [{c: _parse_cell(v) for c, v in zip(columns, rec)} for rec in reader]
    return ScanTable(config, columns, rows)


# -- figure data ----------------------------------------------------------

PATH_Q = tuple(range(0, 9))
EE_VS_K_GRID = make_grid(1e-3, 10.0, 17, "log")
EE_VS_K_L = (1, 4, 16, 64)
EE_VS_L_K = (0.0, 0.01, 0.1, 1.0, 3.0)
EE_VS_L_MAX = 128
SAT_FIT_K = (1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 50.0)


def _paths_table():
    base = boson_pair.PairCouplings(2.0, 1.0, 2.0, 1.0)
    rows = []
    for kind in (boson_pair.PathKind.PATH_I, boson_pair.PathKind.PATH_II, boson_pair.PathKind.PATH_III):
        path = boson_pair.DegeneracyPath(base, kind)
        for q in PATH_Q:
            tau = 1.0 - 10.0 ** (-q)
            rows.append({
                "path": kind.value, "q": q, "tau": tau,
                "alpha": boson_pair.path_alpha(path, tau), "S": boson_pair.path_entropy(path, tau),
            })
    return ScanTable({"table": "paths", "base": [2, 1, 2, 1]}, ("path", "q", "tau", "alpha", "S"), rows)


def _ee_vs_K_table():
    rows = []
    for L in EE_VS_K_L:
        for K in EE_VS_K_GRID:
            rows.append({"L": L, "K": K, "S": fermion_chain.entropy(K, L)})
    return ScanTable({"table": "ee_vs_K", "n_cells": "max(4L, 4096)"}, ("L", "K", "S"), rows)


def _ee_vs_L_table():
    rows = []
    Ls = range(1, EE_VS_L_MAX + 1)
    for K in EE_VS_L_K:
        for L, S in zip(Ls, fermion_chain.entropy_curve(K, Ls)):
            rows.append({"K": K, "L": L, "S": float(S)})
    return ScanTable({"table": "ee_vs_L", "n_cells": "max(4L, 4096)"}, ("K", "L", "S"), rows)


def figure_tables():
    """Data behind the four reference figures, keyed by file stem."""
    return {
        "paths": _paths_table(),
        "ee_vs_K": _ee_vs_K_table(),
        "ee_vs_L": _ee_vs_L_table(),
        "sat_fit": saturation_vs_L1(SAT_FIT_K),
    }
