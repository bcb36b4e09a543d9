"""Parameter sweeps, figure presets and CSV output.

A :class:`SweepSpec` names one swept variable, a grid, the modes, the metrics
and the estimators to evaluate. :func:`run_sweep` returns a
:class:`SweepTable` whose rows follow the grid order exactly. Cells whose
estimator is undefined at that point (benchmark modes have no closed form,
an asymptote outside its regime, ...) stay empty and carry a reason code in
the ``reasons`` column.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from . import metrics as am
from . import montecarlo as mc
from .metrics import Mode
from .params import SystemParams

__all__ = [
    "SweepSpec",
    "SweepRow",
    "SweepTable",
    "ESTIMATORS",
    "METRICS",
    "PRESETS",
    "run_sweep",
    "figure_preset",
    "read_csv",
    "column_name",
]

ESTIMATORS = ("analytic", "asymptotic", "large-N", "monte-carlo")
METRICS = ("JOP", "JIP", "SEE", "normalized-JIOP")
VARIABLES = ("Ps_dbm", "tau", "N", "N1")
PARAM_COLUMNS = ("Ps_dbm", "tau", "N", "N1", "N2")


def column_name(metric: str, mode: Mode, estimator: str) -> str:
    return f"{metric}[{mode.value}]:{estimator}"


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: `variable` runs over ``arange(start, stop + step/2, step)``.

    ``groups`` lists extra override sets; the grid is repeated once per group
    (for example one curve per N). ``fixed`` holds overrides shared by every
    row. Keys in both accept :class:`SystemParams` field names and the
    ``*_dbm`` variants.
    """

    variable: str
    range: tuple[float, float, float]
    modes: tuple[Mode, ...] = (Mode.I, Mode.II, Mode.III)
    metrics: tuple[str, ...] = ("JOP", "JIP")
    estimators: tuple[str, ...] = ("analytic",)
    n_trials: int = 100_000
    seed: int = 0
    fixed: dict[str, Any] = field(default_factory=dict)
    groups: tuple[dict[str, Any], ...] = ({},)
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(Mode.parse(m) for m in self.modes))
        self.validate()

    def validate(self) -> None:
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}, got {self.variable!r}")
        start, stop, step = self.range
        if not step > 0:
            raise ValueError(f"step must be positive, got {step}")
        if stop < start:
            raise ValueError(f"empty range {self.range}")
        if not self.modes:
            raise ValueError("at least one mode is required")
        for e in self.estimators:
            if e not in ESTIMATORS:
                raise ValueError(f"unknown estimator {e!r}; expected a subset of {ESTIMATORS}")
        for m in self.metrics:
            if m not in METRICS:
                raise ValueError(f"unknown metric {m!r}; expected a subset of {METRICS}")
        if self.variable == "N1" and set(self.modes) != {Mode.III}:
            raise ValueError("an N1 sweep only makes sense for mode III")
        if "monte-carlo" in self.estimators and self.n_trials < 1000:
            raise ValueError("n_trials must be >= 1000")
        if not self.groups:
            raise ValueError("groups must contain at least one (possibly empty) override set")
        # building every grid point validates the parameters before any work starts
        for group in self.groups:
            for x in self.grid():
                self.point_params(group, x)

    def grid(self) -> np.ndarray:
        start, stop, step = self.range
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = start + step * np.arange(count)
        if self.variable in ("N", "N1"):
            values = np.round(values).astype(int)
        return values

    def point_params(self, group: dict[str, Any], x) -> SystemParams:
        changes = {**self.fixed, **group}
        if self.variable in ("N", "N1"):
            changes[self.variable] = int(x)
        else:
            changes[self.variable] = float(x)
        if self.variable == "N1":
            changes["N2"] = changes.get("N", SystemParams().N) - int(x)
        return SystemParams().evolve(**changes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "variable": self.variable,
            "range": list(self.range),
            "modes": [m.value for m in self.modes],
            "metrics": list(self.metrics),
            "estimators": list(self.estimators),
            "n_trials": self.n_trials,
            "seed": self.seed,
            "fixed": self.fixed,
            "groups": list(self.groups),
        }


@dataclass
class SweepRow:
    params: dict[str, float]
    values: dict[str, float | None]
    reasons: dict[str, str] = field(default_factory=dict)


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[SweepRow]
    header: dict[str, Any]

    def column(self, name: str) -> np.ndarray:
        if name in PARAM_COLUMNS:
            return np.array([r.params[name] for r in self.rows], dtype=float)
        return np.array([np.nan if r.values.get(name) is None else r.values[name] for r in self.rows])

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        for key, value in self.header.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*PARAM_COLUMNS, *self.columns, "reasons"])
        for row in self.rows:
            cells = [_fmt(row.params[c]) for c in PARAM_COLUMNS]
            cells += ["" if row.values.get(c) is None else _fmt(row.values[c]) for c in self.columns]
            cells.append(";".join(f"{k}={v}" for k, v in row.reasons.items()))
            writer.writerow(cells)
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def read_csv(source: str | Path) -> SweepTable:
    """Parse a CSV written by :meth:`SweepTable.to_csv` (a path or the text itself)."""
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
    header: dict[str, Any] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, value = line[2:].split(": ", 1)
            header[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    names = next(reader)
    columns = names[len(PARAM_COLUMNS):-1]
    rows = []
    for cells in reader:
        params = {}
        for name, cell in zip(PARAM_COLUMNS, cells):
            params[name] = int(cell) if name in ("N", "N1", "N2") else float(cell)
        values = {c: (None if cell == "" else float(cell))
                  for c, cell in zip(columns, cells[len(PARAM_COLUMNS):-1])}
        reasons = dict(item.split("=", 1) for item in cells[-1].split(";") if item)
        rows.append(SweepRow(params, values, reasons))
    return SweepTable(columns, rows, header)


# -- evaluation --------------------------------------------------------------------

_CLOSED: dict[str, Callable] = {
    "JOP": am.jop,
    "JIP": am.jip,
    "SEE": am.see,
    "normalized-JIOP": am.normalized_jiop,
}


def _asymptotic(metric: str, mode: Mode, p: SystemParams) -> float:
    if metric == "JOP":
        return am.jop_asymptotic(mode, p).value
    if metric == "JIP":
        return am.jip_asymptotic(mode, p).value
    raise NotImplementedError


def _large_n(metric: str, mode: Mode, p: SystemParams) -> float:
    if metric == "JOP":
        return am.jop_large_n(p, mode).value
    if metric == "JIP":
        return am.jip_large_n(mode, p).value
    raise NotImplementedError


def _reason(exc: Exception) -> str:
    if isinstance(exc, am.UnsupportedModeError):
        return "unsupported-mode"
    if isinstance(exc, am.RegimeError):
        return "regime"
    if isinstance(exc, NotImplementedError):
        return "not-defined"
    if isinstance(exc, am.NumericalIntegrityError):
        return "numerical-integrity"
    raise exc


def _analytic_cells(spec_dict: dict, modes: Sequence[Mode], p: SystemParams):
    """Closed-form, asymptotic and large-N cells of one grid point."""
    values: dict[str, float | None] = {}
    reasons: dict[str, str] = {}
    for estimator in spec_dict["estimators"]:
        if estimator == "monte-carlo":
            continue
        for mode in modes:
            for metric in spec_dict["metrics"]:
                col = column_name(metric, mode, estimator)
                try:
                    if estimator == "analytic":
                        values[col] = _CLOSED[metric](mode, p).value
                    elif estimator == "asymptotic":
                        values[col] = _asymptotic(metric, mode, p)
                    else:
                        values[col] = _large_n(metric, mode, p)
                except Exception as exc:  # noqa: BLE001 - converted into a reason code or re-raised
                    values[col] = None
                    reasons[col] = _reason(exc)
    return values, reasons


_MC_KEYS = {"JOP": "jop", "JIP": "jip", "SEE": "see", "normalized-JIOP": "normalized_jiop"}


def _columns(spec: SweepSpec) -> list[str]:
    cols = []
    for estimator in spec.estimators:
        for mode in spec.modes:
            for metric in spec.metrics:
                cols.append(column_name(metric, mode, estimator))
                if estimator == "monte-carlo":
                    cols.append(column_name(metric, mode, estimator) + ":stderr")
    return cols


def run_sweep(spec: SweepSpec, workers: int = 1, L: int | None = None) -> SweepTable:
    """Evaluate `spec` on its grid; rows come back in grid order (group-major)."""
    spec.validate()
    points = []
    for gi, group in enumerate(spec.groups):
        for x in spec.grid():
            p = spec.point_params(group, x)
            if L is not None:
                p = p.evolve(L=L)
            points.append((gi, p))

    spec_dict = spec.to_dict()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            analytic = list(pool.map(_analytic_cells, [spec_dict] * len(points),
                                     [spec.modes] * len(points), [p for _, p in points]))
    else:
        analytic = [_analytic_cells(spec_dict, spec.modes, p) for _, p in points]

    rows = []
    for (gi, p), (values, reasons) in zip(points, analytic):
        params = {"Ps_dbm": p.Ps_dbm, "tau": p.tau, "N": p.N, "N1": p.N1, "N2": p.N2}
        rows.append(SweepRow(params, dict(values), dict(reasons)))

    if "monte-carlo" in spec.estimators:
        _fill_monte_carlo(spec, points, rows, workers)

    cols = _columns(spec)
    for row in rows:
        row.values = {c: row.values.get(c) for c in cols}
    header = {
        "tool": f"zeris {__version__}",
        "spec": spec_dict,
        "base_params": {**SystemParams().evolve(**spec.fixed).as_dict(), **({"L": L} if L else {})},
        "seed": spec.seed,
    }
    return SweepTable(cols, rows, header)


def _fill_monte_carlo(spec: SweepSpec, points, rows, workers: int) -> None:
    # points that share (N, N1) share channel draws; each such cluster gets its own stream
    clusters: dict[tuple[int, int], list[int]] = {}
    for idx, (_, p) in enumerate(points):
        clusters.setdefault((p.N, p.N1), []).append(idx)
    for stream_id, members in enumerate(clusters.values()):
        plist = [points[i][1] for i in members]
        est = mc.estimate_many(spec.modes, plist, spec.n_trials, spec.seed, stream_id, workers=workers)
        for j, idx in enumerate(members):
            for mode in spec.modes:
                for metric in spec.metrics:
                    e = est[(mode, j)][_MC_KEYS[metric]]
                    col = column_name(metric, mode, "monte-carlo")
                    rows[idx].values[col] = e.value
                    rows[idx].values[col + ":stderr"] = e.stderr


# -- figure presets ----------------------------------------------------------------

def _presets() -> dict[str, SweepSpec]:
    three = (Mode.I, Mode.II, Mode.III)
    return {
        "fig2": SweepSpec("Ps_dbm", (20, 80, 2), three, ("JOP",),
                          ("analytic", "asymptotic", "monte-carlo"), name="fig2"),
        "fig3": SweepSpec("Ps_dbm", (20, 80, 2), three + (Mode.BENCH_I,), ("JIP",),
                          ("analytic", "asymptotic", "monte-carlo"), groups=({"N": 30}, {"N": 60}), name="fig3"),
        # JOP under longer energy-transfer or information links
        "fig4": SweepSpec("Ps_dbm", (20, 80, 2), three, ("JOP",), ("analytic", "monte-carlo"),
                          groups=({}, {"d_pr": 15.0, "d_pu": 15.0}, {"d_ur": 15.0, "d_ra": 15.0}), name="fig4"),
        # high-power JIP floors and their large-N limits as the surface grows
        "fig5": SweepSpec("N", (30, 480, 30), three, ("JIP",), ("analytic", "asymptotic", "large-N"),
                          fixed={"Ps_dbm": 90.0}, name="fig5"),
        "fig6": SweepSpec("Ps_dbm", (20, 80, 2), three, ("JOP", "JIP"), ("analytic", "monte-carlo"),
                          groups=({"N": 30}, {"N": 150}), name="fig6"),
        "fig7": SweepSpec("Ps_dbm", (20, 80, 1), three, ("normalized-JIOP",), ("analytic", "monte-carlo"),
                          fixed={"N": 60}, name="fig7"),
        "fig8": SweepSpec("tau", (0.05, 0.95, 0.05), three, ("normalized-JIOP",), ("analytic", "monte-carlo"),
                          groups=({"Ps_dbm": 50.0}, {"Ps_dbm": 70.0}, {"Ps_dbm": 90.0}), name="fig8"),
        "fig9": SweepSpec("Ps_dbm", (10, 60, 2), three + (Mode.BENCH_II,), ("SEE",), ("analytic", "monte-carlo"),
                          fixed={"N": 100}, name="fig9"),
    }


PRESETS = tuple(_presets())


def figure_preset(name: str, n_trials: int | None = None, seed: int | None = None,
                  estimators: Sequence[str] | None = None) -> SweepSpec:
    """The sweep reproducing one figure (``fig2`` ... ``fig9``)."""
    presets = _presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; valid presets: {', '.join(presets)}")
    spec = presets[name]
    changes = {}
    if n_trials is not None:
        changes["n_trials"] = n_trials
    if seed is not None:
        changes["seed"] = seed
    if estimators is not None:
        changes["estimators"] = tuple(estimators)
    if not changes:
        return spec
    from dataclasses import replace

    return replace(spec, **changes)
