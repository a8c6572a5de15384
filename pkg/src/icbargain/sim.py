"""Price-of-anarchy experiments: channel ensembles, parameter sweeps, CSV tables."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ZeroCompetitiveRate
from .flat import UtilityMode, solve_nbs_flat
from .game import FlatGame, PoaReport, SelectiveGame, db_to_linear
from .selective import solve_nbs_selective
from .twoplayer import solve_two_player


def poa_metrics(coop, competitive):
    """Per-user minimum gain and sum-rate gain of bargaining over competition."""
    coop = np.asarray(coop, dtype=float)
    comp = np.asarray(competitive, dtype=float)
    if np.any(comp <= 0):
        raise ZeroCompetitiveRate(f"competitive rates must be positive, got {comp.tolist()}")
    return PoaReport(float(np.min(coop / comp)), float(coop.sum() / comp.sum()))


def gen_rayleigh_selective(n_players, n_bins, direct_scale, cross_scales, mask, noise, seed):
    """Draw a Rayleigh-fading selective game.

    Every ``h_ij(k)`` is circularly-symmetric complex Gaussian with mean power
    ``direct_scale`` on the diagonal and ``cross_scales`` (scalar or N x N)
    off it, independent across links and bins. ``seed`` may be anything
    :func:`numpy.random.default_rng` accepts.
    """
    scales = np.array(np.broadcast_to(np.asarray(cross_scales, dtype=float),
                                      (n_players, n_players)))
    np.fill_diagonal(scales, direct_scale)
    if np.any(scales < 0):
        raise ValueError("channel scales must be non-negative")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_bins, n_players, n_players, 2))
    gains = scales * 0.5 * (z[..., 0] ** 2 + z[..., 1] ** 2)
    mask = np.broadcast_to(np.asarray(mask, dtype=float), (n_bins,))
    noise = np.broadcast_to(np.asarray(noise, dtype=float), (n_players, n_bins))
    return SelectiveGame(gains, mask, noise)


class SweepKind(str, enum.Enum):
    SNR_GRID = "snr-grid"
    CROSS_GRID = "cross-grid"
    RAYLEIGH_SELECTIVE = "rayleigh-selective"


_AXES = {
    SweepKind.SNR_GRID: ("snr1_db", "snr2_db"),
    SweepKind.CROSS_GRID: ("alpha", "beta"),
    SweepKind.RAYLEIGH_SELECTIVE: ("sir_db",),
}

_DEFAULTS = {
    SweepKind.SNR_GRID: {"alpha": 0.7, "beta": 0.7, "utility": "rate"},
    SweepKind.CROSS_GRID: {"snr_db": 20.0, "utility": "rate"},
    SweepKind.RAYLEIGH_SELECTIVE: {"snr_db": 30.0, "n_bins": 32, "n_players": 2},
}


@dataclass(frozen=True)
class SweepSpec:
    """A grid of experiment points.

    ``axes`` maps each axis name to ``(start, stop, step)`` with ``stop``
    included. dB axes are power ratios (``10 ** (dB / 10)``). For the
    Rayleigh sweep, ``sir_db`` sets the mean cross-link power to
    ``10 ** (-sir_db / 10)`` relative to unit-power direct links.
    """

    kind: SweepKind
    axes: dict
    fixed: dict = field(default_factory=dict)
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        kind = SweepKind(self.kind)
        object.__setattr__(self, "kind", kind)
        names = _AXES[kind]
        if set(self.axes) != set(names):
            raise ValueError(f"{kind.value} sweep needs axes {names}, got {tuple(self.axes)}")
        axes = {}
        for name in names:
            start, stop, step = (float(v) for v in self.axes[name])
            if not step > 0 or stop < start:
                raise ValueError(f"axis {name}: need step > 0 and stop >= start")
            axes[name] = (start, stop, step)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "fixed", {**_DEFAULTS[kind], **dict(self.fixed)})
        if int(self.trials) < 1:
            raise ValueError("trials must be at least 1")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def snr_grid(cls, alpha=0.7, beta=0.7, start=0.0, stop=40.0, step=0.25, utility="rate"):
        return cls(SweepKind.SNR_GRID,
                   {"snr1_db": (start, stop, step), "snr2_db": (start, stop, step)},
                   {"alpha": alpha, "beta": beta, "utility": utility})

    @classmethod
    def cross_grid(cls, snr_db=20.0, start=0.0, stop=1.0, step=0.05, utility="rate"):
        return cls(SweepKind.CROSS_GRID,
                   {"alpha": (start, stop, step), "beta": (start, stop, step)},
                   {"snr_db": snr_db, "utility": utility})

    @classmethod
    def rayleigh_selective(cls, snr_db=30.0, sir_start=0.0, sir_stop=10.0, sir_step=1.0,
                           n_bins=32, n_players=2, trials=25, seed=0):
        return cls(SweepKind.RAYLEIGH_SELECTIVE, {"sir_db": (sir_start, sir_stop, sir_step)},
                   {"snr_db": snr_db, "n_bins": n_bins, "n_players": n_players},
                   trials, seed)

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], {k: tuple(v) for k, v in d["axes"].items()},
                   d.get("fixed", {}), d.get("trials", 1), d.get("seed", 0))

    def to_dict(self):
        return {"kind": self.kind.value, "axes": {k: list(v) for k, v in self.axes.items()},
                "fixed": dict(self.fixed), "trials": self.trials, "seed": self.seed}

    def axis_values(self, name):
        start, stop, step = self.axes[name]
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(n)]

    def points(self):
        """Grid points in canonical (lexicographic) order."""
        grids = [self.axis_values(n) for n in _AXES[self.kind]]
        mesh = np.meshgrid(*grids, indexing="ij")
        return [tuple(float(m.flat[i]) for m in mesh) for i in range(mesh[0].size)]

    @property
    def axis_names(self):
        return _AXES[self.kind]


@dataclass(frozen=True)
class TrialRecord:
    coords: tuple
    trial: int
    seed: int
    status: str
    branch: str
    competitive: tuple
    nbs: tuple
    delta_min: float | None
    delta_sum: float | None
    shared_bins: int


def trial_seed(seed, point_index, trial):
    """Independent 63-bit seed for one trial, fixed by its grid position."""
    ss = np.random.SeedSequence(seed, spawn_key=(point_index, trial))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def _record(coords, trial, seed, outcome, branch):
    comp = tuple(float(x) for x in outcome.disagreement_rates)
    nbs = tuple(float(x) for x in outcome.coop_rates)
    dmin = dsum = None
    if outcome.solved:
        poa = poa_metrics(nbs, comp)
        dmin, dsum = poa.delta_min, poa.delta_sum
    return TrialRecord(coords, trial, seed, outcome.status.value, branch, comp, nbs,
                       dmin, dsum, len(outcome.shared_bins))


def evaluate_point(spec, point_index, coords, trial):
    """Run one trial at one grid point."""
    fx = spec.fixed
    seed = trial_seed(spec.seed, point_index, trial)
    if spec.kind is SweepKind.SNR_GRID:
        game = FlatGame.two_player(*db_to_linear(coords), fx["alpha"], fx["beta"])
        out = solve_nbs_flat(game, UtilityMode(fx["utility"]))
        return _record(coords, trial, seed, out, "fdm")
    if spec.kind is SweepKind.CROSS_GRID:
        snr = float(db_to_linear(fx["snr_db"]))
        game = FlatGame.two_player(snr, snr, coords[0], coords[1])
        out = solve_nbs_flat(game, UtilityMode(fx["utility"]))
        return _record(coords, trial, seed, out, "fdm")
    n_players = int(fx["n_players"])
    game = gen_rayleigh_selective(
        n_players, int(fx["n_bins"]), 1.0, float(db_to_linear(-coords[0])),
        1.0, float(db_to_linear(-fx["snr_db"])), seed)
    if n_players == 2:
        out = solve_two_player(game)
        return _record(coords, trial, seed, out, out.branch)
    out = solve_nbs_selective(game)
    return _record(coords, trial, seed, out, "convex")


def _evaluate_task(task):
    return evaluate_point(*task)


def iter_sweep(spec, workers=1):
    """Yield one :class:`TrialRecord` per grid point and trial, in canonical order."""
    tasks = [(spec, p, coords, t)
             for p, coords in enumerate(spec.points()) for t in range(spec.trials)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (8 * workers)))
    else:
        yield from map(_evaluate_task, tasks)


def run_sweep(spec, out=None, workers=1):
    """Run a sweep; with ``out`` also write the CSV and a JSON sidecar next to it."""
    records = list(iter_sweep(spec, workers))
    if out is not None:
        out = Path(out)
        try:
            out.write_text(records_to_csv(spec, records), newline="")
            sidecar_path(out).write_text(json.dumps(sidecar(spec), indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write sweep output {out}: {exc}") from exc
    return records


def sidecar_path(csv_path):
    return Path(csv_path).with_suffix(".json")


def sidecar(spec):
    from . import __version__

    return {"spec": spec.to_dict(), "library": "icbargain", "version": __version__}


# -- CSV ---------------------------------------------------------------------


def _fmt(x):
    return "" if x is None else format(x, ".17g")


def _header(axis_names, n_players):
    return (list(axis_names) + ["trial", "seed", "status", "branch"]
            + [f"rc_{i + 1}" for i in range(n_players)]
            + [f"nbs_{i + 1}" for i in range(n_players)]
            + ["delta_min", "delta_sum", "shared_bins"])


def records_to_csv(spec, records):
    n = len(records[0].competitive) if records else int(spec.fixed.get("n_players", 2))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_header(spec.axis_names, n))
    for r in records:
        w.writerow([_fmt(c) for c in r.coords] + [r.trial, r.seed, r.status, r.branch]
                   + [_fmt(x) for x in r.competitive] + [_fmt(x) for x in r.nbs]
                   + [_fmt(r.delta_min), _fmt(r.delta_sum), r.shared_bins])
    return buf.getvalue()


def read_csv(path):
    """Parse a sweep CSV back into records."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    i_trial = header.index("trial")
    axis_count = i_trial
    n = sum(1 for h in header if h.startswith("rc_"))
    out = []
    for row in body:
        coords = tuple(float(v) for v in row[:axis_count])
        trial, seed, status, branch = int(row[i_trial]), int(row[i_trial + 1]), row[i_trial + 2], row[i_trial + 3]
        base = i_trial + 4
        comp = tuple(float(v) for v in row[base:base + n])
        nbs = tuple(float(v) for v in row[base + n:base + 2 * n])
        dmin, dsum, shared = row[base + 2 * n:base + 2 * n + 3]
        out.append(TrialRecord(coords, trial, seed, status, branch, comp, nbs,
                               float(dmin) if dmin else None, float(dsum) if dsum else None,
                               int(shared)))
    return out


def summarize(records, axis=0):
    """Mean of ``delta_min`` and ``delta_sum`` over solved trials, per value of one axis."""
    groups = {}
    for r in records:
        groups.setdefault(r.coords[axis], []).append(r)
    rows = []
    for key in sorted(groups):
        solved = [r for r in groups[key] if r.delta_min is not None]
        rows.append({
            "value": key,
            "trials": len(groups[key]),
            "solved": len(solved),
            "mean_delta_min": float(np.mean([r.delta_min for r in solved])) if solved else None,
            "mean_delta_sum": float(np.mean([r.delta_sum for r in solved])) if solved else None,
        })
    return rows


def record_dict(record, axis_names):
    d = asdict(record)
    d["coords"] = dict(zip(axis_names, record.coords))
    return d
