"""JSON game descriptions.

Flat games::

    {"type": "flat", "snr_db": [20, 15], "cross": [[0, 0.4], [0.7, 0]], "bandwidth_w": 1.0}

Selective games (``gains[k][i][j] = |h_ij(k)|^2``)::

    {"type": "selective", "gains": [[[...]]], "mask": [...], "noise": [[...]]}
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidGameError
from .game import FlatGame, SelectiveGame, linear_to_db


def _array(d, key, ndim):
    if key not in d:
        raise InvalidGameError(f"missing field {key!r}")
    try:
        a = np.asarray(d[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidGameError(f"field {key!r} is not a numeric array: {exc}") from None
    if a.ndim != ndim:
        raise InvalidGameError(f"field {key!r} must be {ndim}-dimensional, got shape {a.shape}")
    return a


def game_from_dict(d):
    if not isinstance(d, dict):
        raise InvalidGameError("game description must be a JSON object")
    kind = d.get("type")
    if kind == "flat":
        return FlatGame.from_db(_array(d, "snr_db", 1), _array(d, "cross", 2),
                                float(d.get("bandwidth_w", 1.0)))
    if kind == "selective":
        return SelectiveGame(_array(d, "gains", 3), _array(d, "mask", 1), _array(d, "noise", 2))
    raise InvalidGameError(f"unknown game type {kind!r}; expected 'flat' or 'selective'")


def game_to_dict(game):
    if isinstance(game, FlatGame):
        return {"type": "flat", "snr_db": linear_to_db(game.snr).tolist(),
                "cross": game.cross.tolist(), "bandwidth_w": game.bandwidth_w}
    if isinstance(game, SelectiveGame):
        return {"type": "selective", "gains": game.gains.tolist(),
                "mask": game.mask.tolist(), "noise": game.noise.tolist()}
    raise TypeError(f"cannot serialize {type(game).__name__}")


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidGameError(f"{path}: invalid JSON ({exc})") from None


def load_game(path):
    return game_from_dict(load_json(path))


def outcome_to_dict(outcome):
    """JSON-safe view of a bargaining outcome; infinities become ``None``."""

    def num(x):
        return None if x is None or not math.isfinite(x) else float(x)

    d = {
        "status": outcome.status.value,
        "allocation": None if outcome.allocation is None else outcome.allocation.alpha.tolist(),
        "coop_rates": [float(x) for x in outcome.coop_rates],
        "disagreement_rates": [float(x) for x in outcome.disagreement_rates],
        "nash_product_log": num(outcome.nash_product_log),
        "shared_bins": list(outcome.shared_bins),
        "shared_fraction": num(outcome.shared_fraction),
    }
    for extra in ("k_s", "branch", "iterations", "optimality_gap"):
        if hasattr(outcome, extra):
            v = getattr(outcome, extra)
            d[extra] = num(v) if isinstance(v, float) else v
    return d
