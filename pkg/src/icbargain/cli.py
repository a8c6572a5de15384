"""Command-line entry point.

Exit codes: 0 success (a disagreement outcome is a success), 2 invalid input,
3 iteration limit reached.
"""

import argparse
import csv
import io
import json
import sys

from .errors import InvalidGameError, IterationLimit
from .flat import UtilityMode, nbs_exists_flat, solve_nbs_flat
from .game import FlatGame, SelectiveGame
from .gameio import load_game, load_json, outcome_to_dict
from .selective import SolverSettings, solve_nbs_selective
from .sim import SweepSpec, iter_sweep, records_to_csv, record_dict, sidecar, sidecar_path, summarize
from .twoplayer import solve_two_player

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ITERATION_LIMIT = 3


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _outcome_csv(outcome):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["player", "status", "competitive", "nbs", "surplus"])
    for i, (c, r) in enumerate(zip(outcome.disagreement_rates, outcome.coop_rates)):
        w.writerow([i + 1, outcome.status.value, format(c, ".17g"), format(r, ".17g"),
                    format(r - c, ".17g")])
    return buf.getvalue()


def _report(outcome, args):
    if args.format == "csv":
        _emit(_outcome_csv(outcome), args.out)
    else:
        _emit(json.dumps(outcome_to_dict(outcome), indent=2) + "\n", args.out)


def _require(game, cls, name):
    if not isinstance(game, cls):
        raise InvalidGameError(f"{name} needs a {'flat' if cls is FlatGame else 'selective'} game")
    return game


def cmd_flat(args):
    game = _require(load_game(args.config), FlatGame, "flat-nbs")
    _report(solve_nbs_flat(game, UtilityMode(args.utility)), args)


def cmd_selective(args):
    game = _require(load_game(args.config), SelectiveGame, "selective-nbs")
    settings = SolverSettings(max_outer_iterations=args.max_iterations)
    _report(solve_nbs_selective(game, settings), args)


def cmd_two_player(args):
    game = _require(load_game(args.config), SelectiveGame, "two-player")
    _report(solve_two_player(game), args)


def cmd_existence(args):
    game = _require(load_game(args.config), FlatGame, "check-existence")
    rep = nbs_exists_flat(game)
    d = {"exists": rep.exists, "min_shares": rep.min_shares.tolist(), "share_sum": rep.share_sum}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["player", "min_share"])
        for i, f in enumerate(rep.min_shares):
            w.writerow([i + 1, format(f, ".17g")])
        w.writerow(["sum", format(rep.share_sum, ".17g")])
        w.writerow(["exists", str(rep.exists).lower()])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(json.dumps(d, indent=2) + "\n", args.out)


def cmd_sweep(args):
    raw = load_json(args.config)
    try:
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.trials is not None:
            raw["trials"] = args.trials
        if args.utility is not None:
            raw.setdefault("fixed", {})["utility"] = args.utility
        spec = SweepSpec.from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGameError(f"invalid sweep spec: {exc}") from None
    records = list(iter_sweep(spec, args.workers))
    if args.format == "csv":
        _emit(records_to_csv(spec, records), args.out)
        if args.out:
            sidecar_path(args.out).write_text(json.dumps(sidecar(spec), indent=2, sort_keys=True) + "\n")
    else:
        doc = {"spec": spec.to_dict(), "summary": summarize(records),
               "records": [record_dict(r, spec.axis_names) for r in records]}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="icbargain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, utility=False):
        sp.add_argument("--config", required=True, help="game or sweep description (JSON)")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if utility:
            sp.add_argument("--utility", choices=[m.value for m in UtilityMode], default="rate")
        return sp

    common(sub.add_parser("flat-nbs", help="FDM bargaining for a flat game"), utility=True).set_defaults(func=cmd_flat)
    sel = common(sub.add_parser("selective-nbs", help="N-user FDM/TDM bargaining (convex solver)"))
    sel.add_argument("--max-iterations", type=int, default=SolverSettings.max_outer_iterations)
    sel.set_defaults(func=cmd_selective)
    common(sub.add_parser("two-player", help="two-user FDM/TDM bargaining (fast algorithm)")).set_defaults(func=cmd_two_player)
    common(sub.add_parser("check-existence", help="existence test for a flat game")).set_defaults(func=cmd_existence)
    sw = sub.add_parser("sweep", help="price-of-anarchy parameter sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--utility", choices=[m.value for m in UtilityMode])
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except IterationLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ITERATION_LIMIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK
