"""Command-line interface: ``hyperwalk <subcommand> --input FILE [options]``.

Exit status is 0 on success, 1 on a domain error (bad input file,
disconnected hypergraph, isolated node) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import _kernels
from .analytics import (
    mfpt_linear_solve,
    mfpt_matrix,
    occupation_probability,
    passage_moments_linear_solve,
    reset_mfpt_matrix,
)
from .errors import HyperwalkError
from .hypergraph import (
    build_generalized_adjacency,
    build_transition,
    largest_connected_component,
    read_hyperedge_list,
)
from .montecarlo import (
    DEFAULT_SEED,
    gamma_sweep_cover,
    highest_hyperdegree_node,
    cover_gamma_grid,
    simulate_hitting_time,
)
from .optimizer import find_optimal_gamma, gamma_curve, resetting_helps
from .ranking import compare_rankings, rank_hypergraph
from .spectral import (
    ResetWalkSpec,
    assemble_pi,
    decompose_hypergraph,
    power_iteration_left,
    reset_spectrum,
)

SUBCOMMANDS = (
    "stationary",
    "spectrum",
    "occupation",
    "mfpt",
    "reset-mfpt",
    "gamma-curve",
    "optimal-gamma",
    "helps",
    "rank",
    "compare-rank",
    "cover-sweep",
    "simulate-hit",
)


class UsageError(Exception):
    pass


# -- output ------------------------------------------------------------------


def _plain(x):
    """Convert numpy scalars/arrays to JSON-native values; NaN becomes null."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) else x
    return x


def _cell(x):
    x = _plain(x)
    if x is None:
        return "nan"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


class Result:
    """What a subcommand produced: a JSON payload, CSV table and optional check."""

    def __init__(self, payload, header=None, rows=None, check=None):
        self.payload = payload
        self.header = header
        self.rows = rows
        self.check = check

    def render(self, fmt: str) -> str:
        if fmt == "csv" and self.header is not None:
            return _csv(self.header, self.rows)
        payload = dict(self.payload)
        if self.check is not None:
            payload["check"] = self.check
        return json.dumps(_plain(payload), indent=2, allow_nan=False) + "\n"


# -- argument plumbing ---------------------------------------------------------


def _label(H, label, flag):
    if label is None:
        raise UsageError(f"{flag} is required for this subcommand")
    try:
        return H.resolve(label)
    except KeyError:
        raise UsageError(f"{flag}: unknown node label {label!r}") from None


def _gamma(value):
    if value is None:
        return 0.0
    if not 0.0 <= value < 1.0:
        raise UsageError(f"--gamma must lie in [0, 1), got {value}")
    return value


def _grid(args, default_max, default_step):
    gmax = default_max if args.gamma_max is None else args.gamma_max
    step = default_step if args.gamma_step is None else args.gamma_step
    if not 0.0 <= gmax < 1.0:
        raise UsageError("--gamma-max must lie in [0, 1)")
    if step <= 0.0:
        raise UsageError("--gamma-step must be positive")
    return cover_gamma_grid(gmax, step)


def _trials(args, default):
    n = default if args.trials is None else args.trials
    if n < 1:
        raise UsageError("--trials must be at least 1")
    return n


def _check(oracle, diff):
    return {"oracle": oracle, "max_abs_diff": float(diff)}


# -- subcommands -------------------------------------------------------------


def cmd_stationary(H, args):
    """Stationary distribution d_i / N."""
    adj = build_generalized_adjacency(H)
    decompose_hypergraph(H)  # connectivity gate
    p = adj.d / adj.total_weight
    check = None
    if args.check:
        pw = power_iteration_left(build_transition(H, adj))
        check = _check("power-iteration", np.abs(pw - p).max())
    return Result(
        {"labels": list(H.labels), "stationary": p},
        ["label", "P_inf"],
        zip(H.labels, p.tolist()),
        check,
    )


def cmd_spectrum(H, args):
    """Eigenvalues and left/right eigenvectors of the transition matrix."""
    dec = decompose_hypergraph(H)
    check = None
    if args.check:
        W = build_transition(H)
        check = _check("reconstruction", np.abs(dec.reconstruct(1) - W).max())
    return Result(
        {
            "labels": list(H.labels),
            "eigenvalues": dec.eigenvalues,
            "left": dec.left,
            "right": dec.right.T,
        },
        ["l", "eigenvalue"],
        enumerate(dec.eigenvalues.tolist(), start=1),
        check,
    )


def _reset_spec(H, args):
    g = _gamma(args.gamma)
    if args.reset is None:
        if g > 0:
            raise UsageError("--reset is required when --gamma is positive")
        return ResetWalkSpec(0, 0.0)
    return ResetWalkSpec(_label(H, args.reset, "--reset"), g)


def cmd_occupation(H, args):
    """Occupation probability P_ij(t) for t = 0..--t, optionally with resetting."""
    i = _label(H, args.from_, "--from")
    j = _label(H, args.to, "--to")
    t_max = 10 if args.t is None else args.t
    if t_max < 0:
        raise UsageError("--t must be non-negative")
    spec = _reset_spec(H, args)
    rdec = reset_spectrum(decompose_hypergraph(H), spec)
    P = np.array([occupation_probability(rdec, i, j, t) for t in range(t_max + 1)])
    check = None
    if args.check:
        Pi = assemble_pi(build_transition(H), spec)
        brute = np.array(
            [np.linalg.matrix_power(Pi, t)[i, j] for t in range(t_max + 1)]
        )
        check = _check("matrix-power", np.abs(brute - P).max())
    return Result(
        {"from": args.from_, "to": args.to, "t": list(range(t_max + 1)), "P": P},
        ["t", "P"],
        enumerate(P.tolist()),
        check,
    )


def _mfpt_result(H, j, values, args, matrix):
    check = None
    if args.check:
        check = _check("linear-solve", np.abs(mfpt_linear_solve(matrix, j) - values).max())
    return Result(
        {"target": H.labels[j], "labels": list(H.labels), "values": values},
        ["label", "mfpt"],
        zip(H.labels, values.tolist()),
        check,
    )


def cmd_mfpt(H, args):
    """Mean first-passage times from every node to --to."""
    j = _label(H, args.to, "--to")
    T = mfpt_matrix(decompose_hypergraph(H))[:, j]
    return _mfpt_result(H, j, T, args, build_transition(H))


def cmd_reset_mfpt(H, args):
    """Mean first-passage times to --to under resetting to --reset."""
    j = _label(H, args.to, "--to")
    spec = ResetWalkSpec(_label(H, args.reset, "--reset"), _gamma(args.gamma))
    rdec = reset_spectrum(decompose_hypergraph(H), spec)
    T = reset_mfpt_matrix(rdec)[:, j]
    return _mfpt_result(H, j, T, args, assemble_pi(build_transition(H), spec))


def _pair(H, args):
    i = _label(H, args.from_, "--from")
    j = _label(H, args.to, "--to")
    if i == j:
        raise UsageError("--from and --to must differ")
    return i, j


def cmd_gamma_curve(H, args):
    """T, second moment and z over a grid of reset probabilities."""
    i, j = _pair(H, args)
    gammas = _grid(args, 0.99, 0.01)
    dec = decompose_hypergraph(H)
    curve = gamma_curve(dec, i, j, gammas)
    check = None
    if args.check:
        W = build_transition(H)
        worst = 0.0
        for g, T, T2 in zip(curve.gamma, curve.mean, curve.second):
            m1, m2 = passage_moments_linear_solve(assemble_pi(W, ResetWalkSpec(i, g)), j)
            worst = max(worst, abs(m1[i] - T) / T, abs(m2[i] - T2) / T2)
        check = {"oracle": "linear-solve", "max_rel_diff": worst}
    return Result(
        {
            "from": args.from_,
            "to": args.to,
            "gamma": curve.gamma,
            "T": curve.mean,
            "T2": curve.second,
            "z": curve.z,
        },
        ["gamma", "T", "T2", "z"],
        curve.rows(),
        check,
    )


def cmd_optimal_gamma(H, args):
    """Reset probability minimising the mean first-passage time."""
    i, j = _pair(H, args)
    opt = find_optimal_gamma(decompose_hypergraph(H), i, j)
    check = None
    if args.check:
        Pi = assemble_pi(build_transition(H), ResetWalkSpec(i, opt.gamma_star))
        check = _check("linear-solve", abs(mfpt_linear_solve(Pi, j)[i] - opt.T_star))
    summary = opt.summary()
    header = ["gamma_star", "T_star", "residual", "helps", "margin"]
    return Result(summary, header, [[summary[k] for k in header]], check)


def cmd_helps(H, args):
    """Whether a small reset probability speeds up the search."""
    i, j = _pair(H, args)
    b = resetting_helps(decompose_hypergraph(H), i, j)
    check = None
    if args.check:
        m1, m2 = passage_moments_linear_solve(build_transition(H), j)
        T, T2 = m1[i], m2[i]
        margin = (T2 - T * T) / (T * T) - 1.0 - 1.0 / T
        check = _check("linear-solve", abs(margin - b.margin))
    payload = {"helps": b.helps, "margin": b.margin, "z2": b.z2, "T": b.mean}
    return Result(payload, list(payload), [list(payload.values())], check)


def cmd_rank(H, args):
    """Nodes ordered by hypergraph stationary probability."""
    ranked = rank_hypergraph(H)
    check = None
    if args.check:
        dec = decompose_hypergraph(H)
        values = dict(ranked)
        p = np.array([values[lab] for lab in H.labels])
        check = _check("spectral-left-perron", np.abs(dec.stationary - p).max())
    return Result(
        {"ranking": [{"label": lab, "P_inf": p} for lab, p in ranked]},
        ["label", "P_inf"],
        ranked,
        check,
    )


def cmd_compare_rank(H, args):
    """Hypergraph versus clique-graph ranking with Kendall tau."""
    report = compare_rankings(H)
    check = None
    if args.check:
        dec = decompose_hypergraph(H)
        p = np.array([r.P_inf for r in report.records])
        check = _check("spectral-left-perron", np.abs(dec.stationary - p).max())
    header = ["label", "P_inf", "Q_inf", "P_norm", "Q_norm", "rank_P", "rank_Q"]
    return Result(
        {"tau": report.tau, "records": [dict(zip(header, row)) for row in report.rows()]},
        header,
        report.rows(),
        check,
    )


def cmd_cover_sweep(H, args):
    """Simulated mean cover time over a grid of reset probabilities."""
    if args.check:
        raise UsageError("cover-sweep has no analytic oracle; --check does not apply")
    r = highest_hyperdegree_node(H) if args.reset is None else _label(H, args.reset, "--reset")
    gammas = _grid(args, 0.001, 0.00002)
    trials = _trials(args, 50)
    seed = DEFAULT_SEED if args.seed is None else args.seed
    decompose_hypergraph(H)  # connectivity gate
    points = gamma_sweep_cover(H, r, gammas, trials, seed, workers=args.workers)
    rows = [(p.gamma, p.mean_cover, p.stderr, p.trials, p.seed) for p in points]
    return Result(
        {
            "reset": H.labels[r],
            "points": [
                dict(zip(["gamma", "mean_cover", "stderr", "trials", "seed"], row)) for row in rows
            ],
        },
        ["gamma", "mean_cover", "stderr", "trials", "seed"],
        rows,
    )


def cmd_simulate_hit(H, args):
    """Simulated first-passage times."""
    i = _label(H, args.from_, "--from")
    j = _label(H, args.to, "--to")
    spec = _reset_spec(H, args)
    trials = _trials(args, 10_000)
    seed = DEFAULT_SEED if args.seed is None else args.seed
    ens = simulate_hitting_time(H, spec, i, j, trials, seed, workers=args.workers)
    payload = {"from": args.from_, "to": args.to, "gamma": spec.gamma, **ens.summary()}
    check = None
    if args.check:
        rdec = reset_spectrum(decompose_hypergraph(H), spec)
        T = reset_mfpt_matrix(rdec)[i, j]
        check = {
            "oracle": "spectral-mfpt",
            "analytic": T,
            "z_score": (ens.mean - T) / ens.stderr if ens.stderr > 0 else None,
        }
    header = ["trials", "seed", "mean", "stderr", "capped"]
    return Result(payload, header, [[payload[k] for k in header]], check)


HANDLERS = {
    "stationary": cmd_stationary,
    "spectrum": cmd_spectrum,
    "occupation": cmd_occupation,
    "mfpt": cmd_mfpt,
    "reset-mfpt": cmd_reset_mfpt,
    "gamma-curve": cmd_gamma_curve,
    "optimal-gamma": cmd_optimal_gamma,
    "helps": cmd_helps,
    "rank": cmd_rank,
    "compare-rank": cmd_compare_rank,
    "cover-sweep": cmd_cover_sweep,
    "simulate-hit": cmd_simulate_hit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, metavar="PATH", help="hyperedge-list file")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--lcc", action="store_true", help="keep only the largest connected component")
    common.add_argument("--from", dest="from_", metavar="LABEL")
    common.add_argument("--to", metavar="LABEL")
    common.add_argument("--reset", metavar="LABEL")
    common.add_argument("--gamma", type=float)
    common.add_argument("--gamma-max", type=float)
    common.add_argument("--gamma-step", type=float)
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--t", type=int, help="largest time step for occupation series")
    common.add_argument("--check", action="store_true", help="also run the brute-force oracle")
    common.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo trials")

    parser = argparse.ArgumentParser(
        prog="hyperwalk",
        description="Random walks with and without resetting on hypergraphs.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s (kernels: {_kernels.BACKEND})"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        doc = (HANDLERS[name].__doc__ or "").strip() or None
        sub.add_parser(name, parents=[common], help=doc)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            H = read_hyperedge_list(args.input)
            if args.lcc:
                H = largest_connected_component(H)
            result = HANDLERS[args.command](H, args)
            text = result.render(args.format)
    except UsageError as exc:
        parser.error(str(exc))
    except (HyperwalkError, OSError, UnicodeDecodeError) as exc:
        print(f"hyperwalk: error: {exc}", file=sys.stderr)
        return 1
    if args.format == "csv" and result.check is not None:
        print(f"check: {json.dumps(_plain(result.check))}", file=sys.stderr)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
