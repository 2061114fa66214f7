"""Command-line interface.

Every subcommand prints exactly one JSON document on stdout. Exit codes:
0 success, 1 verification failed, 2 invalid input, 3 numerical-domain error.
Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import asdict

import numpy as np

from . import io
from .correlators import spatial_corr, temporal_corr_post, tripartite_temporal
from .inequalities import (
    ChshSettings,
    cglmp3,
    cglmp3_temporal,
    cglmp3_temporal_anomaly,
    chsh_spatial,
    chsh_temporal,
    phi_plus_optimal_settings,
    singlet_optimal_settings,
    werner_scan,
)
from .isomorphism import channel_to_state, state_to_channel
from .matcore import DomainError, ShapeError
from .pointer import ConfigurationError, PointerConfig, finite_eps_corr, mc_sample_corr
from .states import SZ, Observable, maximally_mixed
from .studies import decoherence_scan, gain_bench, haar_unitarity_study
from .verify import corollary2_suite, oracle_limit_suite, theorem1_suite

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3
THREADS_ENV = "CHRONOMAP_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("UsageError", message, "")
        sys.exit(EXIT_INPUT)


def _emit_error(kind: str, message: str, pointer: str) -> None:
    doc = {"schema": io.SCHEMA, "error": {"type": kind, "message": message}}
    if pointer is not None:
        doc["error"]["pointer"] = pointer
    print(json.dumps(doc), file=sys.stderr)


def _out(doc: dict) -> int:
    print(io.dump({"schema": io.SCHEMA, **doc}))
    return EXIT_OK


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not dims or min(dims) < 2:
        raise argparse.ArgumentTypeError("dimensions must be >= 2")
    return dims


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _opt(loader, ref):
    return None if ref is None else loader(ref)


# subcommand handlers

def cmd_map(args) -> int:
    if args.direction == "state-to-channel":
        doc = io.channel_to_json(state_to_channel(io.load_state(args.inp)))
    else:
        doc = io.state_to_json(channel_to_state(io.load_channel(args.inp)))
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(io.dump(doc) + "\n")
        return _out({"written": args.out})
    print(io.dump(doc))
    return EXIT_OK


def cmd_correlate(args) -> int:
    o1 = io.load_observable(args.obs1)
    o2 = io.load_observable(args.obs2)
    if args.kind == "spatial":
        if args.state is None:
            raise io.InputError("spatial correlation needs --state", "")
        st = io.load_state(args.state)
        e = spatial_corr(st, o1, o2, _opt(io.load_density, args.post_a), _opt(io.load_density, args.post_b))
    elif args.kind == "temporal":
        if args.channel is None:
            raise io.InputError("temporal correlation needs --channel", "")
        ch = io.load_channel(args.channel)
        rho_in = maximally_mixed(ch.d_in) if args.rho_in is None else io.load_density(args.rho_in)
        e = temporal_corr_post(rho_in, _opt(io.load_density, args.post_fi), ch, o1, o2)
    else:
        if args.obs3 is None:
            raise io.InputError("tripartite correlation needs --obs3", "")
        o3 = io.load_observable(args.obs3)
        rho_in = maximally_mixed(o1.dim) if args.rho_in is None else io.load_density(args.rho_in)
        e = tripartite_temporal(rho_in, o1, o2, o3)
    return _out({"E": e})


def cmd_verify(args) -> int:
    if args.suite == "theorem1":
        res = theorem1_suite(args.trials or 1000, args.dims, args.seed, args.tol or 1e-9)
    elif args.suite == "corollary2":
        res = corollary2_suite(args.trials or 500, args.dims, args.seed, args.tol or 1e-9)
    else:
        res = oracle_limit_suite(args.eps, args.trials or 50, args.seed, args.tol or 1e-4)
    _out(res.to_dict())
    return EXIT_OK if res.passed else EXIT_FAILED


def _settings(args) -> ChshSettings:
    if args.optimal == "phi+":
        return phi_plus_optimal_settings()
    if args.optimal == "singlet" or not any((args.a1, args.a2, args.b1, args.b2)):
        return singlet_optimal_settings()
    refs = (args.a1, args.a2, args.b1, args.b2)
    if not all(refs):
        raise io.InputError("give all of --a1 --a2 --b1 --b2, or --optimal", "")
    return ChshSettings(*(io.load_observable(r) for r in refs))


def cmd_ineq(args) -> int:
    if args.kind == "chsh":
        st = io.load_state(args.state or "builtin:singlet")
        return _out({"S": chsh_spatial(st, _settings(args))})
    if args.kind == "lg":
        ch = io.load_channel(args.channel or "builtin:identity:2")
        rho_in = _opt(io.load_density, args.rho_in)
        return _out({"S": chsh_temporal(ch, _settings(args), rho_in)})
    if args.kind == "werner-scan":
        grid = np.round(np.arange(0.0, 1.0 + args.step / 2, args.step), 12)
        scan = werner_scan(grid)
        return _out({
            "points": [{"w": w, "S": s} for w, s in scan.points],
            "temporal_points": [{"w": w, "S": s} for w, s in scan.temporal_points],
            "threshold": scan.threshold,
            "temporal_threshold": scan.temporal_threshold,
        })
    if args.state is not None:
        st = io.load_state(args.state)
        return _out({"I3": cglmp3(st), "I3_temporal": cglmp3_temporal(state_to_channel(st))})
    return _out(asdict(cglmp3_temporal_anomaly(args.gamma_step)))


def _oracle_inputs(args):
    ch = io.load_channel(args.channel)
    o1 = io.load_observable(args.obs1)
    o2 = io.load_observable(args.obs2)
    rho_in = maximally_mixed(ch.d_in) if args.rho_in is None else io.load_density(args.rho_in)
    return rho_in, _opt(io.load_density, args.post_fi), ch, o1, o2


def cmd_oracle(args) -> int:
    rho_in, rho_fi, ch, o1, o2 = _oracle_inputs(args)
    weak = temporal_corr_post(rho_in, rho_fi, ch, o1, o2)
    if args.mode == "exact":
        return _out({"eps": args.eps, "E": finite_eps_corr(rho_in, rho_fi, ch, o1, o2, args.eps), "E_weak": weak})
    if args.seed is None:
        raise io.InputError("oracle mc requires --seed", "")
    cfg = PointerConfig(args.eps, args.halfwidth, args.grid_points, args.seed)
    est, se = mc_sample_corr(rho_in, rho_fi, ch, o1, o2, cfg, args.samples, n_jobs=_threads())
    exact = finite_eps_corr(rho_in, rho_fi, ch, o1, o2, args.eps)
    return _out({"eps": args.eps, "estimate": est, "std_error": se, "exact": exact, "E_weak": weak,
                 "n_samples": args.samples, "seed": args.seed})


def cmd_study(args) -> int:
    if args.kind == "haar":
        if args.seed is None:
            raise io.InputError("study haar requires --seed", "")
        dims = args.dims or (2, 4, 8, 16)
        stats = [asdict(haar_unitarity_study(n, args.samples, args.seed)) for n in dims]
        return _out({"studies": stats})
    if args.kind == "decoherence":
        d = args.dim or 2
        o1 = io.load_observable(args.obs1) if args.obs1 else Observable(SZ.copy())
        o2 = io.load_observable(args.obs2) if args.obs2 else Observable(SZ.copy())
        if o1.dim != d or o2.dim != d:
            raise io.InputError("observable dimensions must equal --dim", "")
        grid = args.lambdas or list(np.round(np.linspace(0, 1, 11), 12))
        u = np.eye(d, dtype=np.complex128)
        if args.unitary:
            u = io.load_channel(args.unitary).kraus[0]
        scan = decoherence_scan(u, grid, o1, o2)
        return _out({"points": [{"lambda": lam, "E": e} for lam, e in scan]})
    if args.seed is None:
        raise io.InputError("study bench requires --seed", "")
    rep = gain_bench(args.dim or 32, args.settings, args.rank, args.seed, args.repeats)
    return _out(rep.to_dict())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chronomap", description="Spatial and temporal weak-measurement correlations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("map", help="map a state to a channel or back")
    m.add_argument("direction", choices=["state-to-channel", "channel-to-state"])
    m.add_argument("--in", dest="inp", required=True, help="input file or builtin:NAME")
    m.add_argument("--out", help="output file (default stdout)")
    m.set_defaults(func=cmd_map)

    c = sub.add_parser("correlate", help="evaluate a weak correlation")
    c.add_argument("kind", choices=["spatial", "temporal", "tripartite"])
    c.add_argument("--state")
    c.add_argument("--channel")
    c.add_argument("--obs1", required=True)
    c.add_argument("--obs2", required=True)
    c.add_argument("--obs3")
    c.add_argument("--post-a")
    c.add_argument("--post-b")
    c.add_argument("--post-fi")
    c.add_argument("--rho-in")
    c.set_defaults(func=cmd_correlate)

    v = sub.add_parser("verify", help="randomized equality suites")
    v.add_argument("suite", choices=["theorem1", "corollary2", "oracle-limit"])
    v.add_argument("--trials", type=int)
    v.add_argument("--dims", type=_dims, default=(2, 3, 4))
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--tol", type=float)
    v.add_argument("--eps", type=float, default=1e-4)
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("ineq", help="Bell / Leggett-Garg evaluations")
    q.add_argument("kind", choices=["chsh", "lg", "werner-scan", "cglmp"])
    q.add_argument("--state")
    q.add_argument("--channel")
    q.add_argument("--rho-in")
    q.add_argument("--optimal", nargs="?", const="singlet", choices=["singlet", "phi+"])
    for name in ("--a1", "--a2", "--b1", "--b2"):
        q.add_argument(name)
    q.add_argument("--step", type=float, default=0.05, help="Werner grid step")
    q.add_argument("--gamma-step", type=float, default=1e-3, help="CGLMP Schmidt scan step")
    q.set_defaults(func=cmd_ineq)

    o = sub.add_parser("oracle", help="finite-strength pointer model")
    o.add_argument("mode", choices=["exact", "mc"])
    o.add_argument("--channel", required=True)
    o.add_argument("--obs1", required=True)
    o.add_argument("--obs2", required=True)
    o.add_argument("--rho-in")
    o.add_argument("--post-fi")
    o.add_argument("--eps", type=float, required=True)
    o.add_argument("--samples", type=int, default=10**6)
    o.add_argument("--seed", type=int)
    o.add_argument("--grid-points", type=int, default=512)
    o.add_argument("--halfwidth", type=float, default=6.0)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("study", help="Haar, decoherence and benchmark studies")
    s.add_argument("kind", choices=["haar", "decoherence", "bench"])
    s.add_argument("--seed", type=int)
    s.add_argument("--dims", type=_dims)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--dim", type=int)
    s.add_argument("--unitary", help="channel file or builtin whose first Kraus matrix is used")
    s.add_argument("--obs1")
    s.add_argument("--obs2")
    s.add_argument("--lambdas", type=_floats)
    s.add_argument("--settings", type=int, default=3)
    s.add_argument("--rank", type=int, default=1)
    s.add_argument("--repeats", type=int, default=5)
    s.set_defaults(func=cmd_study)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except io.InputError as exc:
        _emit_error("InputError", str(exc), exc.pointer)
        return EXIT_INPUT
    except (ShapeError, ConfigurationError) as exc:
        _emit_error(type(exc).__name__, str(exc), "")
        return EXIT_INPUT
    except (DomainError, ArithmeticError) as exc:
        _emit_error(type(exc).__name__, str(exc), None)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
