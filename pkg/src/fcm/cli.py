"""Command-line entry point.

Subcommands run the packaged experiments at desk scale by default
(10 shifts); ``--full`` switches to the 100-shift configuration.
``--assert`` exits with status 2 when the run misses its expected
behaviour (convergence orders, condition-number ratios).
"""

import argparse
import math
import sys

from . import analysis, bench, harness
from .errors import FcmError

EOC_WINDOWS = {"l2": (2.7, 3.5), "h1_semi": (1.7, 2.5), "energy": (1.7, 2.5)}
KAPPA_SLOPE_WINDOW = (-3.7, -2.3)


def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--h", dest="h_values", help="comma-separated mesh sizes")
    p.add_argument("--shifts", help="number of relative grid shifts")
    p.add_argument("--beta", help="Nitsche penalty scale")
    p.add_argument("--tau", help="least-squares weight")
    p.add_argument("--c-alpha", dest="c_alpha", help="virtual stiffness scale")
    p.add_argument("--ls", dest="ls_terms", help="least-squares terms on/off")
    p.add_argument("--p", help="spline degree")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--full", action="store_true",
                   help="full-scale run (100 shifts)")
    p.add_argument("--assert", dest="check", action="store_true",
                   help="exit 2 unless the run meets its expected behaviour")


def build_parser():
    parser = argparse.ArgumentParser(prog="fcm",
                                     description="immersed spline Poisson solver")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="single solve with lattice CSV output")
    _add_common(ps)
    ps.add_argument("--shift", help="shift fraction in [0, 1]")
    ps.add_argument("--lattice", help="sample lattice resolution")
    ps.add_argument("--solver", choices=["direct", "cg"])

    pc = sub.add_parser("convergence", help="error norms over h and shifts")
    _add_common(pc)

    pk = sub.add_parser("condition-sweep", help="condition numbers over h and shifts")
    _add_common(pk)

    px = sub.add_parser("special-case", help="degenerate-cut condition studies")
    _add_common(px)
    px.add_argument("--variant", choices=["rotated45", "aligned"])
    px.add_argument("--deltas", help="comma-separated geometry offsets")
    px.add_argument("--c-alpha-values", dest="c_alpha_values",
                    help="comma-separated virtual stiffness scales")

    pb = sub.add_parser("bench", help="assembly timing")
    pb.add_argument("--h", type=float, default=0.05)
    pb.add_argument("--repeat", type=int, default=3)
    pb.add_argument("--compare", action="store_true",
                    help="time both kernel paths in subprocesses")
    return parser


_CONFIG_KEYS = ["h_values", "shifts", "beta", "tau", "c_alpha", "ls_terms",
                "p", "out", "shift", "lattice", "solver", "variant", "deltas",
                "c_alpha_values"]


def _config_from_args(args):
    overrides = {"experiment": args.command}
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    cfg = harness.load_config(args.config, overrides)
    if args.full:
        cfg.n_shifts = 100
    elif args.shifts is None:
        cfg.n_shifts = 10
    return cfg


def _check_convergence(table):
    ok = True
    for name, (lo, hi) in EOC_WINDOWS.items():
        rate = table.fitted[name]
        inside = lo <= rate <= hi
        print(f"EOC {name}: {rate:.3f} (expected [{lo}, {hi}]) "
              f"{'ok' if inside else 'FAIL'}")
        ok &= inside
    return ok


def _check_condition(slope):
    lo, hi = KAPPA_SLOPE_WINDOW
    inside = lo <= slope <= hi
    print(f"kappa slope: {slope:.3f} (expected [{lo}, {hi}]) "
          f"{'ok' if inside else 'FAIL'}")
    return inside


def kappa_growth_ratio(k_small_delta, k_large_delta):
    """Blow-up ratio between the smallest- and largest-delta condition
    numbers; infinite when the small-delta system is already singular to
    working precision."""
    if math.isinf(k_small_delta):
        return math.inf
    if k_large_delta == 0.0 or math.isinf(k_large_delta):
        return math.nan
    return k_small_delta / k_large_delta


def check_special_case(rows, variant):
    """Expected conditioning behaviour of the degenerate-cut studies."""
    deltas = sorted({r["delta"] for r in rows}, reverse=True)
    by = lambda c: {r["delta"]: r for r in rows if r["c_alpha"] == c}
    ok = True
    if variant == "rotated45":
        plain = by(0.0)
        if plain:
            raw = kappa_growth_ratio(plain[deltas[-1]]["kappa"],
                                     plain[deltas[0]]["kappa"])
            jac = kappa_growth_ratio(plain[deltas[-1]]["kappa_jacobi"],
                                     plain[deltas[0]]["kappa_jacobi"])
            for label, ratio in (("raw", raw), ("jacobi", jac)):
                good = ratio >= 10
                print(f"c_alpha=0 {label} kappa growth: {ratio:.3g} "
                      f"(expected >= 10) {'ok' if good else 'FAIL'}")
                ok &= good
        stab = by(1e-3)
        if stab:
            ks = [stab[d]["kappa"] for d in deltas]
            spread = max(ks) / min(ks)
            good = math.isfinite(spread) and spread <= 100
            print(f"c_alpha=1e-3 kappa spread: {spread:.3g} "
                  f"(expected <= 100) {'ok' if good else 'FAIL'}")
            ok &= good
    else:
        plain = by(0.0)
        if plain:
            ks = [plain[d]["kappa"] for d in deltas]
            finite = all(math.isfinite(k) for k in ks)
            spread = max(ks) / min(ks) if finite else math.inf
            good = finite and spread <= 1e3
            print(f"c_alpha=0 kappa finite={finite} spread={spread:.3g} "
                  f"(expected finite, <= 1e3) {'ok' if good else 'FAIL'}")
            ok &= good
    return ok


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            if args.compare:
                bench.compare_paths(h=args.h, repeat=args.repeat)
            else:
                bench.run_bench(h=args.h, repeat=args.repeat, log=print)
            return 0
        cfg = _config_from_args(args)
        if args.command == "solve":
            rep, err, _ = harness.run_solve(cfg)
            if args.check and not (math.isfinite(err.l2) and math.isfinite(err.energy)):
                return 2
        elif args.command == "convergence":
            _, table = harness.run_convergence(cfg)
            if args.check and not _check_convergence(table):
                return 2
        elif args.command == "condition-sweep":
            _, slope = harness.run_condition_sweep(cfg)
            if args.check and not _check_condition(slope):
                return 2
        elif args.command == "special-case":
            rows = harness.run_special_case(cfg)
            if args.check and not check_special_case(rows, cfg.variant):
                return 2
        return 0
    except FcmError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
