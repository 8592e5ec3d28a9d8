"""Command line front end for the laminate variation experiments."""

from __future__ import annotations

import argparse
import sys

import numpy as np


def _k_list(text):
    try:
        ks = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}") from exc
    if not ks:
        raise argparse.ArgumentTypeError("empty k list")
    return ks


def _norm_list(text):
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _add_run_flags(sub, mode_required=True):
    sub.add_argument("--mode", choices=("bv", "bd"), required=mode_required,
                     default=None if mode_required else "bd")
    sub.add_argument("--field", default="identity2d",
                     help="builtin name or JSON field file")
    sub.add_argument("--subdiv", type=int, default=None,
                     help="mesh subdivisions (default: the field's own)")
    sub.add_argument("--k", type=_k_list, default=(8, 16, 32, 64),
                     help="comma separated fineness values")
    sub.add_argument("--norms", type=_norm_list, default=("frobenius", "schatten"))
    sub.add_argument("--out", default=None, help="output directory for CSV/JSON")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--mc-samples", type=int, default=100_000)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lamvar",
        description="Laminate approximations and variation convergence tables.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="full convergence experiment")
    _add_run_flags(run)

    cx = subs.add_parser("counterexample", help="norm-gap certification for u(x)=x")
    cx.add_argument("--k", type=_k_list, default=(4, 8, 16, 32, 64))
    cx.add_argument("--out", default=None)

    relax = subs.add_parser("relax", help="relaxation upper bound estimate")
    _add_run_flags(relax)

    oracle = subs.add_parser("oracle", help="cross-check slices and envelopes")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--mc-samples", type=int, default=1_000_000)
    oracle.add_argument("--slices", type=int, default=10)
    oracle.add_argument("--matrices", type=int, default=20)
    return parser


def _print_table(table):
    from .pipeline import CSV_HEADER

    print(f"# field={table.field_name} mode={table.mode} target={table.target:.12g}")
    print(CSV_HEADER)
    print(table.to_csv().split("\n", 1)[1], end="")


def _cmd_run(args):
    from .pipeline import ExperimentConfig, run_experiment

    cfg = ExperimentConfig(
        mode=args.mode,
        field=args.field,
        subdivisions=args.subdiv,
        ks=args.k,
        norms=args.norms,
        out_dir=args.out,
        seed=args.seed,
        mc_samples=args.mc_samples,
    )
    _print_table(run_experiment(cfg))
    return 0


def _cmd_counterexample(args):
    from .pipeline import verify_counterexample

    report = verify_counterexample(max(args.k), ks=args.k, out_dir=args.out)
    print(f"frobenius(grad u) = {report.frobenius_of_gradient:.12g}")
    print(f"ssym(grad u)      = {report.ssym_of_gradient:.12g}")
    print("k, bd_frobenius, bd_ssym, bv_frobenius, bv_schatten1")
    for i, k in enumerate(report.ks):
        print(
            f"{k}, {report.bd_frobenius[i]:.12g}, {report.bd_ssym[i]:.12g}, "
            f"{report.bv_frobenius[i]:.12g}, {report.bv_schatten1[i]:.12g}"
        )
    print(f"limit estimate at k={report.ks[-1]}: {report.limit_estimate:.12g}")
    print(f"certified gap ssym - frobenius = {report.gap:.12g}")
    return 0


def _cmd_relax(args):
    from .pipeline import ExperimentConfig, relaxation_estimate

    cfg = ExperimentConfig(
        mode=args.mode,
        field=args.field,
        subdivisions=args.subdiv,
        ks=args.k,
        norms=args.norms,
        out_dir=args.out,
        seed=args.seed,
        mc_samples=args.mc_samples,
    )
    print(f"{relaxation_estimate(cfg):.12g}")
    return 0


def _cmd_oracle(args):
    from .envelope import sandwich
    from .geometry import Simplex, coarea_sum, slice_measure, slice_measure_mc

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.slices):
        n = int(rng.integers(2, 4))
        cell = Simplex(rng.random((n + 1, n)) * 2.0 - 0.5)
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        t = cell.vertices @ d
        off = float(rng.uniform(t.min(), t.max()))
        exact = slice_measure(cell, d, off)
        mc = slice_measure_mc(cell, d, off, samples=args.mc_samples, seed=args.seed)
        rel = abs(exact - mc) / max(exact, 1e-12)
        worst = max(worst, rel)
        print(f"slice n={n} exact={exact:.9g} mc={mc:.9g} rel={rel:.2e}")
    print(f"worst slice relative error: {worst:.2e}")

    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    for k in (8, 16, 32):
        approx = coarea_sum(tri, np.array([1.0, 0.0]), 1.0 / k)
        print(f"coarea k={k}: {approx:.9g} vs volume {tri.volume():.9g}")

    worst_gap = 0.0
    for _ in range(args.matrices):
        A = rng.standard_normal((2, 2))
        est = sandwich(A, seed=args.seed)
        worst_gap = max(worst_gap, est.upper - est.lower)
    print(f"worst envelope sandwich gap over {args.matrices} matrices: {worst_gap:.2e}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "counterexample": _cmd_counterexample,
        "relax": _cmd_relax,
        "oracle": _cmd_oracle,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
