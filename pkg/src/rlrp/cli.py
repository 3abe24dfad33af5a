"""Command-line entry point: ``rlrp {synth,corrupt,decompose,benchmark,diag}``.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 solver
numerical failure.
"""
import argparse
import csv
import json
import math
import os
import sys
import time

from . import __version__
from .benchmark import DESK_SCALE, METHODS, default_max_iter, load_scenario, rows_to_csv, run_benchmark, solve, summary_to_csv
from .core import ConfigError, NumericalError, SolverConfig
from .imageio import FormatError, read_image, write_image
from .linops import Blur, Downsample, Identity, Mask, describe
from .metrics import CSV_COLUMNS, MetricReport, report
from .noise import NoiseSpec, corrupt, sample_noise
from .pdhg import pdhg_solve
from .pps import pps_solve
from .synth import make_ground_truth


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _split(path):
    root, ext = os.path.splitext(path)
    return root, ext or ".rlf"


def _add_phi(p):
    p.add_argument("--phi", choices=("identity", "mask", "downsample", "blur"), default="identity")
    p.add_argument("--mask", help="binary mask image for --phi mask")
    p.add_argument("--keep-prob", type=float, default=0.4)
    p.add_argument("--phi-seed", type=int, help="down-sampling seed (default: --seed)")
    p.add_argument("--blur-size", type=int, default=4)


def _phi_from(args, shape):
    if args.phi == "identity":
        return Identity()
    if args.phi == "mask":
        if not args.mask:
            raise UsageError("--phi mask needs --mask FILE")
        return Mask(read_image(args.mask))
    if args.phi == "downsample":
        seed = args.phi_seed if args.phi_seed is not None else getattr(args, "seed", 0)
        return Downsample(args.keep_prob, seed).materialize(shape)
    return Blur.average(args.blur_size)


def _add_solver(p):
    d = DESK_SCALE
    p.add_argument("--method", choices=METHODS, default="rlrp-pps")
    p.add_argument("--tau", type=float, default=d.tau)
    p.add_argument("--mu", type=float, default=d.mu)
    p.add_argument("--c", type=float, default=d.c, help="Huber threshold; 'inf' gives the quadratic loss")
    p.add_argument("--beta", type=float, default=d.beta)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--r", type=float, default=d.r)
    p.add_argument("--s", type=float, default=d.s)
    p.add_argument("--sigma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--eps", type=float, default=d.epsilon)
    p.add_argument("--max-iter", type=int, help="default 500 for mask/downsample, else 200")
    p.add_argument("--seed", type=int, default=0)


def _cfg_from(args):
    return SolverConfig(tau=args.tau, mu=args.mu, c=args.c, beta=args.beta, gamma=args.gamma,
                        r=args.r, s=args.s, sigma=args.sigma, eta=args.eta,
                        epsilon=args.eps,
                        max_iter=args.max_iter if args.max_iter is not None else default_max_iter(args.phi))


def cmd_synth(args):
    gt = make_ground_truth(args.size, args.rank, args.regions, args.seed, args.w_cartoon, args.channels)
    os.makedirs(args.out_dir, exist_ok=True)
    prefix = os.path.join(args.out_dir, args.prefix)
    names = {}
    for part in ("cartoon", "texture", "composite"):
        path = f"{prefix}{part}.{args.format}"
        write_image(getattr(gt, part), path)
        names[part] = os.path.basename(path)
    manifest = dict(size=args.size, rank=args.rank, regions=args.regions, seed=args.seed,
                    channels=args.channels, weights=list(gt.weights), files=names)
    with open(f"{prefix}manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_corrupt(args):
    clean = read_image(args.input)
    phi = _phi_from(args, clean.shape)
    spec = NoiseSpec(args.noise, args.intensity, args.seed, args.noise_param)
    out = args.output or "{}.observed{}".format(*_split(args.input))
    write_image(corrupt(clean, phi, spec), out)
    root, _ = _split(out)
    write_image(sample_noise(spec, clean.shape), root + ".noise.rlf")
    return 0


def _metrics_row(args, reference, restored, result, elapsed, phi):
    if reference is None:
        return MetricReport(os.path.basename(args.input), args.method, describe(phi), args.noise_label,
                            args.seed, math.nan, math.nan, result.iterations, elapsed)
    return report(reference, restored, image=os.path.basename(args.input), method=args.method,
                  phi=describe(phi), noise=args.noise_label, seed=args.seed,
                  iterations=result.iterations, time_s=elapsed)


def _emit_rows(rows, path):
    if path:
        new = not os.path.exists(path) or os.path.getsize(path) == 0
        with open(path, "a", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow(r.row())
    else:
        sys.stdout.write(rows_to_csv(rows))


def cmd_decompose(args):
    b0 = read_image(args.input)
    phi = _phi_from(args, b0.shape)
    cfg = _cfg_from(args)
    start = time.perf_counter()
    result = solve(args.method, b0, phi, cfg)
    elapsed = time.perf_counter() - start
    root, ext = _split(args.input)
    if args.out_prefix:
        root = args.out_prefix
    if args.format:
        ext = "." + args.format
    write_image(result.u, f"{root}.u{ext}")
    write_image(result.v, f"{root}.v{ext}")
    write_image(result.restored, f"{root}.restored{ext}")
    reference = read_image(args.reference) if args.reference else None
    _emit_rows([_metrics_row(args, reference, result.restored, result, elapsed, phi)], args.metrics)
    return 0


def cmd_benchmark(args):
    scenario = load_scenario(args.scenario)
    result = run_benchmark(scenario, workers=args.workers)
    root = args.output or os.path.splitext(args.scenario)[0]
    with open(root + ".csv", "w") as fh:
        fh.write(result.csv())
    with open(root + ".summary.csv", "w") as fh:
        fh.write(summary_to_csv(result.summary))
    sys.stdout.write(summary_to_csv(result.summary))
    return 0


TRACE_COLUMNS = ("iteration", "objective", "tol", "constraint_residual", "q_residual", "gap", "ergodic_gap")


def cmd_diag(args):
    b0 = read_image(args.input)
    phi = _phi_from(args, b0.shape)
    cfg = _cfg_from(args)
    if args.method == "clrp":
        cfg = cfg.replace(c=math.inf)
    if args.method == "rlrp-pps" or (args.method == "clrp" and isinstance(phi, Identity)):
        if not isinstance(phi, Identity):
            raise UsageError("rlrp-pps requires --phi identity")
        result = pps_solve(b0, cfg, record_q=True)
    else:
        result = pdhg_solve(b0, phi, cfg, record_gap=True)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for k, t in enumerate(result.trace, 1):
            w.writerow([k] + ["" if x is None else repr(x) for x in
                              (t.objective, t.tol, t.constraint_residual, t.q_residual, t.gap, t.ergodic_gap)])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser():
    p = _Parser(prog="rlrp", description="Robust cartoon-texture decomposition.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write a synthetic cartoon/texture/composite triple")
    s.add_argument("--size", type=int, default=64)
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--regions", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--w-cartoon", type=float, default=0.7)
    s.add_argument("--channels", type=int, default=1)
    s.add_argument("--out-dir", default=".")
    s.add_argument("--prefix", default="synth.")
    s.add_argument("--format", choices=("rlf", "pgm"), default="rlf")
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("corrupt", help="degrade an image and add heavy-tailed noise")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    _add_phi(c)
    c.add_argument("--noise", choices=("student-t", "cauchy", "ged"), default="student-t")
    c.add_argument("--noise-param", type=float, default=2.0, help="df (student-t) or shape (ged)")
    c.add_argument("--intensity", type=float, default=0.1)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_corrupt)

    for name, func, helptext in (("decompose", cmd_decompose, "split an image into cartoon and texture"),
                                 ("diag", cmd_diag, "write the per-iteration trace as CSV")):
        d = sub.add_parser(name, help=helptext)
        d.add_argument("input")
        _add_phi(d)
        _add_solver(d)
        if name == "decompose":
            d.add_argument("--reference", help="clean image for SNR/SSIM")
            d.add_argument("--metrics", help="append the metrics row to this CSV (default: stdout)")
            d.add_argument("--noise-label", default="unknown")
            d.add_argument("--out-prefix")
            d.add_argument("--format", choices=("rlf", "pgm", "ppm"))
        else:
            d.add_argument("-o", "--output")
        d.set_defaults(func=func)

    b = sub.add_parser("benchmark", help="run a scenario file")
    b.add_argument("scenario")
    b.add_argument("-o", "--output", help="output prefix (default: scenario path without suffix)")
    b.add_argument("--workers", type=int)
    b.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, FormatError):
            print(f"rlrp: {exc}", file=sys.stderr)
            return 2
        print(f"rlrp: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"rlrp: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"rlrp: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
