"""Command line interface.

Subcommands cover the pipeline stages individually (simulate, detect,
complete, estimate) plus the Monte Carlo experiment runner. All file
interfaces are CSV with header rows; element indices in files and
arguments are 1-based.
"""

import argparse
import sys

import numpy as np

from .arraysim import (
    ArrayConfig,
    FailureSpec,
    inject_failures,
    random_sources,
    read_snapshot,
    simulate_snapshot,
    write_snapshot,
)
from .detection import LocationSet, detect_failures
from .exceptions import ParameterError, PipelineError
from .hankel import build_hankel, default_pencil_length, dehankel, hankel_mask
from .pencil import tls_matrix_pencil
from .svt import SvtParams, svt_complete
from .experiment import load_config, run_experiment, write_reports


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _csv_indices(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("indices are 1-based and must be >= 1")
    return values


def _complex_value(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
    raise argparse.ArgumentTypeError("expected 're' or 're,im'")


def _cmd_simulate(args) -> None:
    cfg = ArrayConfig(
        n_elements=args.elements, spacing=args.spacing, wavelength=args.wavelength
    )
    rng = np.random.default_rng(args.seed)
    sources = random_sources(args.angles, rng)
    x = simulate_snapshot(cfg, sources, args.snr, rng)
    if args.fail_indices:
        spec = FailureSpec(
            indices=tuple(i - 1 for i in args.fail_indices),
            model=args.fail_model,
            value=args.fail_value,
        )
        prev = read_snapshot(args.prev) if args.prev else None
        if spec.model == "previous" and prev is None:
            raise ParameterError("--fail-model previous requires --prev")
        x = inject_failures(x, spec, prev=prev)
    write_snapshot(x, args.out)


def _cmd_detect(args) -> None:
    prev = read_snapshot(args.prev)
    curr = read_snapshot(args.curr)
    loc = detect_failures(
        prev, curr, epsilon=args.epsilon, dead_epsilon=args.dead_epsilon
    )
    line = loc.to_csv_line()
    if args.out:
        with open(args.out, "w", newline="") as f:
            f.write(line + "\n")
    else:
        print(line)


def _cmd_complete(args) -> None:
    x = read_snapshot(args.snapshot)
    failed = [i - 1 for i in args.failed]
    loc = LocationSet.from_failed(failed, n_elements=x.size)
    length = args.length if args.length is not None else default_pencil_length(x.size)
    params = SvtParams(
        tau=args.tau, delta=args.delta, epsilon=args.tol, max_iters=args.max_iters
    )
    data = build_hankel(x, length)
    mask = hankel_mask(loc, length)
    result = svt_complete(data, mask, params, trace_path=args.trace)
    write_snapshot(dehankel(result.completed), args.out)
    print(
        f"completed in {result.iterations} iterations, "
        f"relative residual {result.final_residual:.3e}"
        + ("" if result.converged else " (not converged)")
    )


def _cmd_estimate(args) -> None:
    x = read_snapshot(args.snapshot)
    cfg = ArrayConfig(
        n_elements=x.size, spacing=args.spacing, wavelength=args.wavelength
    )
    est = tls_matrix_pencil(x, args.sources, cfg, args.length)
    if args.out:
        with open(args.out, "w", newline="") as f:
            f.write("angle_deg\n")
            for a in est.angles_deg:
                f.write(f"{a:.17g}\n")
    else:
        for a in est.angles_deg:
            print(f"{a:.17g}")


def _cmd_experiment(args) -> None:
    cfg = load_config(args.config)
    records = run_experiment(cfg)
    paths = write_reports(records, args.out, n_elements=cfg.array.n_elements)
    for name, path in paths.items():
        print(f"{name}: {path}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftdoa",
        description="Fault-tolerant direction-of-arrival estimation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a simulated snapshot CSV")
    p.add_argument("--elements", type=int, required=True, help="array size M")
    p.add_argument("--spacing", type=float, default=0.5)
    p.add_argument("--wavelength", type=float, default=1.0)
    p.add_argument(
        "--angles", type=_csv_floats, required=True,
        help="comma-separated arrival angles in degrees",
    )
    p.add_argument("--snr", type=float, default=float("inf"),
                   help="per-element SNR in dB ('inf' for noiseless)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fail-indices", type=_csv_indices, default=None,
                   help="1-based indices of failed elements")
    p.add_argument("--fail-model", choices=["zero", "previous", "constant"],
                   default="zero")
    p.add_argument("--fail-value", type=_complex_value, default=0j,
                   help="constant-model output as 're' or 're,im'")
    p.add_argument("--prev", default=None,
                   help="previous snapshot CSV (required by --fail-model previous)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("detect", help="list working elements from two snapshots")
    p.add_argument("prev", help="snapshot CSV with all elements healthy")
    p.add_argument("curr", help="current snapshot CSV")
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--dead-epsilon", type=float, default=None)
    p.add_argument("--out", default=None, help="write the CSV line here instead of stdout")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("complete", help="recover failed elements by matrix completion")
    p.add_argument("snapshot", help="snapshot CSV with failed entries")
    p.add_argument("--failed", type=_csv_indices, required=True,
                   help="1-based indices of failed elements")
    p.add_argument("--length", type=int, default=None, help="pencil window L")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--trace", default=None, help="per-iteration residual CSV path")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_complete)

    p = sub.add_parser("estimate", help="estimate arrival angles from a snapshot")
    p.add_argument("snapshot", help="snapshot CSV")
    p.add_argument("--sources", type=int, required=True, help="number of sources N")
    p.add_argument("--length", type=int, default=None, help="pencil window L")
    p.add_argument("--spacing", type=float, default=0.5)
    p.add_argument("--wavelength", type=float, default=1.0)
    p.add_argument("--out", default=None, help="write angles CSV here instead of stdout")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a Monte Carlo sweep from a JSON config")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--out", required=True, help="report output directory")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        args.func(args)
    except PipelineError as e:
        print(f"ftdoa {args.command}: error {e}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as e:
        print(f"ftdoa {args.command}: error [{args.command}] {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
