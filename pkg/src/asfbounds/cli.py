"""Command-line front end for reproducible batch runs.

Subcommands::

    asfbounds simulate  --n N --seed S --out PREFIX
    asfbounds bounds    REVEALED.csv STATED.csv --x X [flags]
    asfbounds infer     REVEALED.csv STATED.csv --x X [flags]
    asfbounds matched   MATCHED.csv --x X [flags]
    asfbounds replicate --scale {desk,full} [flags]
    asfbounds analytic  --x X

Every command is a pure function of its inputs, flags and seed: reruns
produce byte-identical primary outputs, including JSON key order. Runs
that write files also write a ``*.manifest.json`` with the resolved
configuration, SHA-256 digests of inputs and outputs, and the wall clock.

Exit codes: 0 success, 1 estimation failure, 2 IO or usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .config import AnalysisConfig
from .data import load_matched_csv, load_revealed_csv, load_stated_csv
from .exceptions import DataValidationError, EstimationError
from .inference import confidence_region
from .bounds import bounds_with_exclusion
from .matched import bootstrap_matched
from .simulation import (
    MonteCarloPlan,
    analytic_bounds,
    analytic_theta,
    run_monte_carlo,
    simulate_sample,
    true_asf,
)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


@dataclass(frozen=True)
class RunManifest:
    """Audit record written next to file outputs.

    ``inputs``/``outputs`` map paths to SHA-256 digests; recomputing a
    digest on read and comparing against the manifest detects tampering.
    ``wall_clock_s`` is informational and excluded from the byte-identity
    guarantee of the primary outputs.
    """

    command: str
    version: str
    config: dict
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def _write_manifest(path: str, command: str, config: dict,
                    inputs: list[str], outputs: list[str], t0: float) -> None:
    manifest = RunManifest(
        command=command,
        version=__version__,
        config=config,
        inputs={p: _sha256(p) for p in inputs},
        outputs={p: _sha256(p) for p in outputs},
        wall_clock_s=round(time.perf_counter() - t0, 3),
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json())


def _default_workers() -> int:
    return int(os.environ.get("ASFBOUNDS_WORKERS", "1"))


def _config_from(args) -> AnalysisConfig:
    return AnalysisConfig(
        K=args.K,
        M=args.grid_m,
        B=getattr(args, "B", 1000),
        alpha=getattr(args, "alpha", 0.05),
        xi_scale=getattr(args, "xi_scale", 1.0),
        seed=getattr(args, "seed", 0),
        boundary_correction=args.boundary_correction,
        z_drop_floor=args.z_drop_floor,
        workers=args.workers,
    )


def _schema_from(args) -> dict:
    schema: dict = {"z": args.z_col}
    if args.p_cols:
        schema["p"] = [c.strip() for c in args.p_cols.split(",") if c.strip()]
    return schema


def _add_estimation_flags(sub, with_infer: bool) -> None:
    sub.add_argument("--x", type=int, required=True, help="attribute value of interest")
    sub.add_argument("--z-col", default="z", help="name of the excluded-covariate column")
    sub.add_argument("--p-cols", default=None, help="comma-separated report columns")
    sub.add_argument("--K", type=float, default=50.0, help="dual-variable box half-width")
    sub.add_argument("--grid-m", type=int, default=1001, help="grid points per axis")
    sub.add_argument("--z-drop-floor", type=int, default=20,
                     help="minimum rows per covariate cell")
    sub.add_argument("--boundary-correction", choices=["none", "reflection"],
                     default="none")
    sub.add_argument("--discrete-p", action="store_true",
                     help="treat reports as discrete (count densities)")
    sub.add_argument("--workers", type=int, default=_default_workers())
    sub.add_argument("--out", default=None, help="write JSON here instead of stdout")
    if with_infer:
        sub.add_argument("--B", type=int, default=1000, help="bootstrap replications")
        sub.add_argument("--alpha", type=float, default=0.05)
        sub.add_argument("--xi-scale", type=float, default=1.0)
        sub.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asfbounds",
        description="Average structural function estimation and bounds "
                    "from stated and revealed binary-choice data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", help="draw a benchmark sample to CSV files")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True,
                     help="output prefix; writes PREFIXmatched.csv, PREFIXrevealed.csv, "
                          "PREFIXstated.csv and PREFIXmanifest.json")

    bnd = commands.add_parser("bounds", help="plug-in bounds from unmatched samples")
    bnd.add_argument("revealed", help="CSV of decisions")
    bnd.add_argument("stated", help="CSV of probability reports")
    _add_estimation_flags(bnd, with_infer=False)

    inf = commands.add_parser("infer", help="bootstrap confidence region for the bounds")
    inf.add_argument("revealed")
    inf.add_argument("stated")
    _add_estimation_flags(inf, with_infer=True)

    mat = commands.add_parser("matched", help="point estimate from matched data")
    mat.add_argument("matched", help="CSV with decisions and reports per row")
    mat.add_argument("--x", type=int, required=True)
    mat.add_argument("--p-cols", default=None)
    mat.add_argument("--z-col", default="z")
    mat.add_argument("--B", type=int, default=1000)
    mat.add_argument("--alpha", type=float, default=0.05)
    mat.add_argument("--seed", type=int, default=0)
    mat.add_argument("--workers", type=int, default=_default_workers())
    mat.add_argument("--out", default=None)

    rep = commands.add_parser("replicate", help="run the Monte Carlo coverage study")
    rep.add_argument("--scale", choices=["desk", "full"], default="desk")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--out", required=True, help="CSV path for the coverage grid")
    rep.add_argument("--workers", type=int, default=_default_workers())
    rep.add_argument("--x", type=int, default=0)
    rep.add_argument("--reps", type=int, default=None,
                     help="override repetitions per cell (smoke runs)")
    rep.add_argument("--B-boot", type=int, default=None, dest="B_boot",
                     help="override bootstrap replications (smoke runs)")
    rep.add_argument("--n-values", default=None,
                     help="override comma-separated sample sizes (smoke runs)")
    rep.add_argument("--xi-scales", default=None,
                     help="override comma-separated step-size scales")

    ana = commands.add_parser("analytic", help="closed-form benchmark oracles")
    ana.add_argument("--x", type=int, required=True, choices=[0, 1])
    ana.add_argument("--out", default=None)

    return parser


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    sample = simulate_sample(args.n, args.seed)
    prefix = args.out
    parent = os.path.dirname(prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)
    paths = {
        "matched": f"{prefix}matched.csv",
        "revealed": f"{prefix}revealed.csv",
        "stated": f"{prefix}stated.csv",
    }
    sample.to_csv(paths["matched"])
    sample.revealed_view().to_csv(paths["revealed"])
    sample.stated_view().to_csv(paths["stated"])
    _write_manifest(
        f"{prefix}manifest.json", "simulate",
        {"n": args.n, "seed": args.seed, "out": prefix},
        inputs=[], outputs=list(paths.values()), t0=t0,
    )
    return 0


def cmd_bounds(args) -> int:
    t0 = time.perf_counter()
    schema = _schema_from(args)
    revealed = load_revealed_csv(args.revealed, schema)
    stated = load_stated_csv(args.stated, schema)
    config = _config_from(args)
    from .inference import estimate_theta

    theta = estimate_theta(revealed, stated, args.x, config, discrete_p=args.discrete_p)
    result = bounds_with_exclusion(theta, config)
    payload = {"x": args.x, **result.to_dict(),
               "inputs": {"revealed": revealed.validation_report(),
                          "stated": stated.validation_report()}}
    _emit(payload, args.out)
    if args.out:
        _write_manifest(f"{args.out}.manifest.json", "bounds", config.to_dict(),
                        inputs=[args.revealed, args.stated], outputs=[args.out], t0=t0)
    return 0


def cmd_infer(args) -> int:
    t0 = time.perf_counter()
    schema = _schema_from(args)
    revealed = load_revealed_csv(args.revealed, schema)
    stated = load_stated_csv(args.stated, schema)
    config = _config_from(args)
    region = confidence_region(revealed, stated, args.x, config,
                               discrete_p=args.discrete_p)
    _emit(region.to_dict(), args.out)
    if args.out:
        _write_manifest(f"{args.out}.manifest.json", "infer", config.to_dict(),
                        inputs=[args.revealed, args.stated], outputs=[args.out], t0=t0)
    return 0


def cmd_matched(args) -> int:
    t0 = time.perf_counter()
    schema = _schema_from(args)
    data = load_matched_csv(args.matched, schema)
    config = AnalysisConfig(B=args.B, alpha=args.alpha, seed=args.seed,
                            workers=args.workers)
    estimate = bootstrap_matched(data, args.x, config=config)
    _emit(estimate.to_dict(), args.out)
    if args.out:
        _write_manifest(f"{args.out}.manifest.json", "matched", config.to_dict(),
                        inputs=[args.matched], outputs=[args.out], t0=t0)
    return 0


_SCALES = {
    "desk": {"n_values": (500, 1000), "repetitions": 200, "B": 200},
    "full": {"n_values": (500, 1000, 2000), "repetitions": 1000, "B": 1000},
}


def cmd_replicate(args) -> int:
    t0 = time.perf_counter()
    scale = dict(_SCALES[args.scale])
    if args.reps is not None:
        scale["repetitions"] = args.reps
    if args.B_boot is not None:
        scale["B"] = args.B_boot
    if args.n_values is not None:
        scale["n_values"] = tuple(int(v) for v in args.n_values.split(","))
    xi_scales = (0.5, 0.75, 1.0, 1.5)
    if args.xi_scales is not None:
        xi_scales = tuple(float(v) for v in args.xi_scales.split(","))
    plan = MonteCarloPlan(
        n_values=scale["n_values"], xi_scales=xi_scales,
        repetitions=scale["repetitions"], B=scale["B"],
        seed=args.seed, x=args.x,
    )
    config = AnalysisConfig(workers=args.workers)
    report = run_monte_carlo(plan, config)
    report.to_csv(args.out)
    _write_manifest(
        f"{args.out}.manifest.json", "replicate",
        {"scale": args.scale, "plan": {
            "n_values": list(plan.n_values), "xi_scales": list(plan.xi_scales),
            "repetitions": plan.repetitions, "B": plan.B,
            "alpha": plan.alpha, "seed": plan.seed, "x": plan.x, "split": plan.split,
        }},
        inputs=[], outputs=[args.out], t0=t0,
    )
    return 0


def cmd_analytic(args) -> int:
    oracle = analytic_bounds(args.x)
    theta = analytic_theta(args.x)
    payload = {
        "x": args.x,
        "true_asf": true_asf(args.x),
        "bounds": oracle.to_dict(),
        "e_values": {str(z): theta.cell(z).e for z in theta.z_values},
    }
    _emit(payload, args.out)
    return 0


_DISPATCH = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "infer": cmd_infer,
    "matched": cmd_matched,
    "replicate": cmd_replicate,
    "analytic": cmd_analytic,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (DataValidationError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "io"}) + "\n")
        return 2
    except EstimationError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "estimation"}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
