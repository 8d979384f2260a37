"""Command-line entry point.

Exit codes: 0 success, 1 usage/config error, 2 numerical branch failure,
3 singular localizer.  stdout carries only machine-readable JSON for
query commands; human diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np
from scipy.sparse.linalg import norm as sp_norm

from .bott import bott_index_from_fermi
from .errors import BranchProximityError, EmptyLatticeError, TopoindexError
from .experiments import (
    METHOD_BOTT,
    METHOD_LOCALIZER,
    KAPPA_FIXED,
    KAPPA_OVER_L,
    SweepPlan,
    config_hash,
    run_sweep,
    timing_study,
    write_manifest,
)
from .localizer import LocalizerProbe, localizer_index, perturbation_bound_check
from .model import (
    ModelSpec,
    build_hamiltonian,
    build_lattice,
    periodic_observables,
    position_operators,
    sample_disorder,
    write_triplets,
)
from .pseudospectrum import (
    DEFAULT_PRUNING_CUTOFF,
    DEFAULT_TAU,
    GridSpec,
    gap_slice,
    gap_volume,
    index_regions,
    write_gap_csv,
    write_regions_csv,
    write_sidecar,
)
from .spectral import diagonalize, fermi_basis

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BRANCH = 2
EXIT_SINGULAR = 3


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load_spec(path) -> ModelSpec:
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    return ModelSpec.from_file(path)


def _operators(spec: ModelSpec, sample: int):
    lattice = build_lattice(spec)
    H = build_hamiltonian(spec, lattice, sample_disorder(spec, sample))
    return lattice, H


def cmd_model(args) -> int:
    spec = _load_spec(args.config)
    lattice, H = _operators(spec, args.sample)
    if args.export_h:
        write_triplets(H, args.export_h)
    _emit(
        {
            "L": spec.L,
            "boundary": spec.boundary,
            "sites": lattice.n_sites,
            "edges": len(lattice.edges),
            "dimension": lattice.dim,
            "nnz": int(H.nnz),
            "config_hash": config_hash(json.loads(spec.to_json())),
        }
    )
    return EXIT_OK


def cmd_bott(args) -> int:
    spec = _load_spec(args.config)
    if spec.boundary != "periodic":
        return _fail("the Bott index requires a periodic-boundary config")
    lattice, H = _operators(spec, args.sample)
    obs = periodic_observables(lattice)
    fermi = fermi_basis(diagonalize(H), args.ef)
    try:
        res = bott_index_from_fermi(fermi, obs.U, obs.V)
    except BranchProximityError as exc:
        print(f"branch failure: {exc}", file=sys.stderr)
        return EXIT_BRANCH
    payload = res.to_dict()
    payload["ef"] = args.ef
    payload["m"] = fermi.m
    _emit(payload)
    return EXIT_OK


def cmd_localizer(args) -> int:
    spec = _load_spec(args.config)
    lattice, H = _operators(spec, args.sample)
    X, Y = position_operators(lattice, "raw")
    try:
        lam = tuple(float(t) for t in args.lam.split(","))
        probe = LocalizerProbe(lam=lam, kappa=args.kappa)
    except ValueError as exc:
        return _fail(str(exc))
    rep = localizer_index(X, Y, H, probe)
    _emit(rep.to_dict())
    return EXIT_SINGULAR if rep.singular_flag else EXIT_OK


def cmd_pseudospectrum(args) -> int:
    spec = _load_spec(args.config)
    lattice, H = _operators(spec, args.sample)
    X, Y = position_operators(lattice, "raw")
    # default extent shows the sample plus an exterior band past the edge
    half = args.extent if args.extent else 0.75 * spec.L * args.kappa
    if args.volume:
        norm = float(sp_norm(H, 1))  # upper bound on ||H||
        grid = GridSpec(
            range1=(-half, half), range2=(-half, half), resolution=args.grid,
            range3=(-norm, norm), resolution3=args.grid,
        )
        fld = gap_volume(X, Y, H, args.kappa, grid, pruning_cutoff=args.prune)
    else:
        grid = GridSpec(
            range1=(-half, half), range2=(-half, half), resolution=args.grid,
            slice_value=args.slice,
        )
        fld = gap_slice(X, Y, H, args.kappa, grid, pruning_cutoff=args.prune)
    regions = index_regions(fld, X, Y, H, args.kappa, tau=args.tau)
    os.makedirs(args.out, exist_ok=True)
    write_gap_csv(fld, os.path.join(args.out, "gap.csv"))
    write_regions_csv(regions, os.path.join(args.out, "regions.csv"))
    write_sidecar(
        os.path.join(args.out, "manifest.json"),
        grid,
        args.kappa,
        args.tau,
        config_hash(json.loads(spec.to_json())),
        args.prune,
    )
    print(f"wrote gap.csv, regions.csv, manifest.json to {args.out}", file=sys.stderr)
    return EXIT_OK


def _plan_from_args(args) -> SweepPlan:
    spec = _load_spec(args.config)
    levels = tuple(float(t) for t in args.ef_grid.split(","))
    rule = KAPPA_OVER_L if args.kappa_over_l is not None else KAPPA_FIXED
    value = args.kappa_over_l if args.kappa_over_l is not None else args.kappa
    return SweepPlan(
        method=args.method,
        model=spec,
        fermi_levels=tuple(sorted(levels)),
        n_samples=args.samples,
        base_seed=args.seed,
        kappa_rule=rule,
        kappa_value=value,
    )


def cmd_sweep(args) -> int:
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as fh:
            stored = json.load(fh)["plan"]
        model = ModelSpec.from_json(json.dumps(stored["model"]))
        plan = SweepPlan(
            method=stored["method"],
            model=model,
            fermi_levels=tuple(stored["fermi_levels"]),
            n_samples=stored["n_samples"],
            base_seed=stored["base_seed"],
            kappa_rule=stored["kappa_rule"],
            kappa_value=stored["kappa_value"],
        )
    else:
        plan = _plan_from_args(args)
    table = run_sweep(plan, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    table.to_csv(os.path.join(args.out, "sweep.csv"))
    write_manifest(os.path.join(args.out, "manifest.json"), table.manifest())
    print(f"wrote sweep.csv, manifest.json to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_timing(args) -> int:
    L_list = [int(t) for t in args.L.split(",")]
    table = timing_study(args.method, L_list, samples_per_L=args.samples,
                         base_seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    table.to_csv(os.path.join(args.out, "timing.csv"))
    write_manifest(os.path.join(args.out, "manifest.json"), table.manifest())
    print(f"wrote timing.csv, manifest.json to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_check_lemma(args) -> int:
    rng = np.random.default_rng(args.seed)
    results = []
    all_hold = True
    for _ in range(args.trials):
        n = int(rng.integers(4, args.n + 1))
        x = rng.uniform(-1, 1, n)
        y = rng.uniform(-1, 1, n)
        # keep Z = X + iY safely invertible
        bad = np.hypot(x, y) < 0.2
        while bad.any():
            x[bad] = rng.uniform(-1, 1, bad.sum())
            y[bad] = rng.uniform(-1, 1, bad.sum())
            bad = np.hypot(x, y) < 0.2
        H = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = (H + H.conj().T) / 2
        if rng.random() < 0.5:
            # near the commutant of Z: the regime where the index-equality
            # hypothesis actually fires
            H = np.diag(rng.uniform(-2, 2, n)) + 0.05 * H
        eps = float(rng.choice([0.005, 0.02, 0.1]))
        H0 = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H0 = eps * (H0 + H0.conj().T) / 2
        rep = perturbation_bound_check(np.diag(x), np.diag(y), H, H0)
        ok = rep.inequality_holds and (not rep.hypothesis_holds or rep.indices_agree)
        all_hold = all_hold and ok
        results.append(rep.to_dict())
    summary = {
        "trials": args.trials,
        "all_hold": all_hold,
        "hypothesis_triggered": sum(1 for r in results if r["hypothesis_holds"]),
        "results": results if args.verbose else None,
    }
    _emit(summary)
    return EXIT_OK if all_hold else EXIT_BRANCH


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoindex",
        description="Real-space topological invariants for finite tight-binding models",
    )
    parser.add_argument("--jobs", type=int, default=os.cpu_count(),
                        help="worker pool size for sample-parallel studies")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="validate a config and export operators")
    p.add_argument("config")
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--export-h", default=None, help="write H in sparse-triplet format")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("bott", help="Bott index of one disorder sample")
    p.add_argument("config")
    p.add_argument("--ef", type=float, default=0.0)
    p.add_argument("--sample", type=int, default=0)
    p.set_defaults(func=cmd_bott)

    p = sub.add_parser("localizer", help="localizer index and gap at a probe")
    p.add_argument("config")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", default="0,0,0",
                   help="probe point l1,l2,l3")
    p.add_argument("--sample", type=int, default=0)
    p.set_defaults(func=cmd_localizer)

    p = sub.add_parser("pseudospectrum", help="gap field and index regions")
    p.add_argument("config")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--slice", type=float, default=0.0,
                       help="2D slice at this energy")
    group.add_argument("--volume", action="store_true", help="coarse 3D volume")
    p.add_argument("--grid", type=int, default=21, help="resolution per axis")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--extent", type=float, default=None,
                   help="half-width of the probe window in scaled units")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--prune", type=float, default=DEFAULT_PRUNING_CUTOFF,
                   help="pruning cutoff; 0 disables pruning")
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--out", default="pseudospectrum-out")
    p.set_defaults(func=cmd_pseudospectrum)

    p = sub.add_parser("sweep", help="disorder-averaged index sweep")
    p.add_argument("config", nargs="?")
    p.add_argument("--method", choices=[METHOD_BOTT, METHOD_LOCALIZER],
                   default=METHOD_BOTT)
    p.add_argument("--ef-grid", default="-8,-7,-6,-5,-4,-3,-2,-1,0")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--kappa-over-l", type=float, default=None,
                   help="use kappa = C/L with this C (localizer only)")
    p.add_argument("--manifest", default=None,
                   help="re-run the exact plan stored in a sweep manifest")
    p.add_argument("--out", default="sweep-out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("timing", help="phase timing study")
    p.add_argument("--method", choices=[METHOD_BOTT, METHOD_LOCALIZER],
                   required=True)
    p.add_argument("--L", required=True, help="comma-separated system sizes")
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="timing-out")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("check-lemma", help="perturbation-bound certificate")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_check_lemma)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "sweep" and not args.manifest:
        if args.config is None:
            return _fail("sweep requires a config file or --manifest")
        if args.samples < 1:
            return _fail("--samples must be >= 1")
    try:
        return args.func(args)
    except (FileNotFoundError, EmptyLatticeError, ValueError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    except BranchProximityError as exc:
        print(f"branch failure: {exc}", file=sys.stderr)
        return EXIT_BRANCH
    except TopoindexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
