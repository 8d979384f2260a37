"""Study orchestration: disorder-averaged sweeps, timing, integer error,
and kappa scaling, with seed bookkeeping and persisted outputs.

Samples are independent jobs; aggregation sums in sample order after all
jobs finish, so results are identical at any worker count.  One Bott
sweep performs exactly one diagonalization per sample no matter how many
Fermi levels it evaluates.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bott import bott_index_from_fermi
from .errors import BranchProximityError, GapSolverError, SignatureError
from .localizer import LocalizerProbe, localizer_gap, localizer_index
from .model import (
    ModelSpec,
    build_hamiltonian,
    build_lattice,
    periodic_observables,
    position_operators,
    sample_disorder,
)
from .spectral import diagonalize, fermi_basis

METHOD_BOTT = "bott"
METHOD_LOCALIZER = "localizer"

KAPPA_FIXED = "fixed"
KAPPA_OVER_L = "over_L"

# instrumentation for the one-diagonalization-per-sample contract
DIAGONALIZATION_COUNTER = {"count": 0}


def config_hash(obj) -> str:
    """sha256 of the canonical JSON of a plan/config mapping."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SweepPlan:
    method: str
    model: ModelSpec
    fermi_levels: tuple
    n_samples: int
    base_seed: int = 0
    kappa_rule: str = KAPPA_FIXED
    kappa_value: float = 1.0  # kappa for 'fixed', C for 'over_L'

    def __post_init__(self):
        if self.method not in (METHOD_BOTT, METHOD_LOCALIZER):
            raise ValueError(f"unknown method {self.method!r}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        levels = tuple(self.fermi_levels)
        if not levels:
            raise ValueError("fermi_levels must be nonempty")
        if list(levels) != sorted(levels):
            raise ValueError("fermi_levels must be sorted ascending")
        object.__setattr__(self, "fermi_levels", levels)
        if self.kappa_rule not in (KAPPA_FIXED, KAPPA_OVER_L):
            raise ValueError(f"unknown kappa rule {self.kappa_rule!r}")
        if self.kappa_value <= 0:
            raise ValueError("kappa_value must be positive")

    @property
    def effective_kappa(self) -> float:
        if self.kappa_rule == KAPPA_OVER_L:
            return self.kappa_value / self.model.L
        return self.kappa_value

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "model": json.loads(self.model.to_json()),
            "fermi_levels": list(self.fermi_levels),
            "n_samples": self.n_samples,
            "base_seed": self.base_seed,
            "kappa_rule": self.kappa_rule,
            "kappa_value": self.kappa_value,
            "effective_kappa": self.effective_kappa,
        }


@dataclass
class SweepTable:
    rows: list                 # (E_F, mean_index, sample_count, mean_integer_error, failure_count)
    plan: SweepPlan
    sample_seeds: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["ef", "mean_index", "sample_count",
                             "mean_integer_error", "failure_count"])
            for ef, mean, count, err, failures in self.rows:
                writer.writerow([repr(float(ef)), repr(float(mean)), count,
                                 repr(float(err)), failures])

    def manifest(self) -> dict:
        plan = self.plan.to_dict()
        return {
            "kind": "sweep",
            "plan": plan,
            "sample_seeds": self.sample_seeds,
            "config_hash": config_hash(plan),
            "hardware": {"machine": platform.machine(), "cpus": _cpu_count()},
        }


def _cpu_count():
    import os

    return os.cpu_count()


def _sample_seed(base_seed: int, i: int) -> int:
    """Stable per-sample seed recorded in provenance; the disorder stream
    itself is keyed by (model.seed, i) inside sample_disorder."""
    digest = hashlib.sha256(f"{base_seed}:{i}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _bott_sample(spec: ModelSpec, lattice, obs, i, fermi_levels):
    w = sample_disorder(spec, i)
    H = build_hamiltonian(spec, lattice, w)
    eig = diagonalize(H)
    DIAGONALIZATION_COUNTER["count"] += 1
    out = []
    for ef in fermi_levels:
        fermi = fermi_basis(eig, ef)
        try:
            res = bott_index_from_fermi(fermi, obs.U, obs.V)
            out.append((float(res.index), res.integer_error, None))
        except BranchProximityError as exc:
            out.append((None, None, exc))
    return out


def _localizer_sample(spec: ModelSpec, lattice, i, fermi_levels, kappa):
    w = sample_disorder(spec, i)
    H = build_hamiltonian(spec, lattice, w)
    X, Y = position_operators(lattice, "raw")
    out = []
    for ef in fermi_levels:
        probe = LocalizerProbe(lam=(0.0, 0.0, ef), kappa=kappa)
        try:
            rep = localizer_index(X, Y, H, probe, with_gap=False)
            if rep.singular_flag:
                out.append((None, None, "singular"))
            else:
                out.append((float(rep.index), 0.0, None))
        except (SignatureError, GapSolverError) as exc:
            out.append((None, None, exc))
    return out


def run_sweep(plan: SweepPlan, jobs: int = 1) -> SweepTable:
    """Disorder-averaged index sweep over Fermi levels.

    Failures (branch proximity for Bott, singular localizer) are excluded
    from the mean and counted per row; sample_count + failure_count equals
    n_samples for every row.
    """
    spec = replace(plan.model, seed=plan.base_seed)
    lattice = build_lattice(spec)
    if plan.method == METHOD_BOTT:
        if spec.boundary != "periodic":
            raise ValueError("the Bott sweep requires periodic boundary")
        obs = periodic_observables(lattice)
        work = lambda i: _bott_sample(spec, lattice, obs, i, plan.fermi_levels)
    else:
        if spec.boundary != "open":
            raise ValueError("the localizer sweep requires open boundary")
        kappa = plan.effective_kappa
        work = lambda i: _localizer_sample(spec, lattice, i, plan.fermi_levels, kappa)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, range(plan.n_samples)))
    else:
        results = [work(i) for i in range(plan.n_samples)]

    rows = []
    for col, ef in enumerate(plan.fermi_levels):
        total = 0.0
        err_total = 0.0
        count = 0
        failures = 0
        for i in range(plan.n_samples):
            value, err, failure = results[i][col]
            if failure is not None:
                failures += 1
            else:
                total += value
                err_total += err
                count += 1
        mean = total / count if count else 0.0
        mean_err = err_total / count if count else 0.0
        rows.append((ef, mean, count, mean_err, failures))

    seeds = [_sample_seed(plan.base_seed, i) for i in range(plan.n_samples)]
    return SweepTable(rows=rows, plan=plan, sample_seeds=seeds)


@dataclass
class TimingTable:
    rows: list   # (L, phase, mean_seconds, samples)
    method: str
    detail: dict = field(default_factory=dict)  # raw per-run timings

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["L", "phase", "mean_seconds", "samples"])
            for L, phase, mean, samples in self.rows:
                writer.writerow([L, phase, repr(float(mean)), samples])

    def manifest(self) -> dict:
        meta = {
            "kind": "timing",
            "method": self.method,
            "rows": [[L, p, m, s] for L, p, m, s in self.rows],
            "detail": self.detail,
            "hardware": {"machine": platform.machine(), "cpus": _cpu_count()},
        }
        meta["config_hash"] = config_hash({"method": self.method, "Ls": sorted({r[0] for r in self.rows})})
        return meta


def _time_bott_run(spec: ModelSpec, lattice, obs, i):
    w = sample_disorder(spec, i)
    H = build_hamiltonian(spec, lattice, w)
    t0 = time.perf_counter()
    eig = diagonalize(H)
    t_diag = time.perf_counter() - t0
    t0 = time.perf_counter()
    fermi = fermi_basis(eig, 0.0)
    bott_index_from_fermi(fermi, obs.U, obs.V)
    t_index = time.perf_counter() - t0
    return {"diagonalize": t_diag, "index": t_index}


def _time_localizer_run(spec: ModelSpec, lattice, X, Y, i):
    w = sample_disorder(spec, i)
    H = build_hamiltonian(spec, lattice, w)
    probe = LocalizerProbe(lam=(0.0, 0.0, 0.0), kappa=1.0)
    t0 = time.perf_counter()
    gap = localizer_gap(X, Y, H, probe)
    t_gap = time.perf_counter() - t0
    t0 = time.perf_counter()
    localizer_index(X, Y, H, probe, with_gap=False)
    t_index = time.perf_counter() - t0
    return {"gap": t_gap, "index": t_index}


def timing_study(method: str, L_list, samples_per_L: int = 3,
                 base_seed: int = 0, disorder_width: float = 8.0) -> TimingTable:
    """Wall-clock phase timings (monotonic timer); one warm-up run per
    (method, L) is executed and discarded."""
    if list(L_list) != sorted(L_list):
        raise ValueError("L_list must be ascending")
    rows = []
    detail = {}
    for L in L_list:
        boundary = "periodic" if method == METHOD_BOTT else "open"
        spec = ModelSpec(L=L, boundary=boundary, disorder_width=disorder_width,
                         seed=base_seed)
        lattice = build_lattice(spec)
        if method == METHOD_BOTT:
            obs = periodic_observables(lattice)
            runner = lambda i: _time_bott_run(spec, lattice, obs, i)
        else:
            X, Y = position_operators(lattice, "raw")
            runner = lambda i: _time_localizer_run(spec, lattice, X, Y, i)
        runner(0)  # warm-up, discarded
        runs = [runner(i + 1) for i in range(samples_per_L)]
        detail[str(L)] = runs
        for phase in runs[0]:
            mean = float(np.mean([r[phase] for r in runs]))
            rows.append((L, phase, mean, samples_per_L))
    return TimingTable(rows=rows, method=method, detail=detail)


def loglog_slope(Ls, times) -> float:
    """Least-squares slope of log(time) against log(L)."""
    coeffs = np.polyfit(np.log(np.asarray(Ls, dtype=float)),
                        np.log(np.asarray(times, dtype=float)), 1)
    return float(coeffs[0])


def integer_error_study(L_list, samples_per_L: int = 32, base_seed: int = 0,
                        disorder_width: float = 8.0, jobs: int = 1):
    """Mean distance-to-integer of raw Bott values at E_F = 0 per L.

    Returns (rows, all_errors) where rows are (L, mean_error,
    sample_count, failure_count) and all_errors maps L to the per-sample
    error list (branch failures excluded and counted).
    """
    rows = []
    all_errors = {}
    for L in L_list:
        spec = ModelSpec(L=L, boundary="periodic", disorder_width=disorder_width,
                         seed=base_seed)
        lattice = build_lattice(spec)
        obs = periodic_observables(lattice)

        def one(i):
            res = _bott_sample(spec, lattice, obs, i, (0.0,))[0]
            return res

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(one, range(samples_per_L)))
        else:
            results = [one(i) for i in range(samples_per_L)]
        errors = [err for value, err, failure in results if failure is None]
        failures = sum(1 for *_, failure in results if failure is not None)
        rows.append((L, float(np.mean(errors)) if errors else 0.0,
                     len(errors), failures))
        all_errors[L] = errors
    return rows, all_errors


def write_error_csv(rows, path) -> None:
    """Persist integer_error_study rows as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["L", "mean_error", "sample_count", "failure_count"])
        for L, mean_err, count, failures in rows:
            writer.writerow([L, repr(float(mean_err)), count, failures])


def kappa_study(model: ModelSpec, kappa_list, L_list, fermi_levels,
                n_samples: int, base_seed: int = 0, jobs: int = 1,
                pairs=None):
    """One localizer SweepTable per (kappa, L) plus a manifest linking them.

    By default every kappa is run at every L; explicit (kappa, L) pairs
    (the way published sweeps match one system size to each kappa) may be
    passed instead.
    """
    if pairs is None:
        pairs = [(kappa, L) for kappa in kappa_list for L in L_list]
    tables = {}
    for kappa, _ in pairs:
        if kappa <= 0:
            raise ValueError("all kappa values must be positive")
    for kappa, L in pairs:
        spec = replace(model, L=L, boundary="open")
        plan = SweepPlan(
            method=METHOD_LOCALIZER,
            model=spec,
            fermi_levels=tuple(fermi_levels),
            n_samples=n_samples,
            base_seed=base_seed,
            kappa_rule=KAPPA_FIXED,
            kappa_value=kappa,
        )
        tables[(kappa, L)] = run_sweep(plan, jobs=jobs)
    manifest = {
        "kind": "kappa-study",
        "pairs": [{"kappa": k, "L": L} for (k, L) in tables],
        "n_samples": n_samples,
        "base_seed": base_seed,
    }
    return tables, manifest


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
