"""Command-line front end: simulation runs, limit-law queries, verification
suites and plot-ready data tables.

Flag values take precedence over an optional key=value config file
(``--config PATH``), which takes precedence over built-in defaults.  The seed
default additionally honors the ``CWSOC_SEED`` environment variable.  Floats
are serialized with their shortest round-trip representation, and chains are
merged in chain-id order, so outputs are byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .limit_law import QuarticLaw
from .model import DomainError, ModelParams
from .samplers import SamplerConfig, chain_rng, init_chain, run
from .verification import ks_statistic, run_suites

SAMPLES_HEADER = "chain,sweep,s,t,s_scaled,t_scaled"
CONVERGENCE_HEADER = "n,ks,mean_t_scaled,sd_t_scaled,samples"
HISTOGRAM_HEADER = "bin_left,bin_right,density_empirical,density_limit"


class UsageError(ValueError):
    """Bad flag combination or malformed config input; exits with code 2."""


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run's outputs byte for byte."""

    command: str
    params: dict
    sampler: dict
    timestamp: str
    code_version: str
    output_paths: list[str]

    def to_json_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "sampler": self.sampler,
            "timestamp": self.timestamp,
            "code_version": self.code_version,
            "output_paths": self.output_paths,
        }


def _fmt(x: float) -> str:
    return repr(float(x))


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args: argparse.Namespace, config: dict, name: str, default, cast):
    given = getattr(args, name)
    if given is not None:
        return given
    if name in config:
        try:
            return cast(config[name])
        except ValueError as exc:
            raise UsageError(f"config value {name}={config[name]!r} is not a valid {cast.__name__}") from exc
    return default


def _resolve_seed(args: argparse.Namespace, config: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in config:
        try:
            return int(config["seed"])
        except ValueError as exc:
            raise UsageError(f"config seed {config['seed']!r} is not an integer") from exc
    env = os.environ.get("CWSOC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"CWSOC_SEED={env!r} is not an integer") from exc
    return 0


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _write_manifest(out_dir: Path, command: str, params: dict, sampler: dict, outputs: list[str]) -> None:
    manifest = RunManifest(
        command=command,
        params=params,
        sampler=sampler,
        timestamp=datetime.now(timezone.utc).isoformat(),
        code_version=__version__,
        output_paths=outputs,
    )
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True) + "\n")


def _simulate_worker(job: tuple[ModelParams, SamplerConfig, int, int]):
    params, cfg, chain_id, sweeps = job
    chain = init_chain(params, cfg, chain_id)
    records = run(chain, sweeps)
    return chain_id, records


def _run_chains(params: ModelParams, cfg: SamplerConfig, chains: int, sweeps: int):
    jobs = [(params, cfg, cid, sweeps) for cid in range(chains)]
    if chains == 1:
        return [_simulate_worker(jobs[0])]
    with ProcessPoolExecutor(max_workers=min(chains, os.cpu_count() or 1)) as pool:
        return list(pool.map(_simulate_worker, jobs))


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    n = _resolve(args, config, "n", 64, int)
    sigma = _resolve(args, config, "sigma", 1.0, float)
    sweeps = _resolve(args, config, "sweeps", 1000, int)
    burn_in = _resolve(args, config, "burn_in", 0, int)
    thin = _resolve(args, config, "thin", 1, int)
    chains = _resolve(args, config, "chains", 1, int)
    proposal_scale = _resolve(args, config, "proposal_scale", 2.38, float)
    seed = _resolve_seed(args, config)
    if sweeps < 0:
        raise UsageError(f"--sweeps must be nonnegative, got {sweeps}")
    if chains < 1:
        raise UsageError(f"--chains must be positive, got {chains}")

    params = ModelParams(n=n, sigma=sigma)
    cfg = SamplerConfig(proposal_scale=proposal_scale, burn_in_sweeps=burn_in, thin_sweeps=thin, seed=seed)
    results = _run_chains(params, cfg, chains, sweeps)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples_path = out_dir / "samples.csv"
    with open(samples_path, "w", newline="") as fh:
        fh.write(SAMPLES_HEADER + "\n")
        for chain_id, records in results:
            for rec in records:
                fh.write(
                    f"{chain_id},{rec.sweep},{_fmt(rec.s)},{_fmt(rec.t)},"
                    f"{_fmt(rec.s_scaled)},{_fmt(rec.t_scaled)}\n"
                )
    command = (
        f"simulate --n {n} --sigma {_fmt(sigma)} --sweeps {sweeps} --burn-in {burn_in} "
        f"--thin {thin} --chains {chains} --seed {seed} --proposal-scale {_fmt(proposal_scale)}"
    )
    _write_manifest(
        out_dir,
        command,
        params={"n": n, "sigma": sigma},
        sampler={
            "proposal_scale": proposal_scale,
            "burn_in_sweeps": burn_in,
            "thin_sweeps": thin,
            "seed": seed,
            "chains": chains,
            "sweeps": sweeps,
        },
        outputs=[samples_path.name],
    )
    return 0


def cmd_limit(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    sigma = _resolve(args, config, "sigma", 1.0, float)
    law = QuarticLaw(sigma)
    lines: list[str]
    if args.density is not None:
        lines = [format(law.density(args.density), ".17g")]
    elif args.cdf is not None:
        lines = [format(law.cdf(args.cdf), ".17g")]
    elif args.quantile is not None:
        lines = [format(law.quantile(args.quantile), ".17g")]
    else:
        count = args.sample
        if count < 0:
            raise UsageError(f"--sample must be nonnegative, got {count}")
        seed = _resolve_seed(args, config)
        draws = law.sample(chain_rng(seed, 0), size=count)
        lines = [format(v, ".17g") for v in draws]
    sys.stdout.write("\n".join(lines) + ("\n" if lines else ""))
    return 0


def _parse_tol_overrides(pairs: list[str] | None) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {pair!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"--tol value in {pair!r} is not a float") from exc
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    overrides = _parse_tol_overrides(args.tol)
    try:
        reports = run_suites([args.suite], n_list=args.n_list, tol_overrides=overrides)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    report_path.write_text(
        json.dumps([r.to_json_dict() for r in reports], indent=2) + "\n"
    )
    all_pass = True
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        all_pass &= r.passed
        print(f"{status} {r.name}: value={r.value:.6g} expected={r.expected:.6g} tol={r.tolerance:.3g}")
    print(f"report written to {report_path} ({sum(r.passed for r in reports)}/{len(reports)} checks pass)")
    return 0 if all_pass else 1


def cmd_convergence(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    sigma = _resolve(args, config, "sigma", 1.0, float)
    sweeps = _resolve(args, config, "sweeps", 5000, int)
    burn_in = _resolve(args, config, "burn_in", 500, int)
    thin = _resolve(args, config, "thin", 1, int)
    proposal_scale = _resolve(args, config, "proposal_scale", 2.38, float)
    seed = _resolve_seed(args, config)
    law = QuarticLaw(sigma)
    cfg = SamplerConfig(proposal_scale=proposal_scale, burn_in_sweeps=burn_in, thin_sweeps=thin, seed=seed)

    rows = []
    for idx, n in enumerate(args.n_list):
        chain = init_chain(ModelParams(n=n, sigma=sigma), cfg, chain_id=idx)
        records = run(chain, sweeps)
        s_scaled = np.sort(np.array([rec.s_scaled for rec in records]))
        t_scaled = np.array([rec.t_scaled for rec in records])
        ks = ks_statistic(s_scaled, law.cdf) if records else math.nan
        mean_t = float(t_scaled.mean()) if records else math.nan
        sd_t = float(t_scaled.std(ddof=1)) if len(records) > 1 else math.nan
        rows.append((n, ks, mean_t, sd_t, len(records)))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "convergence.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(CONVERGENCE_HEADER + "\n")
        for n, ks, mean_t, sd_t, count in rows:
            fh.write(f"{n},{_fmt(ks)},{_fmt(mean_t)},{_fmt(sd_t)},{count}\n")
    command = (
        f"convergence --n-list {','.join(str(n) for n in args.n_list)} --sigma {_fmt(sigma)} "
        f"--sweeps {sweeps} --burn-in {burn_in} --thin {thin} --seed {seed} "
        f"--proposal-scale {_fmt(proposal_scale)}"
    )
    _write_manifest(
        out_dir,
        command,
        params={"n_list": args.n_list, "sigma": sigma},
        sampler={
            "proposal_scale": proposal_scale,
            "burn_in_sweeps": burn_in,
            "thin_sweeps": thin,
            "seed": seed,
            "sweeps": sweeps,
        },
        outputs=[csv_path.name],
    )
    return 0


def _read_samples_column(path: Path, column: str) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        names = header.split(",")
        if column not in names:
            raise UsageError(f"{path}: column {column!r} not found in header {header!r}")
        idx = names.index(column)
        values = []
        for line in fh:
            line = line.strip()
            if line:
                values.append(float(line.split(",")[idx]))
    return np.asarray(values)


def cmd_plotdata(args: argparse.Namespace) -> int:
    values = _read_samples_column(Path(args.input), "s_scaled")
    if values.size == 0:
        raise UsageError(f"{args.input}: no data rows to histogram")
    bins = args.bins
    if bins < 1:
        raise UsageError(f"--bins must be positive, got {bins}")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    widths = np.diff(edges)
    density_emp = counts / (values.size * widths)
    law = QuarticLaw(args.sigma) if args.overlay_limit else None

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "histogram.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(HISTOGRAM_HEADER + "\n")
        for left, right, emp in zip(edges[:-1], edges[1:], density_emp):
            limit = _fmt(law.density(0.5 * (left + right))) if law is not None else ""
            fh.write(f"{_fmt(left)},{_fmt(right)},{_fmt(emp)},{limit}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cwsoc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cwsoc {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run Metropolis chains and write samples.csv")
    sim.add_argument("--n", type=int, default=None, help="number of spins")
    sim.add_argument("--sigma", type=float, default=None, help="base-measure standard deviation")
    sim.add_argument("--sweeps", type=int, default=None, help="sweeps per chain (one sweep = n steps)")
    sim.add_argument("--burn-in", dest="burn_in", type=int, default=None, help="sweeps discarded before recording")
    sim.add_argument("--thin", type=int, default=None, help="record every THIN-th sweep")
    sim.add_argument("--chains", type=int, default=None, help="parallel chains with disjoint streams")
    sim.add_argument("--seed", type=int, default=None, help="base seed (default: CWSOC_SEED or 0)")
    sim.add_argument("--proposal-scale", dest="proposal_scale", type=float, default=None)
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--config", default=None, help="key=value config file")
    sim.set_defaults(func=cmd_simulate)

    lim = sub.add_parser("limit", help="query the quartic limit law")
    what = lim.add_mutually_exclusive_group(required=True)
    what.add_argument("--density", type=float, default=None, metavar="X")
    what.add_argument("--cdf", type=float, default=None, metavar="X")
    what.add_argument("--quantile", type=float, default=None, metavar="P")
    what.add_argument("--sample", type=int, default=None, metavar="N")
    lim.add_argument("--sigma", type=float, default=None)
    lim.add_argument("--seed", type=int, default=None)
    lim.add_argument("--config", default=None)
    lim.set_defaults(func=cmd_limit)

    ver = sub.add_parser("verify", help="run verification suites and write report.json")
    ver.add_argument("--suite", choices=("complex", "density", "laplace", "all"), default="all")
    ver.add_argument("--n-list", dest="n_list", type=_int_list, default=None)
    ver.add_argument("--tol", action="append", default=None, metavar="NAME=VALUE",
                     help="tolerance override (complex_quad_tol, inversion_tol, density_mass_tol, "
                          "norm_cross_tol, ratio_tol_100, ratio_tol_400); may be repeated")
    ver.add_argument("--out", default=".", help="directory for report.json")
    ver.set_defaults(func=cmd_verify)

    conv = sub.add_parser("convergence", help="KS distance to the limit law across n")
    conv.add_argument("--n-list", dest="n_list", type=_int_list, required=True)
    conv.add_argument("--sigma", type=float, default=None)
    conv.add_argument("--sweeps", type=int, default=None)
    conv.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    conv.add_argument("--thin", type=int, default=None)
    conv.add_argument("--seed", type=int, default=None)
    conv.add_argument("--proposal-scale", dest="proposal_scale", type=float, default=None)
    conv.add_argument("--out", required=True)
    conv.add_argument("--config", default=None)
    conv.set_defaults(func=cmd_convergence)

    plot = sub.add_parser("plotdata", help="histogram table from a samples.csv")
    plot.add_argument("--input", required=True, help="samples.csv path")
    plot.add_argument("--bins", type=int, default=50)
    plot.add_argument("--overlay-limit", dest="overlay_limit", action="store_true",
                      help="fill the density_limit column from the limit law")
    plot.add_argument("--sigma", type=float, default=1.0)
    plot.add_argument("--out", default=".")
    plot.set_defaults(func=cmd_plotdata)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        # bad flag values and out-of-domain inputs are usage errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary maps failures to exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
