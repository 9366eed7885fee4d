"""Command-line entry point: ``latgauss <subcommand> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import numpy as np

from . import __version__
from .attacks import (
    AttackParams,
    LweFamily,
    LweInstance,
    SisInstance,
    basis_summary,
    check_hypothesis,
    draw_family_instance,
    dual_kernel,
    run_attack,
    sis_config,
    sis_success_probability,
    solve_sis,
)
from .cost import (
    CostInputs,
    combine_classical_sis_cost,
    combine_dual_costs,
    combine_sis_cost,
    measured_delta_and_w,
    table_rows,
)
from .errors import ComputationError, ConfigError, LatGaussError, MissingInput, ParamConstraint
from .gaussian import GaussianParams, truncation_tv
from .lattice import gram_schmidt_qr
from .qsim import QueryLedger, quantum_gaussian_pipeline, sample_pipeline_calls
from .samplers import (
    KleinConfig,
    klein_sample_batch,
    mcmc_sample,
    rejection_sample_batch,
    w_bound,
)
from .verify import CHECKS, format_matrix, run_all

SCHEMA_VERSION = 1
EXIT_CONFIG = 2
EXIT_COMPUTE = 3


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial; independent of how trials are scheduled."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


# --------------------------------------------------------------------------
# instance files


def load_instance(path: str | None, default: str | None = None) -> dict:
    if path is None:
        if default is None:
            raise MissingInput("instance")
        with resources.files("latgauss").joinpath(f"data/{default}").open() as fh:
            data = json.load(fh)
    else:
        if not os.path.isfile(path):
            raise ConfigError(f"instance file not found: {path}")
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"instance file is not valid JSON: {e}") from e
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {data.get('schema_version')!r}")
    return data


def _need(data: dict, *keys: str):
    for k in keys:
        if k not in data:
            raise MissingInput(k)
    return [data[k] for k in keys]


def lattice_config(data: dict, box_exp: int | None) -> KleinConfig:
    if data.get("kind") != "lattice":
        raise ConfigError("expected an instance of kind 'lattice'")
    rows, sigma = _need(data, "basis_rows", "sigma")
    M = box_exp if box_exp is not None else data.get("box_exp", 4)
    return KleinConfig(gram_schmidt_qr(rows), GaussianParams(float(sigma), data.get("center", 0.0), int(M)))


def sis_from(data: dict) -> SisInstance:
    if data.get("kind") != "sis":
        raise ConfigError("expected an instance of kind 'sis'")
    A, q, p, ell = _need(data, "a_matrix", "modulus", "norm_p", "length_bound")
    p = math.inf if p in ("inf", None) else float(p)
    return SisInstance(np.array(A, dtype=np.int64), int(q), p, float(ell))


def family_from(data: dict) -> LweFamily:
    if data.get("kind") != "lwe-family":
        raise ConfigError("expected an instance of kind 'lwe-family'")
    keys = ("m", "n", "n_guess", "modulus", "noise_sigma", "attack_sigma", "n_samples")
    return LweFamily(**{k: data[k] for k in keys if k in data})


# --------------------------------------------------------------------------
# subcommands; each returns (payload, rows) where rows feed CSV output


def _sample_trial(args_tuple):
    data, method, count, seed, trial, nu, box_exp = args_tuple
    cfg = lattice_config(data, box_exp)
    rng = trial_rng(seed, trial)
    if method == "klein":
        d = klein_sample_batch(cfg, rng, count)
        vecs, extra = d.vectors, {"trials": count}
    elif method == "rejection":
        d, stats, _ = rejection_sample_batch(cfg, rng, count)
        vecs, extra = d.vectors, {"trials": stats.trials, "w": stats.w_used}
    elif method == "mcmc":
        out = [mcmc_sample(cfg, None, rng) for _ in range(count)]
        vecs = np.array([v for v, _ in out])
        extra = {"steps": int(sum(info["steps"] for _, info in out))}
    elif method == "quantum":
        res = quantum_gaussian_pipeline(cfg, nu)
        idx = rng.choice(len(res.probs), size=count, p=res.probs / res.probs.sum())
        vecs = res.coords[idx] @ cfg.basis.matrix.T
        calls = sample_pipeline_calls(res, rng, count)
        extra = {"prep_calls": int(calls.sum()), "w": res.w, "tv_bound": res.bound(nu)}
    else:
        raise ParamConstraint(f"unknown sampling method {method!r}")
    rows = [{"trial": trial, "index": i, "vector": [float(v) for v in vec]} for i, vec in enumerate(vecs)]
    return {"trial": trial, **extra}, rows


def _map_trials(fn, jobs, parallel: int):
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_sample(args) -> tuple[dict, list[dict]]:
    data = load_instance(args.instance, "reference_lattice.json")
    jobs = [(data, args.method, args.count, args.seed, t, args.nu, args.box_exp) for t in range(args.trials)]
    results = _map_trials(_sample_trial, jobs, args.parallel)
    rows = [r for _, rs in results for r in rs]
    return {"instance": data, "method": args.method, "trials": [s for s, _ in results], "samples": rows}, rows


def cmd_mass(args) -> tuple[dict, list[dict]]:
    data = load_instance(args.instance, "reference_lattice.json")
    cfg = lattice_config(data, args.box_exp)
    wb = w_bound(cfg)
    out = {
        "instance": data,
        "basis": basis_summary(cfg.basis),
        "omega_size": cfg.omega_size,
        "w": wb.value,
        "w_max_ratio": wb.max_ratio,
    }
    try:
        dw = measured_delta_and_w(cfg)
        out.update(delta=dw.delta, w_times_delta=dw.product)
    except ComputationError as e:
        out["delta_error"] = str(e)
    tv = truncation_tv(cfg.basis, cfg.params)
    out.update(log_rho_lattice=tv.log_rho_lattice, rho_outside_omega=tv.rho_outside, tv_truncation=tv.tv_direct)
    return out, [{k: v for k, v in out.items() if not isinstance(v, dict)}]


def _attack_trial(job):
    data, attack, seed, trial = job
    family = family_from(data)
    params = family.params()
    rng = trial_rng(seed, trial)
    inst, draws = draw_family_instance(family, params, attack, rng)
    rep = check_hypothesis(inst, params, attack)
    r = run_attack(attack, inst, params, rng)
    basis = basis_summary(dual_kernel(inst).basis)
    return {"trial": trial, "instance_draws": draws, "hypothesis": str(rep), "instance": inst.to_json(), "basis": basis, **r}


def cmd_attack(args) -> tuple[dict, list[dict]]:
    data = load_instance(args.instance, "toy_lwe_family.json")
    if data.get("kind") == "lwe":
        inst = LweInstance.from_json(data)
        sigma = float(_need(data, "attack_sigma")[0])
        params = AttackParams(sigma=sigma, m=inst.m, n_samples=int(data.get("n_samples", 400)))
        rows = []
        basis = basis_summary(dual_kernel(inst).basis)
        for t in range(args.trials):
            rows.append({"trial": t, "basis": basis, **run_attack(args.attack, inst, params, trial_rng(args.seed, t))})
    else:
        jobs = [(data, args.attack, args.seed, t) for t in range(args.trials)]
        rows = _map_trials(_attack_trial, jobs, args.parallel)
    wins = sum(r["success"] for r in rows)
    flat = [{k: v for k, v in r.items() if k in ("trial", "attack", "success", "error_norm")} for r in rows]
    return {"instance": data, "attack": args.attack, "successes": wins, "trials": rows}, flat


def cmd_solve_sis(args) -> tuple[dict, list[dict]]:
    data = load_instance(args.instance, "toy_sis.json")
    inst = sis_from(data)
    box = args.box_exp if args.box_exp is not None else int(data.get("box_exp", 3))
    cfg = sis_config(inst, float(_need(data, "sigma")[0]), box)
    p = sis_success_probability(inst, cfg)
    rows = []
    for t in range(args.trials):
        res = solve_sis(inst, cfg, args.mode, trial_rng(args.seed, t), QueryLedger())
        rows.append(
            {
                "trial": t,
                "x": [int(v) for v in res.x],
                "valid": inst.is_solution(res.x),
                "repetitions": res.repetitions,
                "forward_calls": res.forward_calls,
            }
        )
    mean_calls = float(np.mean([r["forward_calls"] for r in rows])) if rows else math.nan
    ref = 1 / p if args.mode == "classical" else (math.pi / 4) / math.sqrt(p)
    return {"instance": data, "basis": basis_summary(cfg.basis), "mode": args.mode, "p": p, "mean_calls": mean_calls, "reference_calls": ref, "trials": rows}, rows


def cmd_estimate(args) -> tuple[dict, list[dict]]:
    out: dict = {"tables": table_rows()}
    if args.instance:
        if not os.path.isfile(args.instance):
            raise ConfigError(f"cost input file not found: {args.instance}")
        with open(args.instance) as fh:
            raw = json.load(fh)
        raw.pop("schema_version", None)
        inp = CostInputs.from_dict(raw)
        reports = {}
        for name, fn in (("dual", combine_dual_costs), ("sis", combine_sis_cost), ("classical_sis", combine_classical_sis_cost)):
            try:
                reports[name] = fn(inp).to_dict()
            except MissingInput as e:
                reports[name] = {"skipped": f"missing {e.field}"}
        out["inputs"] = raw
        out["reports"] = reports
    return out, out["tables"]


def cmd_verify(args) -> tuple[dict, list[dict]]:
    results = run_all(args.seed, args.only or None)
    print(format_matrix(results), file=sys.stderr)
    rows = [r.to_dict() for r in results]
    return {"checks": rows, "all_passed": all(r.passed for r in results)}, rows


COMMANDS = {
    "sample": cmd_sample,
    "mass": cmd_mass,
    "attack-lwe": cmd_attack,
    "solve-sis": cmd_solve_sis,
    "estimate": cmd_estimate,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# argument parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--nu", type=int, default=20, help="amplitude precision bits")
    common.add_argument("--box-exp", type=int, default=None, help="Klein box exponent M")
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--parallel", type=int, default=1, help="worker processes")

    p = argparse.ArgumentParser(prog="latgauss", description="Discrete Gaussian sampling and lattice attack simulations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="draw lattice Gaussian samples")
    s.add_argument("instance", nargs="?")
    s.add_argument("--method", choices=("klein", "rejection", "mcmc", "quantum"), default="rejection")
    s.add_argument("--count", type=int, default=10)

    s = sub.add_parser("mass", parents=[common], help="Gaussian masses, w and truncation distance")
    s.add_argument("instance", nargs="?")

    s = sub.add_parser("attack-lwe", parents=[common], help="run a dual attack on LWE instances")
    s.add_argument("instance", nargs="?")
    s.add_argument("--attack", choices=("classical", "qram", "sampler"), default="classical")

    s = sub.add_parser("solve-sis", parents=[common], help="find a short kernel vector")
    s.add_argument("instance", nargs="?")
    s.add_argument("--mode", choices=("classical", "quantum-sim"), default="classical")

    s = sub.add_parser("estimate", parents=[common], help="combine attack costs (log2)")
    s.add_argument("instance", nargs="?", help="cost inputs JSON")

    s = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    s.add_argument("--only", action="append", choices=sorted(CHECKS), help="restrict to a check (repeatable)")
    return p


def _config_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _render(payload: dict, rows: list[dict], fmt: str, config: dict) -> str:
    if fmt == "json":
        return json.dumps({"schema_version": SCHEMA_VERSION, "config": config, "result": payload}, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(config, sort_keys=True, default=_json_default)}\n")
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, (list, tuple)):
        return " ".join(_csv_cell(x) if isinstance(x, float) else str(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True, default=_json_default)
    return v


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    # write to a temporary file first so a failure leaves no partial output
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".latgauss-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fail(code: int, err: BaseException) -> int:
    body = {"error": type(err).__name__, "message": str(err), "exit_code": code}
    sys.stderr.write(json.dumps(body) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    if args.trials < 0 or args.parallel < 1:
        return _fail(EXIT_CONFIG, ParamConstraint("--trials must be >= 0 and --parallel >= 1"))
    if args.out is not None and not os.path.isdir(os.path.dirname(os.path.abspath(args.out))):
        return _fail(EXIT_CONFIG, ConfigError(f"output directory does not exist: {args.out}"))
    try:
        payload, rows = COMMANDS[args.command](args)
        text = _render(payload, rows, args.format, _config_of(args))
        _write(text, args.out)
    except ConfigError as e:
        return _fail(EXIT_CONFIG, e)
    except (ComputationError, LatGaussError, FloatingPointError, OverflowError) as e:
        return _fail(EXIT_COMPUTE, e)
    if args.command == "verify" and not payload["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
