"""Command-line front end.

Commands map one-to-one onto library operations and write a CSV result
table plus a JSON report to <outdir>/<command>-<seed>.{csv,json}. CSV
bodies are deterministic for a fixed configuration (timestamps live only
in the JSON report). Exit codes: 0 success, 1 usage or validation error,
2 numerical failure (diagnostic recorded in the JSON report).

A flat JSON config file can supply any flag (keys are flag names
without the leading dashes); explicit command-line flags win.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__, cloning, distill, qcore, qkd
from . import weakmeas as wm

OUTDIR_ENV = "QCLINK_OUTDIR"
_REQUIRED = object()


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser whose errors surface as exit code 1, not 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    seed: int
    outdir: str
    write_csv: bool
    write_json: bool


@dataclass(frozen=True)
class RunReport:
    version: str
    timestamp: str
    config: RunConfig
    columns: list
    rows: list
    summary: dict


def _positive_int(value, name, lo=1, hi=None):
    if int(value) != value or value < lo or (hi is not None and value > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ValueError(f"parameter --{name} must be an integer {bound}, "
                         f"got {value}")
    return int(value)


def _in_range(value, name, lo, hi):
    if not lo <= value <= hi:
        raise ValueError(f"parameter --{name} must lie in [{lo}, {hi}], "
                         f"got {value}")
    return float(value)


def _d_grid(params):
    d_min = _in_range(params["d-min"], "d-min", 0.0, 0.5)
    d_max = _in_range(params["d-max"], "d-max", 0.0, 0.5)
    steps = _positive_int(params["steps"], "steps", 1, 100_000)
    if d_max < d_min:
        raise ValueError("parameter --d-max must not be below --d-min")
    return np.linspace(d_min, d_max, steps)


def _post_element(params):
    return wm.PdlElement(params["pdl-db"], axis=params["pdl-axis"])


def cmd_qkd_sweep(params, seed):
    grid = _d_grid(params)
    n_max = params["n-max"]
    if n_max is not None:
        n_max = _positive_int(n_max, "n-max", 1, distill.MAX_BLOCK)
    basis = params["basis"]
    columns = ["D", "i_ab", "i_ae", "chsh", "entangled",
               "min_pt_eigenvalue", "singlet_fidelity"]
    if n_max is not None:
        columns.append("ad_min_block")
    rows = []
    for d in grid:
        dist = qkd.symbol_distribution(
            qkd.AttackParams(float(d), eve_measurement=params["eve"]), basis)
        rho = qkd.rho_ab(float(d))
        entangled, lo = qcore.is_entangled(rho)
        row = [float(d),
               qkd.mutual_information(dist, "ab"),
               qkd.mutual_information(dist, "ae"),
               qcore.chsh_max(rho),
               entangled,
               lo,
               qcore.singlet_fidelity(rho)]
        if n_max is not None:
            row.append(distill.ad_min_block(dist, n_max=n_max))
        rows.append(row)
    return columns, rows, {"points": len(rows)}


def cmd_qkd_thresholds(params, seed):
    tol = params["tol"]
    if tol < 1e-6:
        raise ValueError(f"parameter --tol must be >= 1e-6, got {tol}")
    summary = {}
    rows = []
    for kind in qkd.THRESHOLD_KINDS:
        value = qkd.threshold(kind, tol=tol, eve_measurement=params["eve"])
        summary[kind] = value
        rows.append([kind, value])
    return ["kind", "critical_disturbance"], rows, summary


def cmd_distill_classical(params, seed):
    d = _in_range(params["d"], "d", 0.0, 0.5)
    n = _positive_int(params["n"], "n", 1, distill.MAX_BLOCK)
    trials = _positive_int(params["trials"], "trials", 0, 10 ** 9)
    dist = qkd.symbol_distribution(
        qkd.AttackParams(d, eve_measurement=params["eve"]))
    columns = ["mode", "block_size", "p_accept", "eps_post", "i_ab", "i_ae",
               "advantage", "se_p_accept", "se_eps_post", "se_i_ae"]
    ex = distill.ad_exact(dist, n)
    rows = [["exact", ex.block_size, ex.p_accept, ex.eps_post, ex.i_ab,
             ex.i_ae, ex.advantage, None, None, None]]
    summary = {"advantage_exact": ex.advantage}
    if trials:
        mc = distill.ad_monte_carlo(dist, n, trials=trials, seed=seed)
        rows.append(["mc", mc.block_size, mc.p_accept, mc.eps_post, mc.i_ab,
                     mc.i_ae, mc.advantage, mc.se_p_accept, mc.se_eps_post,
                     mc.se_i_ae])
        summary["accepted"] = mc.accepted
    return columns, rows, summary


def cmd_distill_quantum(params, seed):
    f0 = _in_range(params["f0"], "f0", 0.0, 1.0)
    rounds = _positive_int(params["rounds"], "rounds", 1, 10 ** 4)
    trace = distill.recurrence_iterate(f0, rounds)
    rows = [[i + 1, f, p] for i, (f, p) in enumerate(trace.steps)]
    summary = {"f0": f0, "final_fidelity": trace.steps[-1][0]}
    return ["round", "fidelity", "success_probability"], rows, summary


def cmd_distill_equivalence(params, seed):
    grid = _d_grid(params)
    n_max = _positive_int(params["n-max"], "n-max", 1, distill.MAX_BLOCK)
    sweep = distill.equivalence_sweep(grid, n_max=n_max,
                                      eve_measurement=params["eve"])
    rows = [[r.d, r.entangled, r.chsh, r.i_ab, r.i_ae, r.ad_min_block]
            for r in sweep]
    present = [r.d for r in sweep if r.ad_min_block is not None]
    absent = [r.d for r in sweep if r.ad_min_block is None]
    summary = {"ad_present_max_d": max(present) if present else None,
               "ad_absent_min_d": min(absent) if absent else None}
    if present and absent and max(present) < min(absent):
        summary["ad_threshold_estimate"] = 0.5 * (max(present) + min(absent))
    return (["D", "entangled", "chsh", "i_ab", "i_ae", "ad_min_block"],
            rows, summary)


def cmd_clone_fidelity(params, seed):
    value = cloning.fidelity_opt(params["n"], params["m"])
    return (["n", "m", "fidelity"], [[params["n"], params["m"], value]],
            {"fidelity": value})


def cmd_clone_amplifier(params, seed):
    value = cloning.fidelity_classical(params["mu-in"], params["mu-out"],
                                       params["q"])
    return (["mu_in", "mu_out", "q", "fidelity"],
            [[params["mu-in"], params["mu-out"], params["q"], value]],
            {"fidelity": value})


def cmd_clone_mc(params, seed):
    n, m = params["n"], params["m"]
    trials = _positive_int(params["trials"], "trials", 10 ** 4, 10 ** 9)
    mean, se = cloning.birth_process_mc(n, m, trials=trials, seed=seed)
    exact = cloning.birth_process_exact(n, m)
    formula = cloning.fidelity_opt(n, m)
    rows = [[n, m, trials, mean, se, exact, formula]]
    return (["n", "m", "trials", "mc_fidelity", "std_error",
             "exact_fidelity", "formula_fidelity"], rows,
            {"mc_fidelity": mean, "std_error": se,
             "formula_fidelity": formula})


def cmd_clone_mixture(params, seed):
    mu_in = params["mu-in"]
    gain = params["gain"]
    value = cloning.poisson_mixture_fidelity(mu_in, gain)
    reference = cloning.fidelity_classical(mu_in, gain * mu_in, 1.0)
    rows = [[mu_in, gain, value, reference, value - reference]]
    return (["mu_in", "gain", "mixture_fidelity", "amplifier_q1_fidelity",
             "deviation"], rows,
            {"mixture_fidelity": value, "deviation": value - reference})


def cmd_clone_fit(params, seed):
    path = params["input"]
    if not os.path.exists(path):
        raise FileNotFoundError(f"input file not found: {path}")
    data = cloning.load_fidelity_csv(path)
    q_hat, rss = cloning.fit_q(data)
    rows = [[q_hat, rss, data.shape[0]]]
    return (["q_hat", "rss", "records"], rows, {"q_hat": q_hat, "rss": rss})


def cmd_weak_toa(params, seed):
    t_c = params["tc"]
    if t_c <= 0:
        raise ValueError(f"parameter --tc must be positive, got {t_c}")
    pulse = wm.PolarizedPulse(t_c, wm.jones_elliptical(params["theta-pre"],
                                                       params["phi-pre"]))
    pmd = wm.PmdElement(params["dtau"])
    post = _post_element(params)
    closed = wm.mean_toa_closed(pulse, pmd, post)
    numeric = wm.mean_toa_numeric(wm.propagate(pulse, [pmd, post]))
    weak = wm.weak_value(pulse, pmd, post)
    rows = [[params["dtau"], t_c, params["theta-pre"], params["phi-pre"],
             params["pdl-db"], params["pdl-axis"], closed, numeric, weak]]
    return (["dtau", "tc", "theta_pre", "phi_pre", "pdl_db", "pdl_axis",
             "toa_closed", "toa_numeric", "toa_weak"], rows,
            {"toa_closed": closed, "toa_numeric": numeric, "toa_weak": weak})


def cmd_weak_sweep(params, seed):
    t_c = params["tc"]
    lo, hi = params["ratio-min"], params["ratio-max"]
    points = _positive_int(params["points"], "points", 2, 10 ** 5)
    if not 0 < lo < hi:
        raise ValueError("parameters --ratio-min/--ratio-max must satisfy "
                         "0 < min < max")
    ratios = np.geomspace(lo, hi, points)
    post = _post_element(params)
    pre = wm.jones_elliptical(params["theta-pre"], params["phi-pre"])
    sweep = wm.toa_transition_sweep(pre, post, ratios * t_c, t_c)
    rows = [[r.delta_tau, r.t_c, params["theta-pre"], params["phi-pre"],
             params["pdl-db"], params["pdl-axis"], r.toa_exact, r.toa_weak,
             r.abs_error] for r in sweep]
    weak_part = [r for r in sweep if r.ratio <= 0.1]
    summary = {"strong_end_discrimination_error":
               sweep[-1].discrimination_error}
    if len(weak_part) >= 3:
        scaled = [r.abs_error / (r.delta_tau / 2) for r in weak_part]
        slope = np.polyfit(np.log([r.ratio for r in weak_part]),
                           np.log(scaled), 1)[0]
        summary["weak_end_scaled_error_slope"] = float(slope)
    return (["dtau", "tc", "theta_pre", "phi_pre", "pdl_db", "pdl_axis",
             "toa_exact", "toa_weak", "abs_error"], rows, summary)


def cmd_weak_profile(params, seed):
    t_c = params["tc"]
    pulse = wm.PolarizedPulse(t_c, wm.jones_elliptical(params["theta-pre"],
                                                       params["phi-pre"]))
    field = wm.propagate(pulse, [wm.PmdElement(params["dtau"]),
                                 _post_element(params)])
    t = wm.default_time_grid(field, step=params["step"], span=params["span"])
    profile = field.intensity(t)
    rows = [[float(ti), float(ix), float(iy), float(ix + iy)]
            for ti, (ix, iy) in zip(t, profile)]
    summary = {"energy": field.energy(),
               "peak_separation": wm.peak_separation(field, t)}
    try:
        summary["mean_toa"] = wm.mean_toa_from_samples(
            t, profile.sum(axis=1))
    except ValueError:
        summary["mean_toa"] = None
    return (["t", "intensity_x", "intensity_y", "intensity_total"], rows,
            summary)


EVE_CHOICES = list(qkd.EVE_MEASUREMENTS)

COMMANDS = {
    ("qkd", "sweep"): (cmd_qkd_sweep, {
        "d-min": (float, 0.0), "d-max": (float, 0.4), "steps": (int, 41),
        "eve": (EVE_CHOICES, qkd.HELSTROM_BINARY), "basis": (["z", "x"], "z"),
        "n-max": (int, None)}),
    ("qkd", "thresholds"): (cmd_qkd_thresholds, {
        "tol": (float, 1e-6), "eve": (EVE_CHOICES, qkd.HELSTROM_BINARY)}),
    ("distill", "classical"): (cmd_distill_classical, {
        "d": (float, _REQUIRED), "n": (int, 8),
        "eve": (EVE_CHOICES, qkd.HELSTROM_BINARY), "trials": (int, 0)}),
    ("distill", "quantum"): (cmd_distill_quantum, {
        "f0": (float, _REQUIRED), "rounds": (int, 10)}),
    ("distill", "equivalence"): (cmd_distill_equivalence, {
        "d-min": (float, 0.2), "d-max": (float, 0.36), "steps": (int, 33),
        "n-max": (int, 30), "eve": (EVE_CHOICES, qkd.HELSTROM_BINARY)}),
    ("clone", "fidelity"): (cmd_clone_fidelity, {
        "n": (int, _REQUIRED), "m": (int, _REQUIRED)}),
    ("clone", "amplifier"): (cmd_clone_amplifier, {
        "mu-in": (float, _REQUIRED), "mu-out": (float, _REQUIRED),
        "q": (float, _REQUIRED)}),
    ("clone", "mc"): (cmd_clone_mc, {
        "n": (int, _REQUIRED), "m": (int, _REQUIRED),
        "trials": (int, 100_000)}),
    ("clone", "mixture"): (cmd_clone_mixture, {
        "mu-in": (float, _REQUIRED), "gain": (float, 10.0)}),
    ("clone", "fit"): (cmd_clone_fit, {"input": (str, _REQUIRED)}),
    ("weak", "toa"): (cmd_weak_toa, {
        "dtau": (float, _REQUIRED), "tc": (float, 1.0),
        "theta-pre": (float, np.pi / 4), "phi-pre": (float, 0.0),
        "pdl-db": (float, 0.0), "pdl-axis": (float, 0.0)}),
    ("weak", "sweep"): (cmd_weak_sweep, {
        "ratio-min": (float, 1e-3), "ratio-max": (float, 10.0),
        "points": (int, 25), "tc": (float, 1.0),
        "theta-pre": (float, np.pi / 4), "phi-pre": (float, 0.0),
        "pdl-db": (float, 0.0), "pdl-axis": (float, 0.0)}),
    ("weak", "profile"): (cmd_weak_profile, {
        "dtau": (float, _REQUIRED), "tc": (float, 1.0),
        "theta-pre": (float, np.pi / 4), "phi-pre": (float, 0.0),
        "pdl-db": (float, 0.0), "pdl-axis": (float, 0.0),
        "step": (float, None), "span": (float, None)}),
}


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="flat JSON file supplying flag values")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default 0, always recorded)")
    common.add_argument("--outdir", default=None,
                        help=f"output directory (default ${OUTDIR_ENV} or .)")
    common.add_argument("--csv", action=argparse.BooleanOptionalAction,
                        default=None, help="write the CSV table (default on)")
    common.add_argument("--json", action=argparse.BooleanOptionalAction,
                        default=None, help="write the JSON report (default on)")

    parser = _Parser(prog="qclink", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True,
                                   parser_class=_Parser)
    by_group = {}
    for (group, sub), (_, spec) in COMMANDS.items():
        if group not in by_group:
            gp = groups.add_parser(group)
            by_group[group] = gp.add_subparsers(dest="subcommand",
                                                required=True,
                                                parser_class=_Parser)
        leaf = by_group[group].add_parser(sub, parents=[common])
        for name, (kind, default) in spec.items():
            flag = f"--{name}"
            if isinstance(kind, list):
                leaf.add_argument(flag, choices=kind, default=None)
            else:
                leaf.add_argument(flag, type=kind, default=None)
    return parser


def _merge_config(args, spec):
    """Resolve parameter values: explicit flags > config file > defaults."""
    file_values = {}
    if args.config is not None:
        if not os.path.exists(args.config):
            raise UsageError(f"config file not found: {args.config}")
        with open(args.config) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"config file {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError(f"config file {args.config} must hold one "
                             "JSON object")
        known = set(spec) | {"seed", "outdir", "csv", "json"}
        for key, value in raw.items():
            norm = key.lstrip("-").replace("_", "-")
            if norm not in known:
                raise UsageError(f"config file {args.config}: unknown "
                                 f"parameter {key!r}")
            file_values[norm] = value

    params = {}
    for name, (kind, default) in spec.items():
        cli_value = getattr(args, name.replace("-", "_"))
        if cli_value is not None:
            params[name] = cli_value
        elif name in file_values:
            value = file_values[name]
            params[name] = value if isinstance(kind, list) else kind(value)
        elif default is _REQUIRED:
            raise UsageError(f"missing required parameter --{name}")
        else:
            params[name] = default

    def setting(name, fallback):
        cli_value = getattr(args, name)
        if cli_value is not None:
            return cli_value
        return file_values.get(name, fallback)

    seed = int(setting("seed", 0))
    if not 0 <= seed < 2 ** 64:
        raise UsageError(f"seed must be a 64-bit unsigned integer, got {seed}")
    outdir = setting("outdir", None)
    if outdir is None:
        outdir = os.environ.get(OUTDIR_ENV, ".")
    return params, seed, str(outdir), bool(setting("csv", True)), \
        bool(setting("json", True))


def _fmt_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    return str(value)


def execute(config):
    """Run one command and write its report files. Returns the RunReport."""
    handler, _ = COMMANDS[tuple(config.command.split("-", 1))]
    os.makedirs(config.outdir, exist_ok=True)
    base = os.path.join(config.outdir, f"{config.command}-{config.seed}")
    csv_path, json_path = base + ".csv", base + ".json"
    try:
        columns, rows, summary = handler(config.params, config.seed)
    except (RuntimeError, ArithmeticError) as exc:
        # numerical failure: clear stale table, keep a diagnostic report
        if os.path.exists(csv_path):
            os.remove(csv_path)
        diag = {"tool": "qclink", "version": __version__,
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "command": config.command,
                "config": _jsonable(vars(config) | {"params": config.params}),
                "error": str(exc)}
        with open(json_path, "w") as fh:
            json.dump(diag, fh, indent=2)
        raise

    report = RunReport(
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        config=config, columns=columns, rows=rows, summary=summary)
    if config.write_json:
        payload = {"tool": "qclink", "version": report.version,
                   "timestamp": report.timestamp,
                   "command": config.command,
                   "config": {"params": _jsonable(config.params),
                              "seed": config.seed, "outdir": config.outdir,
                              "csv": config.write_csv,
                              "json": config.write_json},
                   "columns": columns,
                   "rows": _jsonable(rows),
                   "summary": _jsonable(summary)}
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2)
    if config.write_csv:
        lines = [",".join(columns)]
        lines += [",".join(_fmt_cell(v) for v in row) for row in rows]
        with open(csv_path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    return report


def parse(argv):
    """Parse flags (and an optional config file) into a RunConfig."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    spec = COMMANDS[args.group, args.subcommand][1]
    params, seed, outdir, write_csv, write_json = _merge_config(args, spec)
    return RunConfig(command=f"{args.group}-{args.subcommand}",
                     params=params, seed=seed, outdir=outdir,
                     write_csv=write_csv, write_json=write_json)


def main(argv=None):
    try:
        config = parse(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        report = execute(config)
    except (UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    for key, value in report.summary.items():
        print(f"{key} = {value}")
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
