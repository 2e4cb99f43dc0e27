"""Command-line front end.

    monoq scan --family gghz --a0 0.7 --channel pd --measure negativity --p 0:1:0.01
    monoq stats fractions --family gw --channel dp --measure negativity --p 0.5 --n 10000
    monoq stats profiles|terminal ...
    monoq discriminate --hidden ad:0.5
    monoq check-oracles

Exit status: 0 success, 2 usage error, 3 numerical-contract violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic, experiments
from .channels import (
    CHANNELS,
    LOCAL_CHANNELS,
    NoiseSpec,
    apply_local,
    completeness_error,
    evolved_gghz_closed_form,
    evolved_gw_closed_form,
)
from .correlations import MEASURES, DiscordOptions
from .qcore import ContractViolation
from .states import GGHZParams, GWParams, make_gghz, make_gw, sample_params

SEED_ENV = "MONOQ_SEED"
DEFAULT_SEED = 7
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    return f"{float(x) + 0.0:.12g}"


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            vals = np.array([float(parts[0])])
        elif len(parts) == 3:
            start, stop, step = map(float, parts)
            if step <= 0 or stop < start:
                raise UsageError(f"bad p grid {text!r}")
            vals = experiments.p_grid(step, start, stop) if stop > start else np.array([start])
        else:
            raise UsageError(f"bad p grid {text!r}; expected start:stop:step")
    except ValueError as exc:
        raise UsageError(f"bad p grid {text!r}") from exc
    if vals.min() < 0 or vals.max() > 1:
        raise UsageError("noise values must lie in [0, 1]")
    return vals


def parse_complex_list(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace("i", "j")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad amplitude list {text!r}") from exc


def load_kraus_file(path: str) -> list[np.ndarray]:
    """2x2 operators as blocks of rows of ``re,im`` pairs, separated by blank lines."""
    blocks, rows = [], []
    for line in Path(path).read_text().splitlines() + [""]:
        line = line.strip()
        if not line or line.startswith("#"):
            if rows:
                blocks.append(rows)
                rows = []
            continue
        nums = [float(x) for x in line.replace(",", " ").split()]
        if len(nums) != 4:
            raise UsageError(f"Kraus row needs two re,im pairs: {line!r}")
        rows.append([complex(nums[0], nums[1]), complex(nums[2], nums[3])])
    ops = []
    for b in blocks:
        if len(b) != 2:
            raise UsageError("each Kraus block must have exactly two rows")
        ops.append(np.array(b, dtype=complex))
    if not ops:
        raise UsageError("no Kraus operators found")
    err = completeness_error(ops)
    if err > 1e-10:
        raise ContractViolation(f"Kraus set violates completeness by {err:.3e}")
    return ops


def read_config(path: str) -> dict[str, str]:
    cfg = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line is not key=value: {line!r}")
        cfg[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return cfg


# -- state selection ---------------------------------------------------------------

def resolve_params(args):
    family = args.family
    if family in ("gghz", "ghz"):
        if args.amps:
            a = parse_complex_list(args.amps)
            return "gghz", GGHZParams(*a)
        a0 = 1 / np.sqrt(2) if args.a0 is None else float(args.a0)
        if not 0 <= a0 <= 1:
            raise UsageError("--a0 must lie in [0, 1]")
        return "gghz", GGHZParams.from_abs(a0)
    if family in ("gw", "gw3", "gw4"):
        n = 4 if family == "gw4" else 3
        if args.amps:
            a = parse_complex_list(args.amps)
            if len(a) == n - 1:
                return family, GWParams.completing(*a)
            return family, GWParams(tuple(a))
        return family, GWParams(tuple([1 / np.sqrt(n)] * n))
    raise UsageError(f"scan supports gghz, gw, gw3, gw4; got {family!r}")


def params_text(params) -> str:
    if isinstance(params, GGHZParams):
        amps = (params.a0, params.a1)
    else:
        amps = params.amplitudes
    out = []
    for i, a in enumerate(amps):
        a = complex(a)
        out.append(f"a{i}={fmt(a.real)}" if a.imag == 0 else f"a{i}={fmt(a.real)}{a.imag:+.12g}j")
    return ";".join(out)


def discord_opts(args) -> DiscordOptions | None:
    mode = getattr(args, "discord_mode", None)
    return None if mode is None else DiscordOptions(mode=mode)


def config_line(args) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    return "# config: " + json.dumps(cfg, sort_keys=True, default=str)


# -- subcommands -------------------------------------------------------------------

def cmd_scan(args, out):
    family, params = resolve_params(args)
    grid = parse_grid(args.p)
    ket = make_gghz(params) if family == "gghz" else make_gw(params)
    opts = discord_opts(args) or DiscordOptions()
    if args.engine != "numeric" and args.measure == "negativity" and ket.n == 3:
        values = [analytic.delta_n(params, args.channel, p, engine=args.engine) for p in grid]
    else:
        values = experiments.scores_on_grid(ket.amplitudes[None], args.channel, args.measure, grid, opts)[0]
    w = csv.writer(out, lineterminator="\n")
    out.write(config_line(args) + "\n")
    w.writerow(["p", "delta_value", "measure", "channel", "family", "params"])
    ptxt = params_text(params)
    for p, v in zip(grid, values):
        w.writerow([fmt(p), fmt(v), args.measure, args.channel, family, ptxt])


def cmd_stats(args, out):
    if args.n < experiments.MIN_ENSEMBLE:
        raise UsageError(f"--n must be at least {experiments.MIN_ENSEMBLE}")
    opts = discord_opts(args)
    w = csv.writer(out, lineterminator="\n")
    out.write(config_line(args) + "\n")
    if args.kind == "fractions":
        out.write("# percentages of sampled states; zero means |delta| <= 1e-4 (bits for discord)\n")
        grid = parse_grid(args.p)
        rows = experiments.fraction_scan(args.family, args.channel, args.measure, grid, args.n, args.seed, opts)
        w.writerow(["p", "pct_pos", "pct_zero", "pct_neg", "measure", "channel", "family", "n", "seed"])
        for r in rows:
            w.writerow([fmt(r.p), fmt(r.pct_pos), fmt(r.pct_zero), fmt(r.pct_neg),
                        args.measure, args.channel, args.family, args.n, args.seed])
    elif args.kind == "profiles":
        out.write("# percentage of sampled states per dynamics type\n")
        census = experiments.profile_census(args.family, args.channel, args.measure, args.n, args.seed, opts)
        w.writerow(["type", "percent", "measure", "channel", "family", "n", "seed"])
        for label, pct in census.items():
            w.writerow([label, fmt(pct), args.measure, args.channel, args.family, args.n, args.seed])
    else:
        out.write("# mean_p_t row: value is the mean dynamics terminal (dimensionless); "
                  "density rows: normalized PDF of p_t per bin\n")
        st = experiments.terminal_average(args.family, args.channel, args.measure, args.n, args.seed, opts)
        w.writerow(["quantity", "bin_lo", "bin_hi", "value"])
        w.writerow(["mean_p_t", fmt(0), fmt(1), fmt(st.mean)])
        for lo, hi, d in zip(st.bin_edges[:-1], st.bin_edges[1:], st.density):
            w.writerow(["density", fmt(lo), fmt(hi), fmt(d)])


def _parse_hidden(text: str) -> NoiseSpec:
    kind, sep, p = text.partition(":")
    if not sep or kind not in CHANNELS:
        raise UsageError(f"--hidden expects <channel>:<p> with channel in {CHANNELS}")
    try:
        p = float(p)
    except ValueError as exc:
        raise UsageError(f"bad noise value in {text!r}") from exc
    if not 0 <= p <= 1:
        raise UsageError("hidden noise parameter must lie in [0, 1]")
    return NoiseSpec(kind, p)


def _parse_band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad band {text!r}; expected lo:hi") from exc
    return lo, hi


def cmd_discriminate(args, out):
    if (args.hidden is None) == (args.hidden_kraus is None):
        raise UsageError("give exactly one of --hidden or --hidden-kraus")
    if args.hidden is not None:
        oracle = experiments.ChannelOracle(spec=_parse_hidden(args.hidden))
    else:
        oracle = experiments.ChannelOracle(kraus=load_kraus_file(args.hidden_kraus))
    gw = experiments.W_PROBE if not args.gw_probe else GWParams.completing(*parse_complex_list(args.gw_probe))
    gghz = GGHZParams.from_abs(args.a0) if args.a0 is not None else experiments.GHZ_PROBE
    bands = {"ad": _parse_band(args.ad_band), "pd": _parse_band(args.pd_band)}
    opts = discord_opts(args) or DiscordOptions()
    res = experiments.discriminate(oracle, gw, gghz, opts, bands)
    record = {
        "hidden": args.hidden if args.hidden is not None else f"kraus:{args.hidden_kraus}",
        "step1_sign": res.step1_sign,
        "step1_value": float(fmt(res.step1_value)),
        "step2_measure": res.step2_measure,
        "step2_value": float(fmt(res.step2_value)),
        "verdict": res.verdict,
        "bands": bands,
    }
    out.write(res.verdict + "\n")
    out.write(json.dumps(record, sort_keys=True) + "\n")


def check_oracles(out, n_points: int = 20, seed: int = 11) -> dict[str, float]:
    """Closed-form-vs-Kraus and analytic-vs-numeric maximum deviations."""
    report = {}
    for family in ("gghz", "gw"):
        stream = "gghz" if family == "gghz" else "gw3"
        for kind in LOCAL_CHANNELS:
            worst = 0.0
            for i in range(n_points):
                params = sample_params(stream, seed, i)
                ket = make_gghz(params) if family == "gghz" else make_gw(params)
                for p in (0.0, 0.25, 0.5, 0.75, 1.0):
                    spec = NoiseSpec(kind, p)
                    cf = (evolved_gghz_closed_form if family == "gghz" else evolved_gw_closed_form)(params, spec)
                    worst = max(worst, float(np.max(np.abs(cf.matrix - apply_local(ket, spec).matrix))))
            report[f"closed_form/{family}/{kind}"] = worst
    for (family, channel), info in analytic.discrepancy_report().items():
        report[f"analytic/{family}/{channel}"] = info["max_deviation"]
        if info["quarantined"]:
            report[f"analytic/{family}/{channel}/quarantined"] = 1.0
    for key, value in report.items():
        out.write(f"{key},{fmt(value)}\n")
    return report


def cmd_check_oracles(args, out):
    check_oracles(out)


# -- parser ------------------------------------------------------------------------

def _env_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, DEFAULT_SEED))
    except ValueError:
        return DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("--config", help="key=value file; command-line flags win")
    common.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    common.add_argument("--discord-mode", choices=("exact", "constrained"), default=None)
    common.add_argument("--check-oracles", action="store_true", help="also print oracle deviations")

    parser = argparse.ArgumentParser(prog="monoq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", parents=[common], help="monogamy score along a noise grid")
    scan.add_argument("--family", default="gghz")
    scan.add_argument("--a0", type=float, help="|a0| of a gGHZ state")
    scan.add_argument("--amps", help="comma-separated complex amplitudes (gW: last one may be omitted)")
    scan.add_argument("--channel", choices=CHANNELS, required=True)
    scan.add_argument("--measure", choices=MEASURES, default="negativity")
    scan.add_argument("--p", default="0:1:0.01")
    scan.add_argument("--engine", choices=("analytic", "numeric", "check"), default="numeric")
    scan.set_defaults(func=cmd_scan)

    stats = sub.add_parser("stats", parents=[common], help="ensemble statistics")
    stats.add_argument("kind", choices=("fractions", "profiles", "terminal"))
    stats.add_argument("--family", default="gw")
    stats.add_argument("--channel", choices=CHANNELS, required=True)
    stats.add_argument("--measure", choices=MEASURES, default="negativity")
    stats.add_argument("--p", default="0:1:0.1")
    stats.add_argument("--n", type=int, default=10000)
    stats.add_argument("--seed", type=int, default=_env_seed())
    stats.set_defaults(func=cmd_stats)

    disc = sub.add_parser("discriminate", parents=[common], help="two-step channel identification")
    disc.add_argument("--hidden", help="<channel>:<p>")
    disc.add_argument("--hidden-kraus", help="file with a single-qubit Kraus set")
    disc.add_argument("--gw-probe", help="gW amplitudes a0,a1 (a2 fixed by normalization)")
    disc.add_argument("--a0", type=float, help="|a0| of the gGHZ probe")
    disc.add_argument("--ad-band", default="0.13:0.3")
    disc.add_argument("--pd-band", default="0.019:0.09")
    disc.set_defaults(func=cmd_discriminate)

    chk = sub.add_parser("check-oracles", parents=[common], help="closed-form and analytic audits")
    chk.set_defaults(func=cmd_check_oracles)
    parser.subcommands = sub.choices
    return parser


def _apply_config(parser, argv):
    """Parse ``argv``; values from a ``--config`` file act as defaults."""
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in parser.subcommands), None)
    if known.config and command:
        sub = parser.subcommands[command]
        actions = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in read_config(known.config).items():
            action = actions.get(key)
            if action is None or key in ("config", "help"):
                raise UsageError(f"unknown config key {key!r}")
            try:
                defaults[key] = action.type(value) if action.type else value
            except ValueError as exc:
                raise UsageError(f"bad config value for {key!r}: {value!r}") from exc
            if action.choices is not None and defaults[key] not in action.choices:
                raise UsageError(f"config value {value!r} not allowed for {key!r}")
            action.required = False
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        print(f"monoq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    experiments.set_max_workers(args.threads)
    buf = io.StringIO()
    try:
        args.func(args, buf)
        if args.check_oracles and args.command != "check-oracles":
            check_oracles(sys.stderr)
    except UsageError as exc:
        print(f"monoq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractViolation, ArithmeticError) as exc:
        print(f"monoq: numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except experiments.ProtocolViolation as exc:
        print(f"monoq: protocol violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"monoq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
