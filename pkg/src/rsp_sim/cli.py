"""``rsp-sim`` command line front end.

Exit codes: 0 success, 1 invariant violation, 2 config error, 3 degenerate branch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import StateVector
from .errors import DegenerateBranchError, RSPError, UnsupportedOrderError, ValidationError
from .harness import default_grid, enumerate_all, sample, sweep_tsp
from .metrics import build_report, table2_report, tsp_formula
from .protocol import (
    ChannelSpec,
    DesiredStateSpec,
    Protocol,
    bit_string,
    bits_to_int,
    build_omega,
    int_to_bits,
    recovery_label,
    run_branch,
)
from .signs import sign_pattern

MODES = ("verify", "enumerate", "sample", "sweep", "table2", "trace")
NEEDS_STATE = ("enumerate", "sample", "trace")

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3


class ConfigError(Exception):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class ExperimentConfig:
    mode: str
    m: Optional[int] = None
    alphas: Optional[list] = None
    etas: Optional[list] = None
    channel_x: Optional[list] = None
    trials: int = 100_000
    seed: int = 0
    grid: Optional[list] = None
    forced_outcome: Optional[tuple] = None
    output_path: Optional[str] = None
    format: str = "json"
    count: int = 100
    cross_check: int = 0
    desired: Optional[DesiredStateSpec] = field(default=None, repr=False)
    channels: Optional[ChannelSpec] = field(default=None, repr=False)


def _int_field(raw: dict, name: str, default=None, minimum=None):
    value = raw.get(name, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(name, f"must be >= {minimum}")
    return value


def _real_list(raw: dict, name: str, length: int) -> list:
    value = raw.get(name)
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(name, "expected a list of numbers")
    if len(value) != length:
        raise ConfigError(name, f"expected {length} values for m={raw['m']}, got {len(value)}")
    return [float(v) for v in value]


def _parse_grid(raw, m: int):
    if raw is None:
        return None
    if isinstance(raw, dict):
        res = _int_field(raw, "resolution", minimum=1)
        if res is None:
            raise ConfigError("grid", "object form needs a 'resolution' field")
        return [list(a) for a in default_grid(m, res)]
    if not isinstance(raw, list) or len(raw) != m or not all(isinstance(a, list) for a in raw):
        raise ConfigError("grid", f"expected {m} lists of x values or {{'resolution': n}}")
    return raw


def _parse_outcome(raw, m: int):
    if raw is None:
        return None
    if isinstance(raw, dict):
        pair = (raw.get("i"), raw.get("j"))
    elif isinstance(raw, list) and len(raw) == 2:
        pair = tuple(raw)
    else:
        raise ConfigError("forced_outcome", "expected {'i': bits, 'j': bits}")
    try:
        return tuple(bits_to_int(str(p) if isinstance(p, str) else p, m) for p in pair)
    except (ValidationError, TypeError) as exc:
        raise ConfigError("forced_outcome", str(exc)) from None


def parse_config(mode: str, raw: dict, normalize: bool = False, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate a config document; ``overrides`` (from flags) win over file fields."""
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a JSON object")
    raw = dict(raw)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})

    cfg = ExperimentConfig(mode=mode)
    cfg.m = _int_field(raw, "m", minimum=1)
    cfg.trials = _int_field(raw, "trials", 100_000, minimum=1)
    cfg.seed = _int_field(raw, "seed", 0, minimum=0)
    cfg.count = _int_field(raw, "count", 100, minimum=1)
    cfg.cross_check = _int_field(raw, "cross_check", 0, minimum=0)
    cfg.output_path = raw.get("output_path")
    cfg.format = raw.get("format", "csv" if mode == "sweep" else "json")
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format", "must be 'json' or 'csv'")

    if mode in NEEDS_STATE + ("sweep",) and cfg.m is None:
        raise ConfigError("m", f"required for {mode}")
    if cfg.m is not None and mode in NEEDS_STATE + ("verify",):
        try:
            sign_pattern(cfg.m)
        except UnsupportedOrderError as exc:
            raise ConfigError("m", str(exc)) from None
    if mode in NEEDS_STATE:
        n = 1 << cfg.m
        cfg.alphas = _real_list(raw, "alphas", n)
        cfg.etas = _real_list(raw, "etas", n) if "etas" in raw else [0.0] * n
        cfg.channel_x = _real_list(raw, "channel_x", cfg.m)
        try:
            if normalize:
                cfg.desired = DesiredStateSpec.normalized(cfg.m, cfg.alphas, cfg.etas)
            else:
                cfg.desired = DesiredStateSpec(cfg.m, tuple(cfg.alphas), tuple(cfg.etas))
        except ValidationError as exc:
            name = "etas" if "eta" in str(exc) else "alphas"
            hint = "" if normalize else " (pass --normalize to rescale)"
            raise ConfigError(name, f"{exc}{hint}") from None
        try:
            cfg.channels = ChannelSpec(tuple(cfg.channel_x))
        except ValidationError as exc:
            raise ConfigError("channel_x", str(exc)) from None
    if mode == "sweep":
        cfg.grid = _parse_grid(raw.get("grid"), cfg.m)
    if mode == "trace":
        cfg.forced_outcome = _parse_outcome(raw.get("forced_outcome"), cfg.m)
        if cfg.forced_outcome is None:
            raise ConfigError("forced_outcome", "required for trace")
    return cfg


# -- serialization ---------------------------------------------------------

def _dump_json(obj) -> str:
    # float repr is the shortest string that round-trips bit-exactly
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue()


def _emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _state_json(state: StateVector) -> dict:
    return {
        "register": list(state.register),
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }


def _spec_json(desired: DesiredStateSpec, channels: ChannelSpec) -> dict:
    return {"m": desired.m, "alphas": list(desired.alphas), "etas": list(desired.etas),
            "channel_x": list(channels.xs)}


# -- commands --------------------------------------------------------------

def enumeration_payload(desired: DesiredStateSpec, channels: ChannelSpec) -> dict:
    res = enumerate_all(desired, channels)
    report = build_report(channels, res.total_success_probability)
    m = desired.m
    return {
        "m": m,
        "tsp_formula": report.tsp_formula,
        "tsp_enumerated": report.tsp_enumerated,
        "total_success_probability": res.total_success_probability,
        "cic": report.cic,
        "gamma": report.gamma,
        "total_probability": res.total_probability,
        "min_success_fidelity": res.min_success_fidelity,
        "branches": [
            {
                "i": "".join(map(str, b.i_bits)),
                "j": "".join(map(str, b.j_bits)),
                "aux": b.aux_bit,
                "probability": b.probability,
                "fidelity": b.fidelity_to_target,
            }
            for b in res.branches
        ],
    }


def cmd_enumerate(cfg: ExperimentConfig) -> int:
    try:
        payload = enumeration_payload(cfg.desired, cfg.channels)
    except ValidationError as exc:
        _emit(cfg, _dump_json({"violation": str(exc), **_spec_json(cfg.desired, cfg.channels)}))
        return EXIT_VIOLATION
    if cfg.format == "csv":
        rows = ((b["i"], b["j"], b["aux"], b["probability"], b["fidelity"]) for b in payload["branches"])
        _emit(cfg, _dump_csv(["i", "j", "aux", "probability", "fidelity"], rows))
    else:
        _emit(cfg, _dump_json(payload))
    return EXIT_OK


def cmd_sample(cfg: ExperimentConfig) -> int:
    stats = sample(cfg.desired, cfg.channels, cfg.trials, cfg.seed)
    p = tsp_formula(cfg.channels)
    sigma = math.sqrt(p * (1 - p) / stats.trials)
    payload = {
        "m": cfg.m,
        "trials": stats.trials,
        "success_count": stats.success_count,
        "empirical_tsp": stats.empirical_tsp,
        "rng_seed": stats.rng_seed,
        "tsp_formula": p,
        "binomial_sigma": sigma,
    }
    if cfg.format == "csv":
        _emit(cfg, _dump_csv(list(payload), [list(payload.values())]))
    else:
        _emit(cfg, _dump_json(payload))
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig) -> int:
    try:
        res = sweep_tsp(cfg.m, cfg.grid, cross_check=cfg.cross_check, seed=cfg.seed)
    except ValidationError as exc:
        raise ConfigError("grid", str(exc)) from None
    header = [f"x{k}" for k in range(cfg.m)] + ["tsp"]
    if cfg.format == "csv":
        _emit(cfg, _dump_csv(header, res.rows()))
    else:
        _emit(cfg, _dump_json({
            "m": res.m,
            "resolution": list(res.resolution),
            "cross_check_max_error": res.cross_check_max_error,
            "points": [dict(zip(header, row)) for row in res.rows()],
        }))
    return EXIT_OK


def cmd_table2(cfg: ExperimentConfig) -> int:
    rows = table2_report()
    if cfg.format == "csv":
        header = list(rows[0])
        _emit(cfg, _dump_csv(header, ([r[h] for h in header] for r in rows)))
    else:
        _emit(cfg, _dump_json(rows))
    return EXIT_OK


def _format_state(state: StateVector) -> str:
    m = state.num_qubits
    terms = []
    for idx, z in enumerate(state.amplitudes):
        if abs(z) > 1e-12:
            terms.append(f"({z.real:+.6f}{z.imag:+.6f}j)|{format(idx, f'0{m}b')}>")
    label = "".join(str(q) for q in state.register)
    return f"[{label}] " + " ".join(terms)


def trace_report(desired: DesiredStateSpec, channels: ChannelSpec, i: int, j: int) -> dict:
    m = desired.m
    proto = Protocol(desired, channels)
    states = proto.trace(i, j)
    ok, _ = proto.branch(i, j)
    names = ["step1_residual", "step2_corrected", "step3_receiver", "step4_aux0", "final"]
    return {
        "m": m,
        "i": bit_string(i, m),
        "j": bit_string(j, m),
        "recovery": recovery_label(int_to_bits(i, m), int_to_bits(j, m)),
        "probability": ok.probability,
        "fidelity": ok.fidelity_to_target,
        "states": dict(zip(names, states)),
    }


def cmd_trace(cfg: ExperimentConfig) -> int:
    i, j = cfg.forced_outcome
    try:
        rep = trace_report(cfg.desired, cfg.channels, i, j)
    except DegenerateBranchError as exc:
        print(f"degenerate branch: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    lines = [f"outcome i={rep['i']} j={rep['j']} (m={rep['m']})"]
    for name, st in rep["states"].items():
        lines.append(f"{name}: {_format_state(st)}")
    lines.append(f"recovery: {rep['recovery']}")
    lines.append(f"probability: {rep['probability']!r}")
    lines.append(f"fidelity: {rep['fidelity']!r}")
    text = "\n".join(lines) + "\n"
    if cfg.output_path:
        payload = dict(rep, states={k: _state_json(v) for k, v in rep["states"].items()})
        _emit(cfg, _dump_json(payload))
        sys.stdout.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if rep["fidelity"] >= 1 - 1e-10 else EXIT_VIOLATION


def invariant_violations(desired: DesiredStateSpec, channels: ChannelSpec):
    """Yield (check, detail) for each violated protocol invariant."""
    m = desired.m
    omega = build_omega(desired, Protocol(desired, channels).signs).omega
    err = float(np.max(np.abs(omega @ omega.conj().T - np.eye(1 << m))))
    if err >= 1e-12:
        yield "omega_unitary", {"max_error": err}
    res = enumerate_all(desired, channels)
    if abs(res.total_probability - 1) >= 1e-10:
        yield "born_completeness", {"total_probability": res.total_probability}
    if abs(sum(res.step1_probabilities) - 1) >= 1e-10:
        yield "step1_completeness", {"sum": sum(res.step1_probabilities)}
    if res.min_success_fidelity is not None and res.min_success_fidelity < 1 - 1e-10:
        yield "success_fidelity", {"min_fidelity": res.min_success_fidelity}
    weight = math.prod(channels.x_squared)
    for i_bits, p in res.success_by_outcome().items():
        if abs(p - weight) >= 1e-10:
            yield "per_outcome_success", {"i": list(i_bits), "probability": p, "expected": weight}
            break
    if abs(res.total_success_probability - tsp_formula(channels)) >= 1e-10:
        yield "tsp_formula", {"enumerated": res.total_success_probability,
                              "formula": tsp_formula(channels)}
    maximal = ChannelSpec.maximal(m)
    for i in range(1 << m):
        for j in range(1 << m):
            a, _ = run_branch(desired, maximal, i, j, skip_equalizer=True)
            b, _ = run_branch(desired, maximal, i, j, skip_equalizer=False)
            if abs(a.probability - b.probability) >= 1e-12 or abs(a.fidelity_to_target - b.fidelity_to_target) >= 1e-12:
                yield "maximal_shortcut", {"i": i, "j": j}
                return


def cmd_verify(cfg: ExperimentConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    orders = [cfg.m] if cfg.m is not None else [1, 2, 3]
    checked = 0
    for m in orders:
        for _ in range(cfg.count):
            desired = DesiredStateSpec.random(m, rng)
            channels = ChannelSpec.random(m, rng)
            for check, detail in invariant_violations(desired, channels):
                _emit(cfg, _dump_json({"check": check, "detail": detail,
                                       **_spec_json(desired, channels)}))
                return EXIT_VIOLATION
            checked += 1
    _emit(cfg, _dump_json({"status": "ok", "specs_checked": checked, "orders": orders,
                           "seed": cfg.seed}))
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "sweep": cmd_sweep,
    "table2": cmd_table2,
    "trace": cmd_trace,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rsp-sim", description="Remote state preparation over GHZ-type channels")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--normalize", action="store_true", help="rescale unnormalized alphas")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--count", type=int, help="random specs per order in verify mode")
    p.add_argument("--out", dest="output_path")
    p.add_argument("--format", choices=("json", "csv"))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    raw = {}
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    raw = json.load(fh)
            except OSError as exc:
                raise ConfigError("config", str(exc)) from None
            except json.JSONDecodeError as exc:
                raise ConfigError("config", f"invalid JSON: {exc}") from None
        overrides = {"seed": args.seed, "trials": args.trials, "count": args.count,
                     "output_path": args.output_path, "format": args.format}
        cfg = parse_config(args.mode, raw, normalize=args.normalize, overrides=overrides)
        return COMMANDS[args.mode](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RSPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
