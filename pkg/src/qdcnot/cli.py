"""Command-line entry point: ``qdcnot {amplitudes,pcg,cnot,bsa,sweep}``.

Settings are resolved as defaults < config file < command-line flags.  The
config file is flat ``key=value`` text whose keys are :class:`RunConfig`
field names; its path comes from ``--config`` or the ``QDCNOT_CONFIG``
environment variable.

Exit codes: 0 success, 1 usage or parse error, 2 domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis
from .analysis import DomainError, SweepRow
from .cavity import CavityParams, SignConvention, SingularInput, compute_amplitudes
from .protocol import Bell, Leaky, apply_cnot, bsa, cnot, pcg, prepare_bell
from .statevec import EPS, Kind, Photon, QuantumState, RegisterLayout, Spin, fidelity

CONFIG_ENV = "QDCNOT_CONFIG"
SWEEP_HEADER = ("x", "g_over_kappa", "F_formula", "F_sim", "success_prob")
COMMANDS = ("amplitudes", "pcg", "cnot", "bsa", "sweep")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class ParseError(UsageError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass
class RunConfig:
    command: str = "cnot"
    state: str = "up,up"
    mode: str = "ideal"
    kappa_s: str = "0.2"
    g: str = ""
    gamma: float = analysis.DEFAULT_GAMMA
    omega: float = 0.0
    omega_c: float = 0.0
    omega_x: float = 0.0
    probe: str = "R,down"
    axis: str = "kappa_s"
    range: str = "0.01:1.9:0.01"
    ensemble: str = "default"
    convention: str = SignConvention.FORMULA.value
    heralded_loss: bool = True
    branches: str = "enumerate"
    seed: int = 0
    output: str = ""


def _coerce(name: str, value: str):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    try:
        if kind == "float":
            return float(value)
        if kind == "int":
            seed = int(value)
            if seed < 0:
                raise ValueError("seed must be unsigned")
            return seed
        if kind == "bool":
            lowered = value.strip().lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"not a boolean: {value!r}")
            return lowered in ("true", "1", "yes")
    except ValueError as exc:
        raise UsageError(f"bad value for {name}: {exc}") from None
    return value.strip()


def read_config_file(path: str | os.PathLike) -> dict:
    known = {f.name for f in fields(RunConfig)}
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise UsageError(f"{path}:{lineno}: expected key=value with a known key, got {line!r}")
        values[key] = _coerce(key, value)
    return values


# -- state specs --------------------------------------------------------------

_SPIN_TOKENS = {
    "up": np.array([1, 0], dtype=complex),
    "down": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
}


def parse_state(spec: str) -> QuantumState:
    """Parse e.g. ``"down,up"``, ``"+,up"`` or ``"psi+"`` into a spin register.

    Tokens are comma separated; spin tokens are up, down, + and -; a Bell
    name (psi+, psi-, phi+, phi-) contributes two spins.
    """
    if not spec.strip():
        raise ParseError("empty state spec", 0)
    parts: list[tuple[int, np.ndarray]] = []
    pos = 0
    for token in spec.split(","):
        stripped = token.strip()
        col = pos + (len(token) - len(token.lstrip()))
        if stripped in _SPIN_TOKENS:
            parts.append((1, _SPIN_TOKENS[stripped]))
        elif stripped in {b.value for b in Bell}:
            parts.append((2, prepare_bell(Bell(stripped)).amplitudes))
        else:
            raise ParseError(f"unknown state token {stripped!r}", col)
        pos += len(token) + 1
    n = sum(k for k, _ in parts)
    amps = np.ones(1, dtype=complex)
    for _, v in parts:
        amps = np.kron(amps, v)
    return QuantumState(RegisterLayout((Kind.SPIN,) * n), amps)


def describe_state(state: QuantumState) -> str:
    """Name a spin state: a basis label, a Bell name, or a ket expansion."""
    n = len(state.layout)
    psi = state.normalized()
    for labels in itertools.product(Spin, repeat=n):
        idx = state.layout.index_of(labels)
        if abs(abs(psi.amplitudes[idx]) - 1) < 1e-9:
            return ",".join(str(s) for s in labels)
    if n == 2:
        for b in Bell:
            if fidelity(psi, prepare_bell(b)) > 1 - 1e-9:
                return b.value
    return " ".join(
        f"({_fmt(a.real)}{'+' if a.imag >= 0 else '-'}{_fmt(abs(a.imag))}j)|{','.join(map(str, labels))}>"
        for labels, a in psi.support(1e-9).items()
    )


# -- numeric formatting and CSV ------------------------------------------------

def _fmt(v: float) -> str:
    if v == 0:
        v = 0.0
    return f"{v:.9g}"


def parse_values(spec: str) -> list[float]:
    """``"a:b:step"`` inclusive range, a comma list, or a single number."""
    spec = spec.strip()
    try:
        if ":" in spec:
            start, stop, step = (float(p) for p in spec.split(":"))
            return analysis.grid(start, stop, step)
        return [float(p) for p in spec.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"bad range {spec!r}: {exc}") from None


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow(
            [_fmt(v) for v in (r.x, r.g_over_kappa, r.F_formula, r.F_sim, r.success_probability)]
        )
    return buf.getvalue()


def read_sweep_csv(path: str | os.PathLike) -> list[SweepRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SWEEP_HEADER:
            raise ValueError(f"unexpected sweep header {header}")
        return [SweepRow(*(float(v) for v in row)) for row in reader]


def _write_output(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


# -- commands --------------------------------------------------------------------

def _leaky(cfg: RunConfig) -> Leaky | None:
    if cfg.mode == "ideal":
        return None
    if cfg.mode != "leaky":
        raise UsageError(f"mode must be ideal or leaky, got {cfg.mode!r}")
    x = _single(cfg.kappa_s, "kappa_s")
    g = _single(cfg.g, "g") if cfg.g else analysis.balanced_coupling(x, cfg.gamma)
    return analysis.OperatingPoint(x, g, cfg.gamma).leaky(_convention(cfg), cfg.heralded_loss)


def _single(spec: str, name: str) -> float:
    values = parse_values(spec)
    if len(values) != 1:
        raise UsageError(f"{name} must be a single value here, got {spec!r}")
    return values[0]


def _convention(cfg: RunConfig) -> SignConvention:
    try:
        return SignConvention(cfg.convention)
    except ValueError:
        raise UsageError(f"unknown sign convention {cfg.convention!r}") from None


def _rng(cfg: RunConfig):
    if cfg.branches == "enumerate":
        return None
    if cfg.branches == "sample":
        return np.random.default_rng(cfg.seed)
    raise UsageError(f"branches must be enumerate or sample, got {cfg.branches!r}")


def cmd_amplitudes(cfg: RunConfig, out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["kappa_s", "g", "gamma", "omega", "omega_c", "omega_x"]
        + [f"{c}_{part}" for c in ("t0", "r0", "t", "r") for part in ("re", "im")]
    )
    g_values = parse_values(cfg.g) if cfg.g else [0.0]
    for ks, g in itertools.product(parse_values(cfg.kappa_s), g_values):
        try:
            params = CavityParams(g=g, kappa_s=ks, gamma=cfg.gamma, omega=cfg.omega,
                                  omega_c=cfg.omega_c, omega_x=cfg.omega_x)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        amps = compute_amplitudes(params)
        coeffs = [amps.t0, amps.r0, amps.t, amps.r]
        writer.writerow(
            [_fmt(v) for v in (ks, g, cfg.gamma, cfg.omega, cfg.omega_c, cfg.omega_x)]
            + [_fmt(part) for c in coeffs for part in (c.real, c.imag)]
        )
    _emit(cfg, buf.getvalue(), out)


def _emit(cfg: RunConfig, text: str, out) -> None:
    if cfg.output:
        _write_output(cfg.output, text)
    else:
        out.write(text)


def _two_spins(cfg: RunConfig) -> QuantumState:
    state = parse_state(cfg.state)
    if len(state.layout) != 2:
        raise UsageError(f"expected a two-spin state, got {len(state.layout)} spins")
    return state


def _probe(spec: str) -> Photon:
    for p in Photon:
        if str(p) == spec.replace(" ", ""):
            return p
    raise UsageError(f"unknown probe {spec!r}; use R,down or L,up")


def cmd_pcg(cfg: RunConfig, out) -> None:
    state = _two_spins(cfg)
    results = pcg(state, _probe(cfg.probe), 0, 1, _leaky(cfg), _rng(cfg))
    if not results:
        out.write("no click (photon lost)\n")
    for outcome, rec in results:
        out.write(
            f"{outcome.detector} {outcome.polarization.value} "
            f"p={_fmt(rec.branch_probability)} state={describe_state(rec.final_state)}\n"
        )


def cmd_bsa(cfg: RunConfig, out) -> None:
    state = _two_spins(cfg)
    results = bsa(state, 0, 1, _leaky(cfg), _rng(cfg))
    if not results:
        out.write("no click (photon lost)\n")
    for label, rec in results:
        clicks = " ".join(f"{o.detector}({o.polarization.value})" for _, o in rec.outcomes)
        out.write(f"{label.value} clicks={clicks} p={_fmt(rec.branch_probability)}\n")


CNOT_COLUMNS = ("pcg1", "pcg2", "ancilla", "control_op", "target_op",
                "probability", "fidelity", "output")


def cmd_cnot(cfg: RunConfig, out) -> None:
    state = _two_spins(cfg)
    ideal = apply_cnot(state, 0, 1)
    records = cnot(state, 0, 1, _leaky(cfg), _rng(cfg))
    rows = []
    for rec in records:
        (_, o1), (_, o2), (_, anc) = rec.outcomes
        rows.append((
            f"{o1.detector}:{o1.polarization.value}",
            f"{o2.detector}:{o2.polarization.value}",
            str(anc),
            *rec.applied_feedforward,
            _fmt(rec.branch_probability),
            _fmt(fidelity(rec.final_state, ideal)),
            describe_state(rec.final_state),
        ))
    success = sum(rec.branch_probability for rec in records)
    out.write("  ".join(CNOT_COLUMNS) + "\n")
    for row in rows:
        out.write("  ".join(row) + "\n")
    out.write(f"ideal output: {describe_state(ideal)}\n")
    out.write(f"success probability: {_fmt(success)}\n")
    if cfg.output:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CNOT_COLUMNS)
        writer.writerows(rows)
        _write_output(cfg.output, buf.getvalue())


def cmd_sweep(cfg: RunConfig, out) -> None:
    values = parse_values(cfg.range)
    if not values:
        raise UsageError(f"empty sweep range {cfg.range!r}")
    if cfg.axis not in ("kappa_s", "g"):
        raise UsageError(f"axis must be kappa_s or g, got {cfg.axis!r}")
    try:
        ensemble = analysis.ensemble_states(cfg.ensemble)
    except ValueError:
        ensemble = [parse_state(s) for s in cfg.ensemble.split(";")]
    rows = analysis.sweep(cfg.axis, values, cfg.gamma, ensemble, _convention(cfg), cfg.heralded_loss)
    text = sweep_csv(rows)
    if not cfg.output:
        out.write(text)
        return
    _write_output(cfg.output, text)
    out.write(f"wrote {len(rows)} rows to {cfg.output}\n")
    out.write("x  F_formula  F_sim  gap  success_prob\n")
    for r in rows:
        gap = "n/a" if not r.in_domain else _fmt(r.F_sim - r.F_formula)
        out.write(f"{_fmt(r.x)}  {_fmt(r.F_formula)}  {_fmt(r.F_sim)}  {gap}  "
                  f"{_fmt(r.success_probability)}\n")


HANDLERS = {
    "amplitudes": cmd_amplitudes,
    "pcg": cmd_pcg,
    "cnot": cmd_cnot,
    "bsa": cmd_bsa,
    "sweep": cmd_sweep,
}


# -- argument handling -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdcnot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    common.add_argument("--mode", choices=["ideal", "leaky"])
    common.add_argument("--kappa-s", dest="kappa_s", help="kappa_s/kappa; value, list or a:b:step")
    common.add_argument("--g", help="g/kappa; defaults to the balanced coupling in leaky mode")
    common.add_argument("--gamma", type=float)
    common.add_argument("--convention", choices=[c.value for c in SignConvention])
    common.add_argument("--silent-loss", dest="heralded_loss", action="store_const", const=False,
                        help="detect wrong-port photons by polarization instead of dropping them")
    common.add_argument("--branches", choices=["enumerate", "sample"])
    common.add_argument("--seed", type=int)
    common.add_argument("--output", "-o")

    amp = sub.add_parser("amplitudes", parents=[common], help="reflection/transmission table")
    for name in ("omega", "omega_c", "omega_x"):
        amp.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    for name in ("pcg", "cnot", "bsa"):
        p = sub.add_parser(name, parents=[common], help=f"run the {name} protocol")
        p.add_argument("state", nargs="?", help="state spec, e.g. 'down,up', '+,up', 'psi+'")
        if name == "pcg":
            p.add_argument("--probe", help="R,down or L,up")
    sw = sub.add_parser("sweep", parents=[common], help="fidelity sweep CSV")
    sw.add_argument("--axis", choices=["kappa_s", "g"])
    sw.add_argument("--range", help="a:b:step (inclusive), list, or single value")
    sw.add_argument("--ensemble", help="four-basis, uniform-superposition, default, "
                                       "or ';'-separated state specs")
    return parser


def resolve_config(argv: Sequence[str] | None = None, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    args = vars(build_parser().parse_args(argv))
    values = {}
    config_path = args.pop("config", None) or environ.get(CONFIG_ENV)
    if config_path:
        values.update(read_config_file(config_path))
    values.update({k: v for k, v in args.items() if v is not None})
    if values.get("seed", 0) < 0:
        raise UsageError("seed must be unsigned")
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        cfg = resolve_config(argv)
        HANDLERS[cfg.command](cfg, out)
    except UsageError as exc:
        err.write(f"qdcnot: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, SingularInput) as exc:
        err.write(f"qdcnot: domain error: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
