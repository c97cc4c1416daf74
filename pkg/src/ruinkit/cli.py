"""Command-line front end.

Models are described in an INI file::

    [model]
    lambda = 1
    theta = 0.1          ; or: premium = 1.1
    sigma = 0

    [claims]
    type = gamma
    alpha = 0.01
    beta = 100

    [grid]
    min = 0
    max = 3000
    step = 300           ; or: count = 11
    spacing = linear     ; or geometric

    [run]
    methods = renyi, devylder, ramsay, two_point
    oracle = talbot      ; none | rational | talbot | mc
    mc_n = 1000000
    seed = 1

Numeric values accept arithmetic such as ``0.8*(4*sqrt(2)-1)``.  Any key can
be overridden with ``--set section.key=value``.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import csv
import io
import math
import operator
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import approx as approx_mod
from .admiss import numeric_admissibility, three_exp_criterion
from .claims import MomentsOnly, claim_from_record
from .errors import ConfigError, RuinkitError
from .jtfit import compare_indices, jt_fit3, jt_index_3, jt_index_degree
from .oracle import exact_ruin_rational, mc_aggregate_loss, talbot_ruin
from .riskmodel import RiskModel

ORACLES = ("none", "rational", "talbot", "mc")
SIG_DIGITS = 9

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log}
_CONSTS = {"pi": math.pi, "e": math.e}


def eval_number(text: str) -> float:
    """Evaluate a restricted arithmetic expression."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression element {ast.dump(node)[:40]}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(str(exc)) from None


@dataclass
class RunConfig:
    model: RiskModel | None
    claims: object
    grid: np.ndarray
    methods: list = field(default_factory=list)
    oracle: str = "none"
    mc_n: int = 1_000_000
    seed: int = 0
    raw: configparser.ConfigParser | None = None


def _num(cp, section, key, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"[{section}] {key}: missing required value")
        return default
    text = cp.get(section, key)
    try:
        return eval_number(text)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {text!r}: {exc}") from None


def _numlist(cp, section, key):
    text = cp.get(section, key)
    try:
        return [eval_number(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {text!r}: {exc}") from None


def read_config(path: str | None, overrides=()) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, value.strip())
    return cp


def _claims(cp):
    if not cp.has_section("claims"):
        raise ConfigError("[claims]: section missing")
    rec = dict(cp.items("claims"))
    kind = rec.get("type", "").lower()
    list_keys = {"weights", "rates", "moments"}
    parsed = {"type": kind}
    for k, v in rec.items():
        if k == "type":
            continue
        if k in list_keys:
            parsed[k] = _numlist(cp, "claims", k)
        else:
            parsed[k] = _num(cp, "claims", k)
    try:
        return claim_from_record(parsed)
    except ValueError as exc:
        raise ConfigError(f"[claims] {exc}") from None


def _model(cp, claims):
    if not cp.has_section("model"):
        return None
    if isinstance(claims, MomentsOnly) and len(claims.m) < 2:
        raise ConfigError("[claims] moments: a model needs at least m1, m2")
    lam = _num(cp, "model", "lambda")
    sigma = _num(cp, "model", "sigma", 0.0)
    has_c = cp.has_option("model", "premium")
    has_t = cp.has_option("model", "theta")
    if has_c == has_t:
        raise ConfigError("[model]: give exactly one of premium, theta")
    try:
        if has_t:
            return RiskModel.from_loading(lam, _num(cp, "model", "theta"), claims, sigma)
        return RiskModel(lam, _num(cp, "model", "premium"), claims, sigma)
    except ValueError as exc:
        raise ConfigError(f"[model] {exc}") from None


def _grid(cp):
    if not cp.has_section("grid"):
        raise ConfigError("[grid]: section missing")
    lo = _num(cp, "grid", "min", 0.0)
    hi = _num(cp, "grid", "max")
    spacing = cp.get("grid", "spacing", fallback="linear").strip().lower()
    if cp.has_option("grid", "step"):
        step = _num(cp, "grid", "step")
        if step <= 0:
            raise ConfigError("[grid] step: must be positive")
        count = int(round((hi - lo) / step)) + 1
    else:
        count = int(_num(cp, "grid", "count"))
    if count < 2:
        raise ConfigError("[grid] count: need at least 2 points")
    if not hi > lo:
        raise ConfigError("[grid] max: must exceed min")
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    if spacing == "geometric":
        if lo <= 0:
            raise ConfigError("[grid] min: geometric spacing needs min > 0")
        return np.geomspace(lo, hi, count)
    raise ConfigError(f"[grid] spacing = {spacing!r}: expected linear or geometric")


def build_run_config(cp, need_grid=True, need_model=True) -> RunConfig:
    claims = _claims(cp)
    model = _model(cp, claims)
    if need_model and model is None:
        raise ConfigError("[model]: section missing")
    grid = _grid(cp) if need_grid else np.zeros(0)
    methods = [
        m.strip().lower()
        for m in cp.get("run", "methods", fallback="").replace(";", ",").split(",")
        if m.strip()
    ]
    for m in methods:
        if m not in approx_mod.METHODS:
            raise ConfigError(
                f"[run] methods: unknown method {m!r}; choose from {', '.join(approx_mod.METHODS)}"
            )
    oracle = cp.get("run", "oracle", fallback="none").strip().lower()
    if oracle not in ORACLES:
        raise ConfigError(f"[run] oracle = {oracle!r}: expected one of {', '.join(ORACLES)}")
    env_seed = os.environ.get("RUINKIT_SEED")
    default_seed = 0
    if env_seed is not None:
        try:
            default_seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"RUINKIT_SEED={env_seed!r} is not an integer") from None
    seed = int(_num(cp, "run", "seed", float(default_seed)))
    mc_n = int(_num(cp, "run", "mc_n", 1e6))
    return RunConfig(model, claims, grid, methods, oracle, mc_n, seed, cp)


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{float(v):.{SIG_DIGITS}g}"


def write_csv(columns: dict, out) -> None:
    names = list(columns)
    n = len(next(iter(columns.values())))
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(names)
    for i in range(n):
        w.writerow([_fmt(columns[c][i]) for c in names])


def read_csv(path) -> dict:
    """Parse a CSV written by this tool back into float columns (empty -> nan)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    return {h: np.array([float(r[j]) if r[j] else np.nan for r in body]) for j, h in enumerate(head)}


def _exact_column(cfg: RunConfig, note):
    model, x = cfg.model, cfg.grid
    kind = cfg.oracle
    try:
        if kind == "rational":
            return {"exact": exact_ruin_rational(model).survival(x)}
        if kind == "talbot":
            return {"exact": talbot_ruin(model, x)}
        if kind == "mc":
            est = mc_aggregate_loss(model, x, cfg.mc_n, cfg.seed)
            return {"exact": est.psi_hat, "mc_half_width_95": est.half_width_95}
    except RuinkitError as exc:
        note(f"oracle {kind}: {type(exc).__name__}: {exc}")
        return {"exact": [None] * len(x)}
    return {}


class _Run:
    def __init__(self):
        self.failed = False
        self.notes = []

    def note(self, msg):
        self.failed = True
        self.notes.append(msg)
        print(f"ruinkit: {msg}", file=sys.stderr)


def _emit(columns, args):
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_csv(columns, fh)
    else:
        buf = io.StringIO()
        write_csv(columns, buf)
        sys.stdout.write(buf.getvalue())
    if getattr(args, "plot_dir", None):
        d = Path(args.plot_dir)
        d.mkdir(parents=True, exist_ok=True)
        x = columns["x"]
        for name, col in columns.items():
            if name == "x":
                continue
            with open(d / f"{name}.dat", "w", encoding="utf-8") as fh:
                for xi, v in zip(x, col):
                    if v is not None and not (isinstance(v, float) and math.isnan(v)):
                        fh.write(f"{_fmt(xi)} {_fmt(v)}\n")


def _method_column(model, method, x, run):
    try:
        return approx_mod.approximate(model, method)(x)
    except RuinkitError as exc:
        run.note(f"method {method}: {type(exc).__name__}: {exc}")
        return [None] * len(x)


def cmd_approx(cfg: RunConfig, args) -> int:
    run = _Run()
    if not cfg.methods:
        raise ConfigError("[run] methods: at least one method is required")
    cols = {"x": cfg.grid}
    for m in cfg.methods:
        cols[m] = _method_column(cfg.model, m, cfg.grid, run)
    cols.update(_exact_column(cfg, run.note))
    if "exact" in cols and cols["exact"][0] is not None:
        ex = np.asarray(cols["exact"], dtype=float)
        for m in cfg.methods:
            if cols[m][0] is None:
                cols[f"relerr_{m}"] = [None] * len(ex)
            else:
                with np.errstate(divide="ignore", invalid="ignore"):
                    cols[f"relerr_{m}"] = np.abs(np.asarray(cols[m]) - ex) / ex
    _emit(cols, args)
    return 1 if run.failed else 0


def cmd_exact(cfg: RunConfig, args) -> int:
    run = _Run()
    if cfg.oracle == "none":
        cfg.oracle = "rational" if _is_rational(cfg.claims) else "talbot"
    cols = {"x": cfg.grid}
    cols.update(_exact_column(cfg, run.note))
    _emit(cols, args)
    return 1 if run.failed else 0


def _is_rational(claims):
    try:
        claims.rational_lt()
        return True
    except RuinkitError:
        return False


def cmd_perturbed(cfg: RunConfig, args) -> int:
    from .errors import NotPerturbed

    if cfg.model.sigma <= 0:
        raise NotPerturbed("the perturbed command needs [model] sigma > 0")
    run = _Run()
    methods = cfg.methods or ["perturbed_2m", "perturbed_1m"]
    cols = {"x": cfg.grid}
    for m in methods:
        try:
            a = approx_mod.approximate(cfg.model, m)
            cols[m] = a(cfg.grid)
            if a.components is not None:
                cols[f"{m}_d"] = a.psi_d(cfg.grid)
                cols[f"{m}_j"] = a.psi_j(cfg.grid)
        except RuinkitError as exc:
            run.note(f"method {m}: {type(exc).__name__}: {exc}")
            cols[m] = [None] * len(cfg.grid)
    if cfg.oracle == "none":
        cfg.oracle = "rational" if _is_rational(cfg.claims) else "talbot"
    cols.update(_exact_column(cfg, run.note))
    _emit(cols, args)
    return 1 if run.failed else 0


def cmd_jt(cfg: RunConfig, args) -> int:
    out = []
    m = cfg.claims.moments(3)
    out.append(f"claim moments m1..m3: {', '.join(_fmt(v) for v in m)}")
    out.append(f"JT index (claims, closed form): {jt_index_3(m)}")
    out.append(f"JT index (claims, Hankel search): {jt_index_degree(m, 3)}")
    fit = jt_fit3(m)
    out.append(f"claims fit: order {fit.order}, components (weight, stage mean):")
    for w, x in fit.components:
        out.append(f"  {_fmt(w)}  {_fmt(x)}")
    adm = numeric_admissibility(fit.mixture())
    out.append(f"  admissible density: {adm.density_nonneg}")
    try:
        me = cfg.claims.equilibrium_moments(3)
    except RuinkitError:
        me = None
    if me is not None:
        out.append(f"equilibrium moments: {', '.join(_fmt(v) for v in me)}")
        out.append(f"JT index (equilibrium): {jt_index_3(me)}")
        fe = jt_fit3(me)
        out.append(f"equilibrium fit: order {fe.order}")
        for w, x in fe.components:
            out.append(f"  {_fmt(w)}  {_fmt(x)}")
    if cfg.model is not None and me is not None and cfg.model.sigma == 0:
        r = compare_indices(cfg.model)
        out.append(f"theta = {_fmt(cfg.model.theta)}")
        out.append(f"partial J index of L: {_fmt(r.partial_J_aggregate)}  (nu(L) = {_fmt(r.nu_L)})")
        out.append(f"partial J index of L from its moments: {_fmt(r.partial_J_aggregate_moments)}")
        out.append(f"J index of equilibrium law: {_fmt(r.J_Li)}  (nu(Li) = {_fmt(r.nu_Li)})")
        out.append(f"verdict: {r.verdict}")
    text = "\n".join(out) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_moments(cfg: RunConfig, args) -> int:
    K = int(_num(cfg.raw, "run", "k", 4.0))
    claims = cfg.claims
    lines = []
    try:
        lines.append("claim moments: " + ", ".join(_fmt(v) for v in claims.moments(K)))
    except RuinkitError as exc:
        lines.append(f"claim moments: {exc}")
    try:
        lines.append("equilibrium moments: " + ", ".join(_fmt(v) for v in claims.equilibrium_moments(K - 1)))
    except RuinkitError as exc:
        lines.append(f"equilibrium moments: {exc}")
    model = cfg.model
    if model is not None:
        lines.append(f"p = {_fmt(model.p)}, theta = {_fmt(model.theta)}, rho = {_fmt(model.rho)}")
        try:
            agg = model.aggregate_loss_moments(K - 1)
            lines.append("aggregate loss reduced moments: " + ", ".join(_fmt(v) for v in agg.lam))
        except RuinkitError as exc:
            lines.append(f"aggregate loss reduced moments: {exc}")
        try:
            lines.append(f"adjustment coefficient: {_fmt(model.adjustment_coefficient())}")
        except RuinkitError as exc:
            lines.append(f"adjustment coefficient: {type(exc).__name__}: {exc}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(cfg: RunConfig, args) -> int:
    lines = []
    status = 0
    cp = cfg.raw
    if cp.has_option("check", "weights"):
        w = _numlist(cp, "check", "weights")
        if len(w) != 3:
            raise ConfigError("[check] weights: expected three coefficients")
        lines.append(f"three-exponential criterion {w}: {three_exp_criterion(w)}")
    for m in cfg.methods:
        try:
            a = approx_mod.approximate(cfg.model, m)
        except RuinkitError as exc:
            print(f"ruinkit: method {m}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = 1
            continue
        rep = numeric_admissibility(a.survival)
        lines.append(
            f"{m}: density_nonneg={rep.density_nonneg} survival_monotone={rep.survival_monotone} "
            f"min_density={_fmt(rep.min_density)} at x={_fmt(rep.argmin)}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


COMMANDS = {
    "approx": (cmd_approx, True, True),
    "exact": (cmd_exact, True, True),
    "perturbed": (cmd_perturbed, True, True),
    "jt": (cmd_jt, False, False),
    "moments": (cmd_moments, False, False),
    "check": (cmd_check, False, False),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ruinkit", description="Ruin probability approximations and oracles")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "approx": "approximate ruin probabilities on a grid (CSV)",
        "exact": "reference ruin probabilities on a grid (CSV)",
        "perturbed": "creeping/jump decomposition for sigma > 0 (CSV)",
        "jt": "Johnson-Taaffe indices and fits (text report)",
        "moments": "claim, equilibrium and aggregate-loss moments",
        "check": "admissibility of approximations and exponential mixtures",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH", help="INI model/run description")
        p.add_argument("--set", metavar="K=V", action="append", default=[], help="override section.key=value")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv"], default="csv")
        p.add_argument("--plot-dir", metavar="DIR", help="also write two-column .dat files per column")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn, need_grid, need_model = COMMANDS[args.command]
    try:
        cp = read_config(args.config, args.set)
        cfg = build_run_config(cp, need_grid=need_grid, need_model=need_model)
        return fn(cfg, args)
    except ConfigError as exc:
        print(f"ruinkit: config error: {exc}", file=sys.stderr)
        return 2
    except RuinkitError as exc:
        print(f"ruinkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
