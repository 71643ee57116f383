"""Run configuration: flat ``key = value`` text with ``[section]`` headers.

Vectors are whitespace- or comma-separated numbers; matrices are written row
by row with rows separated by ``;``. Example::

    [run]
    seed = 7

    [system]
    kind = affine
    A_minus = -1 0; 0 -1
    b_minus = 1 0
    A_plus = -1 0; 0 -1
    b_plus = -1 0

    [equilibrium]
    pin = 1
    guess_x = 0 0
    guess_lambda = 0.5

    [rule]
    kind = both

    [simulation]
    step = 0.01
    t_max = 20
    x_init = 1 1

Sections and keys:

``[run]``         seed (integer, default 0)
``[system]``      kind = affine | boost; for affine: A_minus, b_minus, A_plus, b_plus,
                  optional weight_convention = minus | plus (which field guess_lambda weights)
``[boost]``       r_L, r_C, x_L, x_C, r_0, u_s (defaults: the reference parameters)
``[equilibrium]`` boost: x02, optional root (index into the sorted roots);
                  affine: pin (0-based coordinate held fixed), guess_x, guess_lambda
``[lyapunov]``    optional P (user-supplied matrix: verification only)
``[rule]``        kind = linear | quadratic | reduced | both
``[simulation]``  step, t_max, event_tol, slide_tol, hysteresis, stop_radius, x_init
``[verify]``      count, half_width (vector; default x0 +- 5|Delta|), alpha_scale
``[output]``      dir
"""

import configparser
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boost import BoostParams, boost_demo_options
from .errors import ContractViolation
from .filippov import SimOptions

SCHEMA_VERSION = 1
RULE_KINDS = ("linear", "quadratic", "reduced", "both")
KNOWN = {
    "run": {"seed"},
    "system": {"kind", "a_minus", "b_minus", "a_plus", "b_plus", "weight_convention"},
    "boost": {"r_l", "r_c", "x_l", "x_c", "r_0", "u_s"},
    "equilibrium": {"x02", "root", "pin", "guess_x", "guess_lambda"},
    "lyapunov": {"p"},
    "rule": {"kind"},
    "simulation": {"step", "t_max", "event_tol", "slide_tol", "hysteresis", "stop_radius",
                   "x_init"},
    "verify": {"count", "half_width", "alpha_scale"},
    "output": {"dir"},
}


class ConfigError(ContractViolation):
    pass


def parse_vector(text):
    try:
        v = np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ConfigError(f"bad number in vector {text!r}") from exc
    if v.size == 0:
        raise ConfigError("empty vector")
    return v


def parse_matrix(text):
    rows = [parse_vector(r) for r in text.split(";") if r.strip()]
    if not rows or len({r.size for r in rows}) != 1:
        raise ConfigError(f"ragged or empty matrix {text!r}")
    return np.vstack(rows)


@dataclass
class RunConfig:
    system_kind: str
    seed: int = 0
    A_minus: Optional[np.ndarray] = None
    b_minus: Optional[np.ndarray] = None
    A_plus: Optional[np.ndarray] = None
    b_plus: Optional[np.ndarray] = None
    boost: BoostParams = field(default_factory=BoostParams)
    x02: float = 10.0
    root: Optional[int] = None
    pin: int = 0
    guess_x: Optional[np.ndarray] = None
    guess_lambda: float = 0.5
    P: Optional[np.ndarray] = None
    rule: str = "both"
    sim: SimOptions = field(default_factory=SimOptions)
    x_init: Optional[np.ndarray] = None
    verify_count: int = 10_000
    half_width: Optional[np.ndarray] = None
    alpha_scale: float = 1.0
    out_dir: str = "out"


def _float(sec, key, default):
    try:
        return sec.getfloat(key, fallback=default)
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] {key}: {exc}") from exc


def _int(sec, key, default):
    try:
        return sec.getint(key, fallback=default)
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] {key}: {exc}") from exc


def load_config(path) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return config_from_parser(cp)


def config_from_text(text) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return config_from_parser(cp)


def config_from_parser(cp) -> RunConfig:
    for name in cp.sections():
        if name not in KNOWN:
            raise ConfigError(f"unknown section [{name}]")
        extra = set(cp[name]) - KNOWN[name]
        if extra:
            raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(extra))}")
    if not cp.has_section("system"):
        raise ConfigError("missing [system] section")
    sysec = cp["system"]
    kind = sysec.get("kind", "").strip()
    cfg = RunConfig(system_kind=kind)
    if cp.has_section("run"):
        cfg.seed = _int(cp["run"], "seed", 0)

    eqsec = cp["equilibrium"] if cp.has_section("equilibrium") else cp[cp.default_section]
    if kind == "boost":
        if any(k in sysec for k in ("a_minus", "a_plus", "b_minus", "b_plus")):
            raise ConfigError("boost system must not also give affine matrices")
        if cp.has_section("boost"):
            b = cp["boost"]
            d = BoostParams()
            cfg.boost = BoostParams(*(_float(b, k.lower(), getattr(d, k))
                                      for k in ("r_L", "r_C", "x_L", "x_C", "r_0", "u_s")))
        cfg.x02 = _float(eqsec, "x02", 10.0)
        root = eqsec.get("root")
        cfg.root = int(root) if root is not None else None
        cfg.sim = boost_demo_options(cfg.boost)
    elif kind == "affine":
        try:
            cfg.A_minus = parse_matrix(sysec["a_minus"])
            cfg.b_minus = parse_vector(sysec["b_minus"])
            cfg.A_plus = parse_matrix(sysec["a_plus"])
            cfg.b_plus = parse_vector(sysec["b_plus"])
        except KeyError as exc:
            raise ConfigError(f"affine system needs {exc.args[0]}") from exc
        n = cfg.b_minus.size
        for M in (cfg.A_minus, cfg.A_plus):
            if M.shape != (n, n) or cfg.b_plus.size != n:
                raise ConfigError("affine system dimensions disagree")
        cfg.pin = _int(eqsec, "pin", 0)
        gx = eqsec.get("guess_x")
        cfg.guess_x = parse_vector(gx) if gx else np.zeros(n)
        cfg.guess_lambda = _float(eqsec, "guess_lambda", 0.5)
        conv = sysec.get("weight_convention", "minus").strip()
        if conv == "plus":
            cfg.guess_lambda = 1.0 - cfg.guess_lambda
        elif conv != "minus":
            raise ConfigError("weight_convention must be 'minus' or 'plus'")
    else:
        raise ConfigError("[system] kind must be 'affine' or 'boost'")

    if cp.has_section("lyapunov") and "p" in cp["lyapunov"]:
        cfg.P = parse_matrix(cp["lyapunov"]["p"])
    if cp.has_section("rule"):
        cfg.rule = cp["rule"].get("kind", "both").strip()
        if cfg.rule not in RULE_KINDS:
            raise ConfigError(f"rule kind must be one of {RULE_KINDS}")
    if cp.has_section("simulation"):
        s = cp["simulation"]
        base = cfg.sim
        stop = s.get("stop_radius")
        cfg.sim = SimOptions(
            step=_float(s, "step", base.step),
            t_max=_float(s, "t_max", base.t_max),
            event_tol=_float(s, "event_tol", base.event_tol),
            slide_tol=_float(s, "slide_tol", base.slide_tol),
            hysteresis=_float(s, "hysteresis", base.hysteresis),
            stop_radius=float(stop) if stop is not None else base.stop_radius,
        )
        if "x_init" in s:
            cfg.x_init = parse_vector(s["x_init"])
    if cp.has_section("verify"):
        v = cp["verify"]
        cfg.verify_count = _int(v, "count", cfg.verify_count)
        if "half_width" in v:
            cfg.half_width = parse_vector(v["half_width"])
        cfg.alpha_scale = _float(v, "alpha_scale", 1.0)
    if cp.has_section("output"):
        cfg.out_dir = cp["output"].get("dir", cfg.out_dir)
    return cfg
