"""``switchsurf {equilibrium|synth|simulate|verify} --config PATH [--out DIR] [--seed N]``

Exit codes: 0 ok, 1 verification failed, 2 no switched equilibrium, 3 no
CQLF, 4 divergence, 64 configuration or contract error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import boost as bst
from .config import SCHEMA_VERSION, ConfigError, RunConfig, load_config
from .errors import (ContractViolation, CQLFError, DegenerateError, Divergence,
                     NoConvergence, NoSwitchedEquilibrium, NotASwitchedEquilibrium)
from .filippov import descent_monitor, simulate, write_trajectory_csv
from .geometry import default_box, omega_alpha_sphere, verify_lemmas
from .lyapunov import QuadraticLyapunov, SamplingSpec, synthesize_cqlf, verify_cqlf
from .model import SwitchedSystem, find_switched_equilibrium
from .plotting import svg_plot, threshold_polylines, write_polylines_csv
from .rules import linear_rule, quadratic_rule, reduced_rule

EXIT_OK, EXIT_FAILED, EXIT_NO_EQ, EXIT_NO_CQLF, EXIT_DIVERGED, EXIT_CONFIG = 0, 1, 2, 3, 4, 64


def build_system(cfg: RunConfig):
    if cfg.system_kind == "boost":
        return bst.boost_system(cfg.boost).system
    return SwitchedSystem.affine(cfg.A_minus, cfg.b_minus, cfg.A_plus, cfg.b_plus)


def find_equilibria(cfg, sys):
    if cfg.system_kind == "boost":
        return bst.boost_equilibria(cfg.boost, cfg.x02)
    return [find_switched_equilibrium(sys, cfg.guess_x, cfg.guess_lambda, cfg.pin)]


def select(cfg, eqs):
    if cfg.system_kind == "boost":
        if cfg.root is not None:
            if not 0 <= cfg.root < len(eqs):
                raise ConfigError(f"root index {cfg.root} out of range ({len(eqs)} roots)")
            return eqs[cfg.root]
        return bst.select_equilibrium(eqs)
    return eqs[0]


def build_lyapunov(cfg, sys, eq):
    if cfg.P is not None:
        check = verify_cqlf(sys, eq, cfg.P)
        return QuadraticLyapunov(cfg.P, eq.x0, check.alpha, check.certified, "user")
    if cfg.system_kind == "boost":
        return bst.boost_lyapunov(cfg.boost, eq)
    return synthesize_cqlf(sys, eq)


def build_rules(cfg, L, sys, eq):
    kinds = ["linear", "quadratic"] if cfg.rule == "both" else [cfg.rule]
    rules, notes = {}, {}
    for kind in kinds:
        try:
            if kind == "linear":
                rules[kind] = linear_rule(L, sys, eq)
            elif kind == "quadratic":
                rules[kind] = quadratic_rule(L, sys)
            else:
                if not sys.is_affine:
                    raise ContractViolation("reduced rule needs an affine system")
                rules[kind] = reduced_rule(L, sys.minus.b, sys.plus.b)
        except DegenerateError as exc:
            notes[kind] = str(exc)
    return rules, notes


def eq_dict(eq, sys):
    return {"x0": eq.x0.tolist(), "lambda0": eq.lambda0, "indeterminate": eq.indeterminate,
            "residual_norm": float(np.linalg.norm(eq.residual(sys)))}


def lyap_dict(L):
    return {"P": L.P.tolist(), "alpha": L.alpha, "alpha_certified": L.certified,
            "source": L.source}


def write_json(out_dir, name, payload):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_equilibrium(cfg, out_dir):
    sys_ = build_system(cfg)
    eqs = find_equilibria(cfg, sys_)
    for i, eq in enumerate(eqs):
        print(f"root {i}: x0 = {np.array2string(eq.x0, precision=10)}  lambda0 = {eq.lambda0:.10g}")
    write_json(out_dir, "equilibrium.json",
               {"command": "equilibrium", "equilibria": [eq_dict(e, sys_) for e in eqs]})
    return EXIT_OK


def _pipeline(cfg):
    sys_ = build_system(cfg)
    eqs = find_equilibria(cfg, sys_)
    eq = select(cfg, eqs)
    L = build_lyapunov(cfg, sys_, eq)
    rules, notes = build_rules(cfg, L, sys_, eq)
    return sys_, eq, L, rules, notes


def _synth_payload(cfg, sys_, eq, L, rules, notes):
    payload = {"equilibrium": eq_dict(eq, sys_), "lyapunov": lyap_dict(L),
               "rules": {k: r.to_dict() for k, r in rules.items()}, "unavailable_rules": notes}
    if cfg.system_kind == "boost":
        pts = bst.demo_points(1000, cfg.seed)
        quad = quadratic_rule(L, sys_)
        printed = bst.sign_agreement(quad, bst.spi_threshold(cfg.boost, eq), pts)
        derived = bst.sign_agreement(quad, bst.derived_spi_threshold(cfg.boost, eq), pts)
        payload["simplified_rule_agreement"] = {
            "printed": {"fraction": printed.fraction, "mismatches": printed.mismatches},
            "derived": {"fraction": derived.fraction, "mismatches": derived.mismatches},
        }
    return payload


def cmd_synth(cfg, out_dir):
    sys_, eq, L, rules, notes = _pipeline(cfg)
    print(f"P = {L.P.tolist()}  alpha = {L.alpha:.10g} ({'certified' if L.certified else 'sampled'})")
    for k, r in rules.items():
        print(f"{k}: s(x) = {r.formula()}")
    write_json(out_dir, "synth.json", {"command": "synth",
                                       **_synth_payload(cfg, sys_, eq, L, rules, notes)})
    return EXIT_OK


def _x_init(cfg, sys_):
    return cfg.x_init if cfg.x_init is not None else np.zeros(sys_.dim)


def _run_simulations(cfg, sys_, L, rules, out_dir, eq):
    reports = {}
    for kind, rule in rules.items():
        traj = simulate(sys_, rule, L, _x_init(cfg, sys_), cfg.sim)
        rep = descent_monitor(traj, L, sys_, rule)
        write_trajectory_csv(traj, os.path.join(out_dir, f"traj_{kind}.csv"))
        if sys_.dim == 2:
            X = traj.states
            lo = np.minimum(X.min(axis=0), eq.x0)
            hi = np.maximum(X.max(axis=0), eq.x0)
            pad = 0.08 * np.maximum(hi - lo, 1e-9)
            lo, hi = lo - pad, hi + pad
            branches = threshold_polylines(rule, lo, hi)
            write_polylines_csv(branches, os.path.join(out_dir, f"threshold_{kind}.csv"))
            svg = svg_plot(f"{kind} rule", X, branches, eq.x0, bounds=(lo, hi))
            with open(os.path.join(out_dir, f"plot_{kind}.svg"), "w", newline="\n") as fh:
                fh.write(svg)
        reports[kind] = {"samples": len(traj), "final_state": traj.final_state.tolist(),
                         "t_final": traj.t[-1],
                         "events": {k: traj.count(k) for k in
                                    ("crossing", "slide_start", "slide_end", "stop")},
                         "chattering": traj.chattering, "descent": rep.to_dict()}
        print(f"{kind}: {len(traj)} samples, final x = {traj.final_state.tolist()}, "
              f"monotone = {rep.monotone}, reached_stop = {rep.reached_stop}")
    return reports


def cmd_simulate(cfg, out_dir):
    sys_, eq, L, rules, notes = _pipeline(cfg)
    reports = _run_simulations(cfg, sys_, L, rules, out_dir, eq)
    write_json(out_dir, "simulate.json", {"command": "simulate", "equilibrium": eq_dict(eq, sys_),
                                          "lyapunov": lyap_dict(L), "trajectories": reports,
                                          "unavailable_rules": notes})
    return EXIT_OK


def cmd_verify(cfg, out_dir):
    sys_, eq, L, rules, notes = _pipeline(cfg)
    lin = rules.get("linear") or linear_rule(L, sys_, eq)
    if cfg.half_width is not None:
        box = SamplingSpec.around(eq.x0, cfg.half_width, cfg.verify_count, cfg.seed)
    else:
        box = default_box(L, sys_, cfg.verify_count, cfg.seed)
    L_checked = L.with_alpha(L.alpha * cfg.alpha_scale) if cfg.alpha_scale != 1.0 else L
    region = verify_lemmas(L_checked, sys_, eq, lin, box)
    for name, c in region.checks.items():
        tag = ("PASS" if c.passed else "FAIL") if c.gating else ("INFO-" + ("pass" if c.passed else "fail"))
        print(f"{tag} {name} ({c.checked} checked, {c.excluded} excluded) {c.detail}")
        for w in c.witnesses if not c.passed and c.gating else []:
            print(f"     witness x = {w['x']}: {w['note']}")
    sims = _run_simulations(cfg, sys_, L, rules, out_dir, eq)
    ok = region.passed and all(r["descent"]["monotone"] and r["descent"]["w_positive"]
                               and r["descent"]["decay_bound_ok"] for r in sims.values())
    if sys_.dim == 2:
        lines = ["mode,x1,x2"]
        for mode, f in (("minus", sys_.minus), ("plus", sys_.plus)):
            for p in omega_alpha_sphere(L_checked, f(eq.x0)).boundary_points(256):
                lines.append(f"{mode},{float(p[0])!r},{float(p[1])!r}")
        with open(os.path.join(out_dir, "spheres.csv"), "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    write_json(out_dir, "verify.json", {"command": "verify", "passed": ok,
                                        "alpha_scale": cfg.alpha_scale,
                                        "regions": region.to_dict(), "simulations": sims})
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {"equilibrium": cmd_equilibrium, "synth": cmd_synth,
            "simulate": cmd_simulate, "verify": cmd_verify}


def make_parser():
    ap = argparse.ArgumentParser(prog="switchsurf", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="run configuration file")
    ap.add_argument("--out", help="output directory (overrides [output] dir)")
    ap.add_argument("--seed", type=int, help="seed (overrides [run] seed)")
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out_dir = args.out or cfg.out_dir
        os.makedirs(out_dir, exist_ok=True)
        return COMMANDS[args.command](cfg, out_dir)
    except (NoSwitchedEquilibrium, NotASwitchedEquilibrium, NoConvergence) as exc:
        print(f"error: no switched equilibrium: {exc}", file=sys.stderr)
        return EXIT_NO_EQ
    except CQLFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CQLF
    except Divergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ContractViolation, DegenerateError) as exc:
        print(f"error: {exc}\nusage: switchsurf {{equilibrium|synth|simulate|verify}} "
              f"--config PATH [--out DIR] [--seed N]; see the config module docs for keys",
              file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
