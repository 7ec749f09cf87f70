"""Command-line front end.

Exit codes: 0 pass, 1 assertion failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import annihilation as ann
from . import heat
from .cases import CASES, run_cases
from .charged import ChargedMeasure, lift, phi, tilde_w
from .errors import ArtifactError, ConfigurationError
from .io import _read_json, dump_json, load_measure, load_space, space_from_dict
from .measures import SubProbability, random_subprobability
from .metric_space import validate_metric
from .transport import w_dagger, w_prime, w_star, wasserstein

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

METRICS = ("W", "W~", "W0", "Wflat_upper", "Wsharp_bounds", "Wprime", "Wdagger", "Wstar", "Whattop")


class _Fail(Exception):
    """Raised to exit with the assertion-failure code."""


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(text, name):
    if text is None:
        return None
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"--{name} expects comma-separated numbers") from None


def _check_p(p):
    if p < 1:
        raise ConfigurationError("--p must be >= 1")
    return p


# dist -----------------------------------------------------------------------

def _as_charged(m):
    if isinstance(m, ChargedMeasure):
        return m
    return lift(m)


def _as_sub(m, name):
    if isinstance(m, ChargedMeasure):
        raise ConfigurationError(f"metric {name} needs plain measures, got a charged measure")
    return m


def cmd_dist(args):
    space = load_space(args.space) if args.space else None
    mu = load_measure(args.mu, space)
    nu = load_measure(args.nu, space if space is not None else mu.space)
    p = _check_p(args.p)
    names = [m.strip() for m in args.metric.split(",") if m.strip()]
    bad = [m for m in names if m not in METRICS]
    if bad:
        raise ConfigurationError(f"unknown metric(s) {bad}; choose from {list(METRICS)}")
    result = {"p": p}
    for name in names:
        if name in ("W~", "Whattop"):
            s, t = _as_charged(mu), _as_charged(nu)
            if name == "W~":
                result[name] = tilde_w(s, t, p)
            else:
                g = s.space.doubling
                result[name] = wasserstein(g.dist, phi(s, g), phi(t, g), p)[0]
            continue
        a, b = _as_sub(mu, name), _as_sub(nu, name)
        if name == "W":
            result[name] = wasserstein(a.space.dist, a, b, p)[0]
        elif name == "W0":
            val, wit = ann.w0(a, b, p)
            result[name] = val
            result["witness"] = {"rho": wit.rho.weights.tolist(), "eta": wit.eta.weights.tolist()}
        elif name == "Wflat_upper":
            result[name] = ann.w_flat_upper(a, b, p, args.strategy, m=args.steps)[0]
        elif name == "Wsharp_bounds":
            lo, hi = ann.w_sharp_bounds(a, b, p)
            result["bounds"] = {"lower": lo, "upper": hi}
        elif name == "Wprime":
            result[name] = w_prime(a, b, p)
        elif name == "Wdagger":
            result[name] = w_dagger(a, b, p)
        elif name == "Wstar":
            result[name] = w_star(a, b, p)
    if "W0" in result:
        result["value"] = result["W0"]
    _emit(dump_json(result), args.out)
    return EXIT_OK


# heat-based commands ---------------------------------------------------------

def _system(spec, default):
    d = default if spec is None else _read_json(spec)[0]
    d = dict(d)
    if "interval" in d and isinstance(d["interval"], dict):
        d = {"builder": "interval", **d["interval"]}
    if d.get("builder") != "interval":
        raise ConfigurationError("heat commands need an interval space {'builder': 'interval', 'a', 'b', 'n_points'}")
    try:
        return heat.build_interval_system(float(d["a"]), float(d["b"]), int(d["n_points"]))
    except KeyError as exc:
        raise ConfigurationError(f"interval description lacks {exc}") from None


def cmd_flow(args):
    sys_ = _system(args.space, {"builder": "interval", "a": 0.0, "b": 1.0, "n_points": 101})
    mu = load_measure(args.mu, sys_.space)
    times = _floats(args.t, "t") or [0.0]
    out = []
    for t in times:
        if isinstance(mu, ChargedMeasure):
            st = heat.charged_flow(mu, t, sys_)
            out.append({"t": t, "flavor": "charged", "plus": st.plus.weights.tolist(), "minus": st.minus.weights.tolist()})
        else:
            m = heat.apply_measure_flow(sys_, mu, t, args.flavor)
            out.append({"t": t, "flavor": args.flavor, "weights": m.weights.tolist(), "mass": m.mass})
    _emit(dump_json({"states": out}), args.out)
    return EXIT_OK


def _load_config(path):
    if path is None:
        return {}
    cfg, _ = _read_json(path)
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    return cfg


def _instances(cfg, args, space, rng):
    spec = cfg.get("instances", {"random": args.instances})
    if isinstance(spec, dict) and "random" in spec:
        return [(random_subprobability(space, rng), random_subprobability(space, rng)) for _ in range(int(spec["random"]))]
    pairs = []
    for item in spec:
        mu = SubProbability(space, np.asarray(item["mu"], dtype=float))
        nu = SubProbability(space, np.asarray(item["nu"], dtype=float))
        pairs.append((mu, nu))
    return pairs


def _times(cfg, args, default):
    if args.t is not None:
        times = _floats(args.t, "t")
    else:
        times = [float(t) for t in cfg.get("times", default)]
    if any(t < 0 for t in times) or times != sorted(times):
        raise ConfigurationError("times must be >= 0 and sorted")
    return times


def _csv(rows, extra_name=None):
    head = "t,quantity,bound,violation,claim"
    if extra_name:
        head += f",{extra_name}"
    lines = [head]
    for row, extra in rows:
        line = f"{row.t!r},{row.quantity!r},{row.bound!r},{row.violation!r},{row.claim}"
        if extra_name:
            line += f",{extra}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def cmd_contract(args):
    cfg = _load_config(args.config)
    sys_ = _system(args.space if args.space else cfg.get("system"), {"builder": "interval", "a": 0.0, "b": 1.0, "n_points": 401})
    p = _check_p(args.p if args.p is not None else float(cfg.get("p", 1.0)))
    K = args.K if args.K is not None else float(cfg.get("K", 0.0))
    times = _times(cfg, args, [0.0, 0.05, 0.1, 0.2, 0.4])
    rng = np.random.default_rng(args.seed if args.seed is not None else int(cfg.get("seed", 0)))
    tol = args.tolerance if args.tolerance is not None else 1e-6
    rows, worst = [], 0.0
    for k, (mu, nu) in enumerate(_instances(cfg, args, sys_.space, rng)):
        if not times:
            break
        table = heat.contraction_experiment(mu, nu, p, times, sys_, K=K, tol=tol)
        rows += [(r, k) for r in table.rows]
        worst = max(worst, table.max_violation)
    _emit(_csv(rows, "instance"), args.out)
    if worst > tol:
        raise _Fail(f"contraction violated by {worst!r} > {tol!r}")
    return EXIT_OK


def cmd_bochner(args):
    cfg = _load_config(args.config)
    sys_ = _system(args.space if args.space else cfg.get("system"), {"builder": "interval", "a": 0.0, "b": float(np.pi), "n_points": 401})
    p = _check_p(args.p if args.p is not None else float(cfg.get("p", 2.0)))
    K = args.K if args.K is not None else float(cfg.get("K", 0.0))
    times = _times(cfg, args, [0.0, 0.01, 0.1, 1.0])
    modes = [int(m) for m in (_floats(args.modes, "modes") or cfg.get("modes", [1, 2, 3]))]
    tol = args.tolerance if args.tolerance is not None else 5 * sys_.mesh
    x = sys_.space.coords
    a, b = x[0], x[-1]
    rows = []
    for k in modes:
        f = np.sin(k * np.pi * (x - a) / (b - a))
        f[[0, -1]] = 0.0
        for t in times:
            r = heat.gradient_estimate_check(f, t, p, K, sys_)
            rows.append((heat.ExperimentRow(t, r.max_violation, 0.0, max(r.max_violation, 0.0), f"gradient-estimate-mode-{k}"), None))
        if times and 1 <= p <= 2:
            br = heat.bochner_check(f, np.ones_like(x), p, K, sys_)
            rows.append((heat.ExperimentRow(0.0, br.lhs, br.rhs, max(br.rhs - br.lhs, 0.0), f"bochner-mode-{k}"), None))
    _emit(_csv(rows), args.out)
    worst = max((r.violation for r, _ in rows), default=0.0)
    if worst > tol:
        raise _Fail(f"gradient/Bochner violation {worst!r} > {tol!r}")
    return EXIT_OK


def _random_charged(space, rng):
    n = space.n
    plus, minus = rng.random(n) + 0.05, rng.random(n) + 0.05
    Z = list(space.boundary)
    minus[Z] = plus[Z]
    s = plus.sum() + minus.sum()
    return ChargedMeasure.from_weights(space, plus / s, minus / s)


def cmd_evi(args):
    cfg = _load_config(args.config)
    sys_ = _system(args.space if args.space else cfg.get("system"), {"builder": "interval", "a": 0.0, "b": 1.0, "n_points": 51})
    K = args.K if args.K is not None else float(cfg.get("K", 0.0))
    times = _times(cfg, args, [0.0, 0.001, 0.002, 0.005, 0.01, 0.02])
    rng = np.random.default_rng(args.seed if args.seed is not None else int(cfg.get("seed", 0)))
    sigma = load_measure(args.mu, sys_.space) if args.mu else _random_charged(sys_.space, rng)
    tau = load_measure(args.nu, sys_.space) if args.nu else _random_charged(sys_.space, rng)
    sigma, tau = _as_charged(sigma), _as_charged(tau)
    table = heat.evi_residual(sigma, tau, times, K, sys_)
    _emit(_csv([(r, None) for r in table.rows]), args.out)
    if args.tolerance is not None and table.max_violation > args.tolerance:
        raise _Fail(f"EVI residual {table.max_violation!r} > {args.tolerance!r}")
    return EXIT_OK


# checks ---------------------------------------------------------------------

def cmd_paper_examples(args):
    only = None
    if args.only:
        only = {s.strip() for s in args.only.split(",") if s.strip()}
        unknown = only - {c.id for c in CASES}
        if unknown:
            raise ConfigurationError(f"unknown case id(s) {sorted(unknown)}")
    results = run_cases(only, args.tolerance)
    lines = [r.line() for r in results]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} passed")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


def cmd_validate(args):
    space = load_space(args.space)
    report = validate_metric(space)
    lines = report.lines()
    for name in ("mu", "nu"):
        spec = getattr(args, name)
        if spec:
            try:
                m = load_measure(spec, space)
                if isinstance(m, SubProbability):
                    m.require_interior(0.0)
            except ArtifactError as exc:
                lines.append(f"{name}: {exc}")
    lines.append("valid" if not lines else f"{len(lines)} violation(s)")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if lines == ["valid"] else EXIT_FAIL


# parser ---------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, measures=True):
        p.add_argument("--space", help="space JSON (path or inline)")
        if measures:
            p.add_argument("--mu", help="measure JSON")
            p.add_argument("--nu", help="measure JSON")
        p.add_argument("--out", help="write output to this file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tolerance", type=float, default=None)

    d = sub.add_parser("dist", help="compute distances between two measures")
    common(d)
    d.add_argument("--p", type=float, default=1.0)
    d.add_argument("--metric", default="W0,Wprime", help=f"comma list from {','.join(METRICS)}")
    d.add_argument("--strategy", default="boundary", choices=["boundary", "direct"])
    d.add_argument("--steps", type=int, default=16, help="chain steps per half for Wflat_upper")
    d.set_defaults(func=cmd_dist)

    f = sub.add_parser("flow", help="heat flow of a measure on an interval")
    common(f)
    f.add_argument("--t", help="comma list of times")
    f.add_argument("--flavor", default="neumann", choices=["neumann", "dirichlet"])
    f.set_defaults(func=cmd_flow)

    for name, func, help_ in (
        ("contract", cmd_contract, "w0 contraction under the Dirichlet flow"),
        ("bochner", cmd_bochner, "gradient-estimate and Bochner reports"),
        ("evi", cmd_evi, "EVI residual along the charged heat flow"),
    ):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--K", type=float, default=None)
        p.add_argument("--t", help="comma list of times")
        if name == "contract":
            p.add_argument("--instances", type=int, default=3)
        if name == "bochner":
            p.add_argument("--modes", help="comma list of sine modes")
        p.set_defaults(func=func)

    e = sub.add_parser("paper-examples", help="run the built-in reference cases")
    e.add_argument("--only", help="comma list of case ids")
    e.add_argument("--tolerance", type=float, default=None)
    e.add_argument("--out")
    e.set_defaults(func=cmd_paper_examples)

    v = sub.add_parser("validate", help="check space and measure invariants")
    common(v)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command in ("dist",) and not (args.mu and args.nu):
            raise ConfigurationError("dist needs --mu and --nu")
        if args.command == "validate" and not args.space:
            raise ConfigurationError("validate needs --space")
        return args.func(args)
    except _Fail as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ArtifactError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
