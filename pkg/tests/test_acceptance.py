"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``.
"""

import json
import os
import sys
import time

import numpy as np
import pytest

from artifact.annihilation import w0, w0_nine_term, w0_rep_p1, w_flat_upper, w_sharp_bounds
from artifact.cases import grid_pm1, grid_pm3, remark_eps_measure, zigzag
from artifact.charged import ChargedMeasure, charged_entropy, effective, entropy, phi, psi, tilde_w, total
from artifact.heat import (
    apply_measure_flow,
    approx_dirichlet_form,
    bochner_check,
    build_glued_system,
    build_interval_system,
    charged_flow,
    contraction_experiment,
    glued_direct_apply,
    glued_form_split,
    glued_semigroup_apply,
    gradient_estimate_check,
)
from artifact.measures import DiscreteMeasure, SubProbability, random_subprobability
from artifact.metric_space import interval
from artifact.transport import annihilation_cost, w_prime, w_prime_zero

REFERENCE = os.path.join(os.path.dirname(__file__), "data", "bochner_reference.json")

CRITERIA = {}


def criterion(num, title):
    def wrap(fn):
        CRITERIA[num] = (title, fn)
        return fn
    return wrap


def sparse_pairs(X, count, seed, mass=(0.1, 1.0)):
    rng = np.random.default_rng(seed)
    Y = X.interior
    out = []
    for _ in range(count):
        pair = []
        for _ in range(2):
            w = np.zeros(X.n)
            idx = rng.choice(Y, size=rng.integers(1, 8), replace=False)
            w[idx] = rng.random(idx.size) + 1e-3
            w *= rng.uniform(*mass) / w.sum()
            pair.append(SubProbability(X, w))
        out.append(pair)
    return out


@criterion(1, "opposite atoms on (-3, 3): w0 = 4 and w0 to zero = 1, p in {1, 2}")
def crit_opposite_atoms():
    X = grid_pm3()
    mu = SubProbability.dirac(X, X.index_of(-2.0))
    nu = SubProbability.dirac(X, X.index_of(2.0))
    zero = SubProbability.zero(X)
    err, slowest = 0.0, 0.0
    for p in (1.0, 2.0):
        for other, want in ((nu, 4.0), (zero, 1.0)):
            t0 = time.perf_counter()
            err = max(err, abs(w0(mu, other, p)[0] - want))
            slowest = max(slowest, time.perf_counter() - t0)
    return err <= 1e-9 and slowest < 5.0, f"max error {err:.2e}, slowest {slowest:.2f}s"


@criterion(2, "Diracs on (-1, 1): w0 = |x-y|, W' = min(|x-y|, 2-|x-y|)")
def crit_interval_diracs():
    X = grid_pm1()
    rng = np.random.default_rng(2)
    err = 0.0
    for _ in range(20):
        i, j = rng.choice(X.interior, 2, replace=False)
        x, y = X.coords[i], X.coords[j]
        mu, nu = SubProbability.dirac(X, i), SubProbability.dirac(X, j)
        for p in (1.0, 2.0):
            err = max(err, abs(w0(mu, nu, p)[0] - abs(x - y)))
            err = max(err, abs(w_prime(mu, nu, p) - min(abs(x - y), 2 - abs(x - y))))
    return err <= 1e-9, f"max error {err:.2e} over 20 pairs"


@criterion(3, "zig-zag n=1, p=2: w0 <= 1/3 < W' = 3^-1/2, W~^2 = 1/9")
def crit_zigzag():
    mu, nu, sigma, tau = zigzag(1)
    a = w0(mu, nu, 2.0)[0]
    b = w_prime(mu, nu, 2.0)
    c = tilde_w(sigma, tau, 2.0) ** 2
    ok = a <= 1 / 3 + 1e-9 and abs(b - 3 ** -0.5) <= 1e-9 and a < b and abs(c - 1 / 9) <= 1e-9
    return ok, f"w0={a:.10f} W'={b:.10f} W~^2={c:.10f}"


@criterion(4, "annihilation cost of (d_1 + d_eps)/2 on (0, 2), ratio sweep")
def crit_eps():
    _, mu = remark_eps_measure(0.1)
    a = w_prime_zero(mu, 2.0) ** 2
    b = annihilation_cost(mu, 2.0)
    ratios = []
    for eps in (0.1, 0.01, 0.001):
        _, m = remark_eps_measure(eps)
        ratios.append(annihilation_cost(m, 2.0) / w_prime_zero(m, 2.0))
    gaps = [r - 2 ** -0.5 for r in ratios]
    monotone = all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:])) and gaps[-1] >= 0
    ok = abs(a - 0.505) <= 1e-9 and abs(b - 0.55) <= 1e-9 and monotone
    return ok, f"W'^2={a:.12f} W*={b:.12f} ratios={[round(r, 6) for r in ratios]}"


@criterion(5, "oracle equivalence: split representation and nine-block LP vs w0")
def crit_oracles():
    worst_rep = 0.0
    for a, b in sparse_pairs(grid_pm1(), 50, 5):
        w = w0(a, b, 1.0)[0]
        worst_rep = max(worst_rep, abs(w0_rep_p1(a, b) - w) / max(w, 1e-12))
    worst_nine = 0.0
    for a, b in sparse_pairs(interval(-1.0, 1.0, 81), 20, 6):
        for p in (1.0, 2.0):
            w = w0(a, b, p)[0]
            worst_nine = max(worst_nine, abs(w0_nine_term(a, b, p) - w) / max(w, 1e-12))
    return worst_rep <= 1e-7 and worst_nine <= 1e-7, f"rel gaps: split {worst_rep:.1e}, nine-block {worst_nine:.1e}"


@criterion(6, "annihilation cost bounds 2^(-1+1/p) W'(mu,0) <= W*(mu) <= W'(mu,0)")
def crit_annihilation_bounds():
    X = grid_pm1()
    worst, eq_gap = np.inf, 0.0
    for a, _ in sparse_pairs(X, 50, 7):
        for p in (1.0, 1.5, 2.0, 3.0):
            up = w_prime_zero(a, p)
            val = annihilation_cost(a, p)
            worst = min(worst, val - 2 ** (-1 + 1 / p) * up, up - val)
            if p == 1.0:
                eq_gap = max(eq_gap, abs(val - up))
    return worst >= -1e-12 and eq_gap <= 1e-10, f"min slack {worst:.2e}, p=1 gap {eq_gap:.1e}"


@criterion(7, "boundary chain reaches W'_1; W'_1 <= w0 and nondegenerate bounds on zig-zags")
def crit_flat():
    X = interval(-1.0, 1.0, 21)
    gap = 0.0
    for a, b in sparse_pairs(X, 20, 8, mass=(0.5, 1.0)):
        gap = max(gap, abs(w_flat_upper(a, b, 1.0, "boundary", m=64)[0] - w_prime(a, b, 1.0)))
    order = True
    for n in (1, 2, 3):
        mu, nu, _, _ = zigzag(n)
        lo, hi = w_sharp_bounds(mu, nu, 2.0)
        order &= lo <= w0(mu, nu, 2.0)[0] + 1e-9 and lo < hi - 1e-6
    return gap <= 1e-3 and order, f"max chain gap {gap:.1e}, zig-zag ordering {'ok' if order else 'broken'}"


@criterion(8, "glued semigroup equals the heat flow of the doubling; form identity")
def crit_glued():
    base = build_interval_system(0.0, 1.0, 101)
    gsys = build_glued_system(base)
    g = gsys.space
    rng = np.random.default_rng(8)
    gap, res = 0.0, 0.0
    for t in (0.01, 0.1, 1.0):
        for _ in range(20):
            u, v = rng.standard_normal(g.n), rng.standard_normal(g.n)
            gap = max(gap, np.abs(glued_semigroup_apply(base, u, t, g) - glued_direct_apply(gsys, u, t)).max())
            res = max(res, abs(approx_dirichlet_form(gsys, u, v, t) - glued_form_split(base, u, v, t, g)))
    return gap <= 1e-9 and res <= 1e-9, f"semigroup gap {gap:.1e}, form residual {res:.1e}"


@criterion(9, "charged flow: effective/total identities, Phi/Psi round trip, entropy constant")
def crit_charged():
    sys_ = build_interval_system(0.0, 1.0, 101)
    X = sys_.space
    rng = np.random.default_rng(9)
    flow_gap, trip, ent = 0.0, 0.0, 0.0
    for _ in range(5):
        plus, minus = rng.random(X.n), rng.random(X.n)
        minus[list(X.boundary)] = plus[list(X.boundary)]
        s = plus.sum() + minus.sum()
        sigma = ChargedMeasure.from_weights(X, plus / s, minus / s)
        for t in (0.01, 0.1, 1.0):
            st = charged_flow(sigma, t, sys_)
            e = apply_measure_flow(sys_, effective(sigma).weights, t, "dirichlet")
            tt = apply_measure_flow(sys_, total(sigma).weights, t, "neumann")
            flow_gap = max(flow_gap, np.abs(effective(st).weights - e).max(), np.abs(total(st).weights - tt).max())
        back = psi(phi(sigma))
        trip = max(trip, np.abs(back.plus.weights - sigma.plus.weights).max(), np.abs(back.minus.weights - sigma.minus.weights).max())
        h = rng.random(X.doubling.n)
        h = DiscreteMeasure(X.doubling, h / h.sum())
        trip = max(trip, np.abs(phi(psi(h)).weights - h.weights).max())
        ent = max(ent, abs(charged_entropy(psi(h)) - entropy(h) - np.log(0.5)))
    ok = flow_gap <= 1e-10 and trip <= 1e-12 and ent <= 1e-10
    return ok, f"flow {flow_gap:.1e}, round trip {trip:.1e}, entropy {ent:.1e}"


@criterion(10, "w0 contraction under the Dirichlet flow on a 401-point interval, K=0")
def crit_contraction():
    sys_ = build_interval_system(0.0, 1.0, 401)
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        mu = random_subprobability(sys_.space, rng, density=0.1)
        nu = random_subprobability(sys_.space, rng, density=0.1)
        tab = contraction_experiment(mu, nu, 1.0, [0.0, 0.05, 0.1, 0.2, 0.4], sys_, K=0.0, tol=1e-6)
        worst = max(worst, tab.max_violation)
    elapsed = time.perf_counter() - t0
    return worst <= 1e-6 and elapsed < 120, f"max violation {worst:.1e}, {elapsed:.1f}s"


@criterion(11, "semigroup axioms: symmetry, semigroup law, Markov, mass, p0 <= p")
def crit_axioms():
    rng = np.random.default_rng(11)
    sys_ = build_interval_system(-1.0, 2.0, 61)
    w = sys_.weights
    worst = 0.0
    for _ in range(5):
        s, t = rng.uniform(0, 0.5, 2)
        for flavor in ("neumann", "dirichlet"):
            P = sys_.kernel(s + t, flavor)
            worst = max(worst, np.abs(w[:, None] * P - (w[:, None] * P).T).max())
            worst = max(worst, np.abs(sys_.kernel(s, flavor) @ sys_.kernel(t, flavor) - P).max())
            worst = max(worst, -P.min(), P.sum(axis=1).max() - 1)
        worst = max(worst, np.abs(sys_.kernel(s + t).sum(axis=1) - 1).max())
        worst = max(worst, (sys_.kernel(s + t, "dirichlet") - sys_.kernel(s + t)).max())
        f = rng.random(sys_.n)
        masses = [apply_measure_flow(sys_, f, r, "dirichlet").sum() for r in (0.0, s, s + t)]
        worst = max(worst, masses[1] - masses[0], masses[2] - masses[1])
    return worst <= 1e-10, f"max defect {worst:.1e}"


def bochner_values():
    sys_ = build_interval_system(0.0, np.pi, 401)
    x = sys_.space.coords
    out = {"mesh": sys_.mesh, "gradient": {}, "bochner": {}}
    for k in (1, 2, 3):
        f = np.sin(k * x)
        f[[0, -1]] = 0.0
        out["gradient"][str(k)] = [
            gradient_estimate_check(f, t, 2.0, 0.0, sys_).max_violation for t in (0.0, 0.01, 0.1, 1.0)
        ]
        out["bochner"][str(k)] = bochner_check(f, np.ones_like(x), 2.0, 0.0, sys_).residual
    return out


@criterion(12, "gradient estimate and Bochner residual for Dirichlet modes on [0, pi]")
def crit_bochner():
    vals = bochner_values()
    h = vals["mesh"]
    grad = max(max(v) for v in vals["gradient"].values())
    boch = min(vals["bochner"].values())
    ok = grad <= 5 * h and boch >= -5 * h
    with open(REFERENCE) as fh:
        ref = json.load(fh)
    locked = np.allclose(ref["bochner"], [vals["bochner"][k] for k in sorted(vals["bochner"])], rtol=1e-8)
    locked &= np.allclose(ref["gradient"], [vals["gradient"][k] for k in sorted(vals["gradient"])], rtol=1e-6, atol=1e-10)
    return ok and locked, f"max gradient violation {grad:.1e}, min Bochner residual {boch:.3g}, 5*mesh {5 * h:.1e}, locked {locked}"


def _line(num, ok, title, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} ({detail})"


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    title, fn = CRITERIA[num]
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, ok, title, detail))
    assert ok, detail


def write_reference():
    vals = bochner_values()
    ref = {
        "gradient": [vals["gradient"][k] for k in sorted(vals["gradient"])],
        "bochner": [vals["bochner"][k] for k in sorted(vals["bochner"])],
    }
    with open(REFERENCE, "w") as fh:
        json.dump(ref, fh, indent=2)


if __name__ == "__main__":
    if "--write-reference" in sys.argv:
        write_reference()
        sys.exit(0)
    failed = 0
    for num in sorted(CRITERIA):
        title, fn = CRITERIA[num]
        ok, detail = fn()
        failed += not ok
        print(_line(num, ok, title, detail), flush=True)
    sys.exit(1 if failed else 0)
