"""The acceptance suite: fifteen checks, each returning a Report.

Each check is registered under a short name; ``run_acceptance`` runs the
ones matching a filter and returns reports in a fixed order.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable

import numpy as np

from . import freegroup as fg
from .convexgeom import facets
from .horoboundary import (RaySample, beta_collapse, boundary_census, busemann_from_face, default_run_length,
                           default_window, nonconstancy_check, orbit, product_split_check, variation)
from .lattice import GeneratingSet, LengthOracle, NormSpec, box
from .nctorus.algebra import GOLDEN, AlgebraElement, Cocycle, dual_action, fourier_sup, random_element
from .nctorus.analysis import delta_for, holder_check, modulus_upper
from .nctorus.opnorm import power_iteration
from .nctorus.seminorms import L_ell, a_norm, df_norm, dual_ball_functionals, k_constants
from .report import Report

REL_SLACK = 1e-12


@dataclass
class Context:
    seed: int = 0
    sigma_scale: Fraction = Fraction(1)
    cache: dict = field(default_factory=dict)

    @cached_property
    def suite(self) -> list[AlgebraElement]:
        """100 elements with support radius 3: d = 1 then d = 2, alternating theta = 0 / golden."""
        out = []
        for i in range(100):
            d = 1 if i < 50 else 2
            c = Cocycle.trivial(d) if i % 2 == 0 else Cocycle.rotation(d, GOLDEN)
            out.append(random_element(np.random.default_rng([self.seed, i]), c, 3))
        return out

    def lengths(self, d: int) -> list[tuple[str, LengthOracle, GeneratingSet | None]]:
        key = ("lengths", d)
        if key not in self.cache:
            if d == 1:
                g = GeneratingSet.symmetric([1, 2])
                self.cache[key] = [("norm l1", LengthOracle.norm(NormSpec("l1", 1)), None),
                                   ("word {±1,±2}", LengthOracle.word(g), g)]
            else:
                g = GeneratingSet.symmetric([(1, 0), (0, 1), (1, 1)])
                self.cache[key] = [("norm l1", LengthOracle.norm(NormSpec("l1", 2)), None),
                                   ("norm l2", LengthOracle.norm(NormSpec("l2", 2)), None),
                                   ("word hexagon", LengthOracle.word(g), g)]
        return self.cache[key]

    def L(self, i: int, name: str):
        key = ("L", i, name)
        if key not in self.cache:
            f = self.suite[i]
            oracle = next(o for n, o, _ in self.lengths(f.dim) if n == name)
            self.cache[key] = L_ell(f, oracle)
        return self.cache[key]


CHECKS: list[tuple[str, str, Callable[[Context], Report]]] = []


def check(name: str, title: str):
    def deco(fn):
        CHECKS.append((name, title, fn))
        return fn
    return deco


SUITE_SETS = {
    "{±1,±2}": [1, 2],
    "{±3,±8}": [3, 8],
    "{±e1,±e2}": [(1, 0), (0, 1)],
    "hexagon": [(1, 0), (0, 1), (1, 1)],
}


@check("census-pm1", "two boundary windows for {±1}, phi_k = ±k")
def c01(ctx: Context) -> Report:
    o = LengthOracle.word(GeneratingSet.symmetric([1]))
    window = [(k,) for k in range(-20, 21)]
    census = boundary_census(o, window)
    rep = Report("census-pm1", {"S": "{±1}", "window": "[-20, 20]"})
    rep.results["windows"] = [w.to_json() for w in census]
    rep.check("number of windows", len(census), "==", 2, len(census) == 2)
    expected = [{y: -y[0] for y in window}, {y: y[0] for y in window}]
    got = sorted((w.values for w in census), key=lambda v: v[(1,)])
    rep.check("windows equal phi_k = -k and phi_k = k", [v[(1,)] for v in got], "==", [-1, 1],
              got == expected and all(w.all_stabilized for w in census))
    return rep


def _parity_table(k: int) -> list[int]:
    """Values at (+inf even, +inf odd, -inf even, -inf odd)."""
    if k % 2 == 0:
        return [k // 2, k // 2, -k // 2, -k // 2]
    return [(k - 1) // 2, (k + 1) // 2, -(k + 1) // 2, -(k - 1) // 2]


@check("census-pm1pm2", "four parity windows for {±1,±2}; facet {2} orbit of size 2 fixed by 2")
def c02(ctx: Context) -> Report:
    g = GeneratingSet.symmetric([1, 2])
    o = LengthOracle.word(g)
    window = [(k,) for k in range(-12, 13)]
    census = boundary_census(o, window)
    rep = Report("census-pm1pm2", {"S": "{±1,±2}", "window": "[-12, 12]"})
    rep.results["windows"] = [w.to_json() for w in census]
    rep.check("number of windows", len(census), "==", 4, len(census) == 4)
    table = {tuple(_parity_table(y[0])[j] for y in window) for j in range(4)}
    got = {tuple(w.values[y] for y in window) for w in census}
    rep.check("windows match the parity table", len(got & table), "==", 4, got == table)
    F = next(f for f in facets(g) if f.members == ((2,),))
    rec = orbit(o, F, window)
    rep.results["orbit"] = rec.to_json()
    rep.check("orbit size of facet {2}", len(rec.orbit), "==", 2, len(rec.orbit) == 2 and rec.orbit_complete)
    from .horoboundary import translate_window

    fixed = all(translate_window(w, (2,)).same_as(w) for w in rec.orbit)
    rep.check("translation by 2 fixes each orbit point", fixed, "==", True, fixed)
    return rep


@check("facet-busemann", "facet Busemann points: sigma on G_F, orbit size = index, nonconstancy witnesses")
def c03(ctx: Context) -> Report:
    rep = Report("facet-busemann", {"sets": list(SUITE_SETS), "sigma_scale": str(ctx.sigma_scale)})
    rng = random.Random(ctx.seed)
    for label, half in SUITE_SETS.items():
        g = GeneratingSet.symmetric(half)
        o = LengthOracle.word(g)
        for F in facets(g):
            tag = f"{label} facet {[list(s) for s in F.members]}"
            window = default_window(o, F)
            rl = default_run_length(o, F, window)
            b = busemann_from_face(o, F, window, rl, check=False)
            sub = [u for u in window if F.in_subgroup(u)]
            bad = [u for u in sub if b.values[u] != ctx.sigma_scale * F.sigma_at(u)]
            rep.check(f"{tag}: phi_u(b_F) = sigma_F(u) on G_F in window", len(bad), "==", 0,
                      not bad and b.all_stabilized)
            rec = orbit(o, F, window, rl)
            rep.check(f"{tag}: orbit size = index", len(rec.orbit), "==", F.index,
                      len(rec.orbit) == F.index and rec.orbit_complete)
            r = 10 if g.dim == 1 else 5
            outside = [y for y in box(r, g.dim) if not F.in_subgroup(y)]
            if not outside:
                rep.results[f"{tag}: nonconstancy"] = "G_F is all of Z^d; no y outside"
                continue
            ys = [rng.choice(outside) for _ in range(20)]
            found = 0
            for y in ys:
                try:
                    nonconstancy_check(o, F, y)
                    found += 1
                except Exception as exc:  # noqa: BLE001 - reported as a failed witness
                    rep.diagnostics[f"{tag}: y={y}"] = repr(exc)
            rep.check(f"{tag}: nonconstancy witnesses", found, "==", 20, found == 20)
    return rep


@check("support-bound", "|sigma_F(x)| <= l(x) on word balls, exact")
def c04(ctx: Context) -> Report:
    rep = Report("support-bound", {"sets": list(SUITE_SETS), "radius": {"d=1": 20, "d=2": 10}})
    for label, half in SUITE_SETS.items():
        g = GeneratingSet.symmetric(half)
        o = LengthOracle.word(g)
        r = 20 if g.dim == 1 else 10
        worst = Fraction(0)
        for F in facets(g, with_cosets=False):
            for x in o.ball(r):
                lx = o(x)
                v = abs(ctx.sigma_scale * F.sigma_at(x))
                if lx:
                    worst = max(worst, v / lx)
                elif v:
                    worst = Fraction(10**9)
        rep.check(f"{label}: max |sigma_F(x)| / l(x)", worst, "<=", 1, worst <= 1)
    return rep


@check("sandwich", "||l f||_2 <= L(f) <= ||l f||_1 (1 + 1e-9), monotone traces, 100 random f")
def c05(ctx: Context) -> Report:
    rep = Report("sandwich", {"n": 100, "support_radius": 3, "seed": ctx.seed})
    worst_lo = worst_hi = 0.0
    bad = []
    for i, f in enumerate(ctx.suite):
        for name, _, _ in ctx.lengths(f.dim):
            L = ctx.L(i, name)
            vals = [v for _, v in L.trace]
            mono = all(b >= a * (1 - 1e-9) for a, b in zip(vals, vals[1:]))
            lo_ok = L.lower_companion <= L.value * (1 + REL_SLACK)
            hi_ok = L.value <= L.upper_companion * (1 + 1e-9)
            worst_lo = max(worst_lo, L.lower_companion / L.value if L.value else 0.0)
            worst_hi = max(worst_hi, L.value / L.upper_companion if L.upper_companion else 0.0)
            if not (mono and lo_ok and hi_ok):
                bad.append([i, name])
    rep.results["max ||lf||_2 / L"] = worst_lo
    rep.results["max L / ||lf||_1"] = worst_hi
    rep.check("elements violating the sandwich or monotonicity", bad, "==", [], not bad)
    return rep


@check("delta-length", "L(delta_y) = l(y) within 1e-9 for l(y) <= 6")
def c06(ctx: Context) -> Report:
    rep = Report("delta-length", {"max_length": 6})
    oracles = [
        ("d=1 word {±1,±2}", LengthOracle.word(GeneratingSet.symmetric([1, 2]))),
        ("d=1 norm l1", LengthOracle.norm(NormSpec("l1", 1))),
        ("d=2 word {±e1,±e2}", LengthOracle.word(GeneratingSet.symmetric([(1, 0), (0, 1)]))),
        ("d=2 word hexagon", LengthOracle.word(GeneratingSet.symmetric([(1, 0), (0, 1), (1, 1)]))),
        ("d=2 norm l1", LengthOracle.norm(NormSpec("l1", 2))),
        ("d=2 norm l2", LengthOracle.norm(NormSpec("l2", 2))),
    ]
    for label, o in oracles:
        for theta in (0.0, GOLDEN):
            c = Cocycle.rotation(o.dim, theta) if theta else Cocycle.trivial(o.dim)
            worst = 0.0
            pts = [y for y in o.ball(6) if any(y)]
            for y in pts:
                R = max(8, max(abs(v) for v in y))
                L = L_ell(AlgebraElement.delta(y, c), o, radii=[R, 2 * R])
                worst = max(worst, abs(L.value - float(o(y))))
            rep.check(f"{label}, theta={theta:.6f}: max |L(delta_y) - l(y)| over {len(pts)} points",
                      worst, "<=", 1e-9, worst <= 1e-9)
    return rep


@check("main-inequality", "||df|| <= L(f)(1+1e-3) for norms, <= max k_F L(f)(1+1e-3) for word lengths")
def c07(ctx: Context) -> Report:
    rep = Report("main-inequality", {"n": 100, "tol": 1e-3})
    kmax, kinfo = {}, {}
    for d in (1, 2):
        for name, o, g in ctx.lengths(d):
            if g is None:
                continue
            ks = []
            for F in facets(g):
                kc = k_constants(F, o, orbit(o, F))
                ks.append(kc.k_F)
                kinfo[f"{name} facet {[list(s) for s in F.members]}"] = kc.to_json()
            kmax[name] = max(ks)
    rep.results["k_constants"] = kinfo
    worst: dict[str, tuple] = {}
    failures: dict[str, int] = {}
    for i, f in enumerate(ctx.suite):
        for name, o, g in ctx.lengths(f.dim):
            L = ctx.L(i, name)
            if g is None:
                funcs = dual_ball_functionals(o.norm_spec, samples=16)
                k = Fraction(1)
            else:
                funcs = facets(g, with_cosets=False)
                k = kmax[name]
            df = df_norm(f, funcs, method="faithful", refine_circle=o.norm_spec is not None
                         and o.norm_spec.kind == "l2")
            rhs = float(k) * L.value
            ratio = df.value / rhs if rhs else (0.0 if df.value == 0 else math.inf)
            key = f"d={f.dim} {name}"
            if key not in worst or ratio > worst[key][0]:
                worst[key] = (ratio, i, df.value, L.value, float(k))
            if not df.value <= rhs * (1 + 1e-3):
                failures[key] = failures.get(key, 0) + 1
    for key in sorted(worst):
        ratio, i, dv, Lv, k = worst[key]
        rep.check(f"{key}: worst ||df|| / (k L) (element {i}, k={k:g}, failures {failures.get(key, 0)}/50)",
                  ratio, "<=", 1 + 1e-3, ratio <= 1 + 1e-3)
    return rep


@check("fourier", "a_norm at R=256 vs 4096-point Fourier sup, 20 trig polynomials")
def c08(ctx: Context) -> Report:
    rep = Report("fourier", {"R": 256, "grid": 4096, "n": 20})
    rng = np.random.default_rng([ctx.seed, 8])
    worst = 0.0
    rows = []
    for j in range(20):
        deg = int(rng.integers(1, 6))
        f = AlgebraElement({(n,): complex(rng.normal(), rng.normal()) for n in range(-deg, deg + 1)},
                           Cocycle.trivial(1))
        a = a_norm(f, radii=[256]).value
        s = fourier_sup(f, 4096)
        err = max(abs(a - s), abs(a - s) / s)
        worst = max(worst, err)
        rows.append([deg, a, s])
    rep.results["rows"] = rows
    rep.check("max of absolute and relative disagreement", worst, "<=", 5e-3, worst <= 5e-3)
    return rep


@check("noncommutativity", "delta_e1 * delta_e2 = e^{2 pi i theta} delta_e2 * delta_e1; cocycle identity")
def c09(ctx: Context) -> Report:
    theta = 0.3
    c = Cocycle.rotation(2, theta)
    rep = Report("noncommutativity", {"theta": theta})
    a, b = AlgebraElement.delta((1, 0), c), AlgebraElement.delta((0, 1), c)
    lhs = (a * b)((1, 1))
    rhs = cmath.exp(2j * math.pi * theta) * (b * a)((1, 1))
    rep.check("|delta_e1*delta_e2 - e^{2 pi i theta} delta_e2*delta_e1|", abs(lhs - rhs), "<=", 1e-12,
              abs(lhs - rhs) <= 1e-12)
    rng = np.random.default_rng([ctx.seed, 9])
    c3 = c
    worst = 0.0
    for _ in range(1000):
        x, y, z = (tuple(int(v) for v in rng.integers(-10, 11, size=2)) for _ in range(3))
        xy = tuple(p + q for p, q in zip(x, y))
        yz = tuple(p + q for p, q in zip(y, z))
        worst = max(worst, abs(c3(x, y) * c3(xy, z) - c3(x, yz) * c3(y, z)))
    rep.check("cocycle identity residual over 1000 triples", worst, "<", 1e-12, worst < 1e-12)
    return rep


@check("beta-regime", "beta=0.4 boundary collapse; beta=0.8 Hoelder modulus inequality")
def c10(ctx: Context) -> Report:
    rep = Report("beta-regime", {"beta_small": 0.4, "beta_large": 0.8})
    for p in range(1, 6):
        v = beta_collapse(0.4, p, 10**4)
        rep.check(f"beta=0.4: max |phi_{p}(n)| over [1e4, 2e4]", v, "<=", 0.1, v <= 0.1)
    beta = 0.8
    omega = LengthOracle.norm(NormSpec("l1", 1))
    delta = delta_for(beta, 0.05)
    rep.results["delta(0.05)"] = delta
    hs = np.geomspace(delta * 1e-6, delta, 24)
    worst_m = max(modulus_upper(beta, float(h)) for h in hs)
    rep.check("max m(s,t) over sampled |t-s| <= delta", worst_m, "<=", 0.05, worst_m <= 0.05)
    rng = np.random.default_rng([ctx.seed, 10])
    pairs = [(i / 32, i / 32 + float(h)) for i, h in enumerate(np.geomspace(1e-6, 0.5, 32))]
    fails = 0
    worst = 0.0
    for j in range(10):
        f = random_element(rng, Cocycle.trivial(1), 5)
        L = L_ell(f, omega).value
        for s, t in pairs:
            r = holder_check(f, beta, omega, s, t, L=L, ratio=1.0)
            worst = max(worst, r.lhs / r.rhs if r.rhs else 0.0)
            fails += not r.passed
    rep.results["weight ratio |n|^beta / |n|"] = 1.0
    rep.check("beta=0.8: worst |f^(t)-f^(s)| / (m L) over 10 f x 32 pairs", worst, "<=", 1.0, fails == 0)
    return rep


@check("dual-action", "|L(beta_p f) - L(f)| <= 1e-6 over 50 random (f, p)")
def c11(ctx: Context) -> Report:
    rep = Report("dual-action", {"n": 50})
    rng = np.random.default_rng([ctx.seed, 11])
    worst = 0.0
    for j in range(50):
        d = 1 + j % 2
        c = Cocycle.rotation(d, GOLDEN) if (j // 2) % 2 and d == 2 else Cocycle.trivial(d)
        o = LengthOracle.norm(NormSpec("l1", d))
        f = random_element(rng, c, 3)
        p = rng.random(d)
        radii = [16, 32] if d == 1 else [8, 16]
        a = L_ell(f, o, radii=radii).value
        b = L_ell(dual_action(f, p), o, radii=radii).value
        worst = max(worst, abs(a - b))
    rep.check("max |L(beta_p f) - L(f)|", worst, "<=", 1e-6, worst <= 1e-6)
    return rep


@check("product-split", "phi for l1 on Z^2 splits as the sum over the two factors")
def c12(ctx: Context) -> Report:
    rep = Report("product-split", {"window": "[-4,4]^2"})
    std = LengthOracle.word(GeneratingSet.symmetric([1]))
    l1 = LengthOracle.norm(NormSpec("l1", 2))
    w = [(k,) for k in range(-4, 5)]
    ok = True
    for sx in (1, -1, 0):
        for sy in (1, -1):
            rx = RaySample.integer_ray((sx,), 40)
            ry = RaySample.integer_ray((sy,), 40)
            res = product_split_check(std, std, rx, ry, w, w, 10)
            rep.check(f"rays ({sx}, {sy})", res, "==", True, res)
            ok &= res
    prod = LengthOracle.sum_of(std, std)
    same = all(prod(x) == l1(x) for x in box(8, 2))
    rep.check("sum of standard lengths equals l1 on [-8,8]^2", same, "==", True, same)
    return rep


@check("higson", "V_2 phi_1 >= 1 at 50 points for {±1,±2}")
def c13(ctx: Context) -> Report:
    o = LengthOracle.word(GeneratingSet.symmetric([1, 2]))
    rep = Report("higson", {"S": "{±1,±2}", "r": 2})
    vals = [variation(o, lambda x: o.phi((1,), x), 2, (k,), 10**9) for k in range(1, 51)]
    rep.check("min V_2 phi_1 over k = 1..50", min(vals), ">=", 1, min(vals) >= 1)
    return rep


@check("free-group", "phi on the free group boundary vs prefix limits; separation")
def c14(ctx: Context) -> Report:
    rep = Report("free-group", {"boundary_words": 200, "pairs": 100, "max_x": 4, "prefix": 50})
    rng = random.Random(ctx.seed * 1_000_003 + 14)
    xs = fg.ball(4)
    mism = 0
    for _ in range(200):
        w = fg.random_boundary(rng)
        mism += sum(fg.phi_boundary(x, w) != fg.prefix_limit(x, w, 50) for x in xs)
    rep.check(f"mismatches over 200 words x {len(xs)} elements", mism, "==", 0, mism == 0)
    bad = 0
    n = 0
    while n < 100:
        v, w = fg.random_boundary(rng), fg.random_boundary(rng)
        if v == w:
            continue
        n += 1
        s = fg.separate(v, w)
        bad += not (set(s.values) == {1, -1})
    rep.check("separations without values {1, -1}", bad, "==", 0, bad == 0)
    return rep


@check("power-iteration", "power iteration vs dense SVD on 20 random complex matrices")
def c15(ctx: Context) -> Report:
    rep = Report("power-iteration", {"n": 20, "max_size": 200})
    rng = np.random.default_rng([ctx.seed, 15])
    worst = 0.0
    for size in np.linspace(10, 200, 20).astype(int):
        m = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        pi = power_iteration(m, tol=1e-12)
        sv = float(np.linalg.norm(m, 2))
        worst = max(worst, abs(pi.value - sv) / sv)
    rep.check("max relative difference", worst, "<=", 1e-8, worst <= 1e-8)
    return rep


def run_acceptance(name_filter: str | None = None, seed: int = 0,
                   sigma_scale: Fraction = Fraction(1)) -> list[tuple[int, str, Report]]:
    ctx = Context(seed, Fraction(sigma_scale))
    out = []
    for k, (name, title, fn) in enumerate(CHECKS, start=1):
        if name_filter and (name_filter != str(k) if name_filter.isdigit() else name_filter not in name):
            continue
        out.append((k, name, fn(ctx)))
    return out
