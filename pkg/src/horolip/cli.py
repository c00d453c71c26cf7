"""Command-line entry points.

Every command builds a Report and writes it as JSON (plus CSV tables where
useful) to ``--out`` or prints it.  Exit codes: 0 pass, 1 an assertion
failed, 2 configuration error, 3 a convergence or sampling budget ran out.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import freegroup as fg
from .acceptance import CHECKS, run_acceptance
from .convexgeom import enumerate_faces, facets, support_bound_check
from .errors import (BudgetError, InsufficientDataError, InsufficientSampleError, InvariantViolation,
                     PreconditionError, WindowExhaustedError)
from .horoboundary import (boundary_census, busemann_from_face, default_run_length, default_window,
                           nonconstancy_check, orbit)
from .lattice import box, length_table_rows
from .nctorus.algebra import AlgebraElement, Cocycle, dual_action
from .nctorus.analysis import radius_probe
from .nctorus.seminorms import (L_ell, a_norm, dual_ball_functionals, k_constants,
                                main_inequality_check)
from .report import Report, RunConfig, dumps, write_csv, write_json

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("horolip")


def _cocycle(cfg: RunConfig, dim: int) -> Cocycle:
    if cfg.theta is None:
        return Cocycle.trivial(dim)
    c = Cocycle(tuple(map(tuple, cfg.theta)))
    if c.dim != dim:
        raise PreconditionError(f"theta is {c.dim}x{c.dim} but the length lives on Z^{dim}")
    return c


def cmd_length_table(cfg: RunConfig) -> tuple[Report, dict]:
    o = cfg.oracle()
    radius = int(cfg.extra.get("radius", 10))
    rows = length_table_rows(o, radius)
    rep = Report("length-table", {"config": cfg.to_json(), "radius": radius, "oracle": repr(o)})
    rep.results["table"] = [{"x": list(x), "length": v} for x, v in rows]
    origin = [v for x, v in rows if not any(x)]
    rep.check("length of the origin", origin[0] if origin else None, "==", 0, origin == [0])
    return rep, {"length_table.csv": (["x", "length"], [[list(x), v] for x, v in rows])}


def cmd_facets(cfg: RunConfig) -> tuple[Report, dict]:
    o = cfg.oracle()
    g = o.generating_set
    if g is None:
        raise PreconditionError("facets needs a generating_set")
    faces = enumerate_faces(g)
    rep = Report("facets", {"config": cfg.to_json()})
    rep.results["faces"] = [F.to_json() for F in faces]
    radius = int(cfg.extra.get("radius", 20 if g.dim == 1 else 10))
    for F in faces:
        if F.is_facet:
            ok = support_bound_check(F, o, radius)
            rep.check(f"|sigma_F(x)| <= l(x) on the word ball of radius {radius}, facet "
                      f"{[list(s) for s in F.members]}", ok, "==", True, ok)
    rows = [[[list(s) for s in F.members], F.is_facet, [str(c) for c in F.sigma], F.index,
             [list(q) for q in F.coset_reps or ()]] for F in faces]
    return rep, {"facets.csv": (["members", "is_facet", "sigma", "index", "coset_reps"], rows)}


def cmd_boundary(cfg: RunConfig) -> tuple[Report, dict]:
    o = cfg.oracle()
    g = o.generating_set
    if g is None:
        raise PreconditionError("boundary needs a generating_set")
    rep = Report("boundary", {"config": cfg.to_json()})
    rng = random.Random(cfg.seed)
    records = {}
    for F in facets(g):
        tag = f"facet {[list(s) for s in F.members]}"
        window = default_window(o, F, cfg.window_radius)
        rl = cfg.run_length or default_run_length(o, F, window)
        b = busemann_from_face(o, F, window, rl)
        rec = orbit(o, F, window, rl)
        records[tag] = {"busemann": b.to_json(), "orbit": rec.to_json(), "run_length": rl}
        rep.check(f"{tag}: orbit size equals the index", len(rec.orbit), "==", F.index,
                  len(rec.orbit) == F.index and rec.orbit_complete)
        sub = [u for u in window if F.in_subgroup(u)]
        bad = [list(u) for u in sub if b.values[u] != F.sigma_at(u)]
        rep.check(f"{tag}: phi_u(b_F) = sigma_F(u) on the face subgroup", len(bad), "==", 0, not bad)
        outside = [y for y in box(cfg.window_radius, g.dim) if not F.in_subgroup(y)]
        if outside:
            y = rng.choice(outside)
            w = nonconstancy_check(o, F, y)
            records[tag]["nonconstancy"] = {"y": list(y), "s": list(w.s), "value_at_b": w.value_at_b,
                                            "value_at_translate": w.value_at_translate}
    rep.results["facets"] = records
    census_window = box(int(cfg.extra["census_radius"]), g.dim) if "census_radius" in cfg.extra else None
    census = boundary_census(o, census_window, cfg.run_length)
    rep.results["census"] = [w.to_json() for w in census]
    rep.results["census_size"] = len(census)
    if "expected_census" in cfg.extra:
        exp = int(cfg.extra["expected_census"])
        rep.check("census size", len(census), "==", exp, len(census) == exp)
    return rep, {}


def _load_element(cfg: RunConfig, path: str | None, dim: int) -> AlgebraElement:
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise PreconditionError(f"cannot read element {path}: {exc}") from None
    elif "element" in cfg.extra:
        data = cfg.extra["element"]
    else:
        raise PreconditionError("seminorm needs an element (--element or config 'element')")
    f = AlgebraElement.from_json(data)
    if cfg.theta is not None or "cocycle" not in data:
        f = AlgebraElement(f.coeffs, _cocycle(cfg, f.dim))
    if f.dim != dim:
        raise PreconditionError(f"element lives on Z^{f.dim} but the length on Z^{dim}")
    return f


def cmd_seminorm(cfg: RunConfig, element: str | None = None) -> tuple[Report, dict]:
    o = cfg.oracle()
    f = _load_element(cfg, element, o.dim)
    tol = cfg.truncation_tol
    rep = Report("seminorm", {"config": cfg.to_json(), "element": f.to_json()})
    L = L_ell(f, o, tol=tol)
    A = a_norm(f, tol=tol)
    rep.results["L"] = L.to_json()
    rep.results["norm"] = A.to_json()
    rep.check("||l f||_2 <= L(f)", L.lower_companion, "<=", L.value,
              L.lower_companion <= L.value * (1 + 1e-12))
    rep.check("L(f) <= ||l f||_1", L.value, "<=", L.upper_companion,
              L.value <= L.upper_companion * (1 + 1e-9))
    if o.generating_set is not None:
        ks = {}
        for F in facets(o.generating_set):
            kc = k_constants(F, o, orbit(o, F))
            ks[str([list(s) for s in F.members])] = kc
        k = max(kc.k_F for kc in ks.values())
        rep.results["k_constants"] = ks
        funcs = facets(o.generating_set, with_cosets=False)
    else:
        k = Fraction(1)
        funcs = dual_ball_functionals(o.norm_spec)
    ineq = main_inequality_check(f, o, funcs, k=float(k), tol=tol, L=L, method="faithful",
                                 refine_circle=o.norm_spec is not None and o.norm_spec.kind == "l2")
    rep.results["differential"] = ineq.to_json()
    rep.check(f"||df|| <= k L(f) (1 + tol), k = {k}", ineq.lhs, "<=", ineq.rhs * (1 + tol), ineq.passed)
    p = np.random.default_rng(cfg.seed).random(f.dim)
    moved = L_ell(dual_action(f, p), o, tol=tol, radii=[t[0] for t in L.trace]).value
    rep.results["dual_action"] = {"p": p.tolist(), "L_moved": moved}
    rep.check("|L(beta_p f) - L(f)|", abs(moved - L.value), "<=", 1e-6, abs(moved - L.value) <= 1e-6)
    rows = [["L", R, v] for R, v in L.trace] + [["norm", R, v] for R, v in A.trace]
    if not L.converged:
        rep.diagnostics["warning"] = "L truncation did not reach the tolerance; value is a lower bound"
    return rep, {"seminorm_trace.csv": (["quantity", "R", "value"], rows)}


def cmd_radius(cfg: RunConfig) -> tuple[Report, dict]:
    o = cfg.oracle()
    c = _cocycle(cfg, o.dim)
    support = int(cfg.extra.get("support_radius", 2))
    n = int(cfg.extra.get("samples", 20))
    pr = radius_probe(o, c, support, n, seed=cfg.seed, R_max=cfg.extra.get("R_max"))
    rep = Report("radius", {"config": cfg.to_json(), "support_radius": support, "samples": n})
    rep.results["probe"] = pr.to_json()
    rep.check("least nonzero length >= 1 / (2 radius)", pr.min_length, ">=", 1 / (2 * pr.value),
              pr.consistent)
    return rep, {}


def cmd_freegroup(cfg: RunConfig) -> tuple[Report, dict]:
    rng = random.Random(cfg.seed)
    words = cfg.extra.get("words") or [fg.random_reduced(rng, rng.randint(0, 4)) for _ in range(5)]
    points = [fg.BoundaryWord.parse(s) for s in cfg.extra.get("boundary", [])]
    points = points or [fg.random_boundary(rng) for _ in range(4)]
    n = int(cfg.extra.get("prefix_length", 50))
    rep = Report("freegroup", {"config": cfg.to_json(), "words": words, "boundary": [str(w) for w in points]})
    values = []
    for x in words:
        for w in points:
            v, lim = fg.phi_boundary(x, w), fg.prefix_limit(x, w, n)
            values.append({"x": x, "w": str(w), "phi": v, "prefix_limit": lim})
            rep.check(f"phi_{x or 'e'}({w}) against the prefix limit", v, "==", lim, v == lim)
    rep.results["phi"] = values
    seps = []
    for i, v in enumerate(points):
        for w in points[i + 1:]:
            if v == w:
                continue
            s = fg.separate(v, w)
            seps.append({"v": str(v), "w": str(w), **s.to_json()})
            rep.check(f"separate({v}, {w}) gives values 1 and -1", list(s.values), "==", [1, -1],
                      s.values == (1, -1))
    rep.results["separations"] = seps
    rep.results["prefix_rays"] = {str(w): list(fg.prefix_ray(w, 8).points) for w in points}
    return rep, {}


def cmd_accept(cfg: RunConfig, check: str | None = None,
               sigma_scale: Fraction = Fraction(1)) -> tuple[Report, dict]:
    rep = Report("accept", {"seed": cfg.seed, "check": check, "sigma_scale": str(sigma_scale)})
    rows = []
    for k, name, sub in run_acceptance(check, seed=cfg.seed, sigma_scale=sigma_scale):
        rep.results[f"{k:02d} {name}"] = sub.to_json()
        rep.check(f"criterion {k} {name}", sub.passed, "==", True, sub.passed)
        rows.append([k, name, "PASS" if sub.passed else "FAIL"])
    if not rows:
        raise PreconditionError(f"no acceptance check matches {check!r}")
    return rep, {"accept.csv": (["criterion", "name", "status"], rows)}


COMMANDS = {
    "length-table": cmd_length_table,
    "facets": cmd_facets,
    "boundary": cmd_boundary,
    "seminorm": cmd_seminorm,
    "radius": cmd_radius,
    "freegroup": cmd_freegroup,
    "accept": cmd_accept,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horolip", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON file mirroring RunConfig")
    p.add_argument("--seed", type=int, help="seed for random suites (unsigned 64-bit)")
    p.add_argument("--tol", type=float, help="truncation tolerance")
    p.add_argument("--out", help="directory for JSON and CSV output")
    p.add_argument("--check", help="acceptance filter: criterion number or name substring")
    p.add_argument("--element", help="element JSON file for the seminorm command")
    p.add_argument("--list", action="store_true", help="list acceptance checks and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    # failure injection for the acceptance suite: scales sigma_F in the facet check
    p.add_argument("--perturb-sigma", type=Fraction, default=Fraction(1), help=argparse.SUPPRESS)
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    data = cfg.to_json()
    if args.seed is not None:
        data["seed"] = args.seed
    if args.tol is not None:
        data["truncation_tol"] = args.tol
    if args.out is not None:
        data["out"] = args.out
    return RunConfig(**data)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.list:
        for k, (name, title, _) in enumerate(CHECKS, start=1):
            print(f"{k:2d} {name}: {title}")
        return EXIT_PASS
    if args.command is None:
        print("a command is required (or --list)", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _config(args)
        if args.command == "seminorm":
            rep, tables = cmd_seminorm(cfg, args.element)
        elif args.command == "accept":
            t0 = time.perf_counter()
            rep, tables = cmd_accept(cfg, args.check, args.perturb_sigma)
            for k, name, status in tables["accept.csv"][1]:
                print(f"criterion {k} {name}: {status}", file=sys.stderr)
            print(f"elapsed {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        else:
            rep, tables = COMMANDS[args.command](cfg)
    except (BudgetError, InsufficientSampleError, InsufficientDataError, WindowExhaustedError) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (PreconditionError, ValueError, KeyError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        out = Path(cfg.out)
        write_json(out / f"{args.command}.json", rep)
        for name, (header, rows) in tables.items():
            write_csv(out / name, header, rows)
    else:
        sys.stdout.write(dumps(rep))
    for a in rep.assertions:
        if not a.passed:
            print(f"FAILED: {a.label}: {a.lhs} {a.relation} {a.rhs}", file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
