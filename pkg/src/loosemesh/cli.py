"""Command-line front end: refine, audit, render, bench, verify."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import List, Optional

import numpy as np

from .baseline import KIND_BOUNDARY
from .delaunay import Triangulation
from .exceptions import ConfigError, MeshError
from .geometry import beta_from_angle

SQRT2 = math.sqrt(2.0)
LOG_LEVELS = {"off": logging.CRITICAL + 1, "info": logging.INFO, "trace": logging.DEBUG}


class UsageError(Exception):
    pass


def setup_logging():
    lvl = os.environ.get("MESH_LOG", "off").lower()
    if lvl not in LOG_LEVELS:
        raise UsageError(f"MESH_LOG must be one of {sorted(LOG_LEVELS)}, got {lvl!r}")
    logging.basicConfig(level=LOG_LEVELS[lvl], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    logging.getLogger("loosemesh").setLevel(LOG_LEVELS[lvl])


def resolve_beta(args) -> float:
    if args.beta is not None and args.min_angle is not None:
        raise UsageError("--beta and --min-angle are mutually exclusive")
    if args.min_angle is not None:
        if not 0 < args.min_angle < 60:
            raise UsageError("--min-angle must lie in (0, 60)")
        beta = beta_from_angle(args.min_angle)
    else:
        beta = SQRT2 if args.beta is None else args.beta
    if beta < SQRT2 * (1 - 1e-12) and getattr(args, "max_insertions", None) is None:
        raise UsageError(f"beta={beta:.6g} is below sqrt(2): experimental runs need --max-insertions")
    return beta


def _int_list(s: str) -> List[int]:
    return [int(float(t)) for t in s.split(",") if t.strip()]


def load_mesh_vertices(node_path: str):
    """Vertices of a written .node file mapped back into the unit square.

    The square is recovered from the boundary-flagged vertices.
    """
    from .meshio import read_node

    pts, attrs = read_node(node_path)
    a = np.asarray(pts, dtype=float)
    kinds = [int(r[0]) if r else 0 for r in attrs]
    frame = a[[k == KIND_BOUNDARY for k in kinds]]
    if len(frame) < 4:
        raise MeshError("mesh file carries no boundary-flagged vertices")
    lo = frame.min(axis=0)
    side = float(max(frame.max(axis=0) - lo))
    norm = (a - lo) / side
    norm = np.clip(norm, 0.0, 1.0)
    return [tuple(p) for p in norm.tolist()], kinds


def audit_files(node_path: str, beta: float = SQRT2):
    from .audit import audit

    pts, kinds = load_mesh_vertices(node_path)
    tri = Triangulation.build(pts)
    tri.kinds = kinds
    return audit(tri, None, beta)


def _print_record(rec: dict, out=None):
    from .meshio import format_stats

    (out or sys.stdout).write(format_stats(rec))


def cmd_refine(args) -> int:
    from .meshio import read_points, write_mesh
    from .pipeline import mesh_points

    beta = resolve_beta(args)
    raw = read_points(args.input)
    res = mesh_points(raw, args.algorithm, beta, max_insertions=args.max_insertions,
                      c_shrink=args.c_shrink)
    paths = write_mesh(res.tri, args.out, res.transform, svg=args.svg, beta=beta)
    rec = res.audit.as_dict()
    rec.update(algorithm=args.algorithm, wall_time=res.wall_time, files=",".join(paths))
    if hasattr(res.stats, "safety_net_used"):
        rec["safety_net_used"] = res.stats.safety_net_used
    _print_record(rec)
    return 0 if res.audit.passed else 1


def cmd_audit(args) -> int:
    beta = resolve_beta(args)
    a = audit_files(args.mesh, beta)
    _print_record(a.as_dict())
    return 0 if a.passed else 1


def cmd_render(args) -> int:
    from .meshio import format_svg

    beta = resolve_beta(args)
    pts, kinds = load_mesh_vertices(args.mesh)
    tri = Triangulation.build(pts)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_svg(tri, beta))
    return 0


def cmd_bench(args) -> int:
    from .bench import run_bench

    beta = resolve_beta(args)

    def progress(row):
        logging.getLogger("loosemesh.bench").info("%s", row)

    rep = run_bench(args.generator, _int_list(args.sizes), _int_list(args.seeds),
                    [a for a in args.algorithms.split(",") if a], beta,
                    max_insertions=args.max_insertions, readback=args.readback,
                    progress=progress)
    text = rep.to_text()
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(rep.to_csv())
    return 0


def parse_inject(items: Optional[List[str]]) -> dict:
    out = {}
    for it in items or []:
        k, sep, v = it.partition("=")
        if not sep or k not in ("c_span", "c_reach", "c_shrink"):
            raise UsageError(f"--inject expects c_span=, c_reach= or c_shrink=, got {it!r}")
        out[k] = int(v) if k == "c_span" else float(v)
    return out


def cmd_verify(args) -> int:
    from .constants import RefinementConstants
    from .frame import normalize_input
    from .generators import generate
    from .instrument import LEMMAS, instrumented_run
    from .verify import lemma1_table

    kw = parse_inject(args.inject)
    if kw:
        kw["validate"] = False
    consts = RefinementConstants(**kw)
    sizes = _int_list(args.sizes)
    gens = ("uniform", "clustered", "grid")
    fails = {k: 0 for k in LEMMAS}
    dumps = []
    for t in range(args.trials):
        n = sizes[t % len(sizes)]
        raw = generate(gens[t % len(gens)], n, args.seed + t)
        pts, _ = normalize_input(raw)
        rep = instrumented_run(pts, consts)
        for k in rep.failed():
            fails[k] += 1
        if rep.dump_path:
            dumps.append(rep.dump_path)
    table = lemma1_table(args.trials, max(sizes), args.seed)
    rec = {f"{k}_failures": v for k, v in fails.items()}
    rec["trials"] = args.trials
    rec["lemma1_table"] = "loose&small={} loose&ok={} tight&small={} tight&ok={}".format(
        table[1][1], table[1][0], table[0][1], table[0][0])
    rec["lemma1_off_diagonal"] = table[1][0] + table[0][1]
    bad = sum(fails.values()) + rec["lemma1_off_diagonal"]
    if dumps:
        rec["dump"] = dumps[0]
    _print_record(rec)
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loosemesh", description="Off-center Delaunay refinement of 2D point sets.")
    sub = p.add_subparsers(dest="command", required=True)

    def quality_flags(sp):
        sp.add_argument("--beta", type=float, default=None, help="radius-edge bound (default sqrt 2)")
        sp.add_argument("--min-angle", type=float, default=None, help="minimum angle in degrees")

    r = sub.add_parser("refine", help="refine a point set and write .node/.ele")
    r.add_argument("--input", required=True)
    r.add_argument("--algorithm", default="fast",
                   choices=("baseline-offcenter", "baseline-circumcenter", "fast"))
    quality_flags(r)
    r.add_argument("--out", required=True, help="output base path")
    r.add_argument("--max-insertions", type=int, default=None)
    r.add_argument("--c-shrink", type=float, default=0.25)
    r.add_argument("--svg", action="store_true")
    r.set_defaults(func=cmd_refine)

    a = sub.add_parser("audit", help="audit a written mesh")
    a.add_argument("mesh", help=".node file")
    quality_flags(a)
    a.set_defaults(func=cmd_audit, max_insertions=0)

    s = sub.add_parser("render", help="render a written mesh as SVG")
    s.add_argument("mesh")
    s.add_argument("--out", required=True)
    quality_flags(s)
    s.set_defaults(func=cmd_render, max_insertions=0)

    b = sub.add_parser("bench", help="run a benchmark cross product")
    b.add_argument("--generator", default="uniform", choices=("uniform", "clustered", "grid", "circle"))
    b.add_argument("--sizes", default="100,1000")
    b.add_argument("--seeds", default="0")
    b.add_argument("--algorithms", default="fast,baseline-offcenter")
    quality_flags(b)
    b.add_argument("--max-insertions", type=int, default=None)
    b.add_argument("--no-readback", dest="readback", action="store_false",
                   help="skip re-auditing every row from its written files")
    b.add_argument("--out", default=None)
    b.add_argument("--csv", default=None)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="instrumented lemma checks")
    v.add_argument("--sizes", default="10,30,60")
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject", action="append", help="fault injection, e.g. c_span=0")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging()
        return args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except (ConfigError, MeshError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
