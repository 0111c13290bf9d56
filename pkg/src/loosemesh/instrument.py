"""Instrumented runs of the fast refiner.

A shadow Delaunay triangulation follows every insertion so that brute-force
oracles can check the lemma statements at each stage boundary:

- L6: the shortest loose pair is at least eta for the stage;
- L4: every stored point satisfies the lfs sandwich for its cell;
- L9: no loose-pair endpoint or moonstruck point has been deactivated;
- L7: a vertex with gap above c_g has a loose pair no longer than c_gbu lfs;
- L8: a moonstruck point of a length-l pair has lfs >= l / (c1 c_gbu);
- active: actives per cell stay under the packing bound;
- monotone: new loose pairs at an inserted vertex are at least eta long;
- sweep: the final triangulation has no loose pairs.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .baseline import KIND_STEINER
from .constants import RefinementConstants, eta_bound, packing_bound
from .delaunay import Triangulation, loose_pairs_of
from .exceptions import LemmaViolation
from .fast import fast_refine
from .geometry import Side, circumcenter, dist, leaf_apex, leaf_contains

LEMMAS = ("L4", "L6", "L7", "L8", "L9", "active", "monotone", "sweep")
REL = 1e-9


@dataclass
class LemmaReport:
    violations: Dict[str, List[str]] = field(default_factory=lambda: {k: [] for k in LEMMAS})
    checks: Dict[str, int] = field(default_factory=lambda: {k: 0 for k in LEMMAS})
    stages: int = 0
    final_points: int = 0
    max_active: int = 0
    active_bound: float = 0.0
    residual_loose: int = 0
    safety_net_used: bool = False
    dump_path: Optional[str] = None

    def ok(self, lemma: str) -> bool:
        return not self.violations[lemma]

    @property
    def passed(self) -> bool:
        return all(self.ok(k) for k in LEMMAS)

    def failed(self) -> List[str]:
        return [k for k in LEMMAS if not self.ok(k)]

    def summary(self) -> str:
        parts = [f"{k}={'pass' if self.ok(k) else 'FAIL'}({self.checks[k]})" for k in LEMMAS]
        return " ".join(parts)


def _nn(tri: Triangulation, v: int) -> float:
    P = tri.points
    return min(dist(P[v], P[w]) for w in tri.neighbors(v))


def _edge_loose_side(tri: Triangulation, e: int, beta: float):
    """Empty side of the Delaunay edge e (outer hull side ignored), or None."""
    a, b, l, r = tri.edge_info(e)
    P = tri.points
    p, q = P[a], P[b]
    for side, third, other in ((Side.LEFT, l, r), (Side.RIGHT, r, l)):
        if third < 0:
            continue
        apex = leaf_apex(p, q, beta, side)
        if leaf_contains(p, q, apex, side, P[third]):
            continue
        if other >= 0 and leaf_contains(p, q, apex, side, P[other]):
            continue
        return side
    return None


class LemmaObserver:
    def __init__(self, consts: RefinementConstants, report: LemmaReport):
        self.consts = consts
        self.report = report
        self.shadow: Optional[Triangulation] = None
        self.depth = 0
        self.eta = 0.0
        self.stage = 0

    def _fail(self, lemma, msg):
        self.report.violations[lemma].append(msg)

    def _sync(self, fr):
        if self.shadow is None:
            self.shadow = Triangulation.build(list(fr.P))
            self.depth = fr.tree.max_depth

    def stage_start(self, fr, level: int):
        self._sync(fr)
        rep, c = self.report, self.consts
        self.stage = self.depth - level + 1
        self.eta = eta_bound(self.stage, c, self.depth)
        rep.stages += 1
        tri = self.shadow
        P = tri.points
        pairs = loose_pairs_of(tri, c.beta)
        # L6
        rep.checks["L6"] += 1
        if pairs:
            short = min(lp.length for lp in pairs)
            if short < self.eta * (1 - REL):
                self._fail("L6", f"level {level}: loose pair of length {short:.6g} < eta {self.eta:.6g}")
        # L9: endpoints and moonstruck points are still alive
        from .loose_pairs import moonstruck

        for lp in pairs:
            rep.checks["L9"] += 1
            for x in (lp.p, lp.q):
                i = fr.index[x]
                if fr.dead[i]:
                    self._fail("L9", f"level {level}: loose pair endpoint {x} (ACT {fr.act[i]}) is deactivated")
            near = [P[j] for j in fr.tree.ids_in_disk(lp.p[0], lp.p[1], 6.0 * lp.length)]
            w = moonstruck(lp.p, lp.q, c.beta, lp.empty_side, near)
            if w is not None and fr.dead[fr.index[w]]:
                self._fail("L9", f"level {level}: moonstruck {w} of ({lp.p}, {lp.q}) is deactivated")
        # L7
        by_vertex: Dict[int, float] = {}
        for lp in pairs:
            for x in (lp.p, lp.q):
                i = tri.vertex_index(x)
                by_vertex[i] = min(by_vertex.get(i, math.inf), lp.length)
        for v in range(len(P)):
            if tri.is_hull_vertex(v) or fr.frame.is_boundary(P[v]):
                continue
            lfs = _nn(tri, v)
            big = max(dist(circumcenter(*(P[k] for k in tri.triangle(t))), P[v])
                      for t in tri.incident_triangles(v))
            if big / lfs > c.c_g:
                rep.checks["L7"] += 1
                if not any(lp.length <= c.c_gbu * lfs * (1 + REL) for lp in pairs):
                    self._fail("L7", f"vertex {P[v]} has gap {big / lfs:.4g} but no short loose pair")

    def handling(self, fr, a, b, side, res, level):
        c = self.consts
        w = res.moonstruck
        if w is None:
            return
        self.report.checks["L8"] += 1
        self.report.checks["L9"] += 1
        tri = self.shadow
        ell = dist(fr.P[a], fr.P[b])
        c1 = max(2.0, ell / self.eta) if self.eta > 0 else 2.0
        v = tri.vertex_index(w)
        lfs = _nn(tri, v)
        if lfs < ell / (c1 * c.c_gbu) * (1 - REL):
            self._fail("L8", f"moonstruck {w}: lfs {lfs:.4g} < {ell / (c1 * c.c_gbu):.4g}")
        if fr.dead[fr.index[w]]:
            self._fail("L9", f"moonstruck {w} used at level {level} is deactivated")

    def inserted(self, fr, v, nd, level):
        c = self.consts
        tri = self.shadow
        P = fr.P
        u = tri.insert(P[v])
        if u is None:
            return
        tri_lfs = _nn(tri, u)
        rep = self.report
        rep.checks["L4"] += 1
        s = nd.size
        if not (c.c_low * s * (1 - REL) <= tri_lfs <= c.c_up * s * (1 + REL)):
            self._fail("L4", f"point {P[v]} (kind {fr.kinds[v]}) lfs {tri_lfs:.4g} outside "
                             f"[{c.c_low * s:.4g}, {c.c_up * s:.4g}] at depth {nd.depth}")
        # new loose pairs at u are no shorter than the stage bound
        for e in tri.outgoing(u):
            if _edge_loose_side(tri, e, c.beta) is None:
                continue
            a, b, _, _ = tri.edge_info(e)
            rep.checks["monotone"] += 1
            ell = dist(tri.points[a], tri.points[b])
            if ell < self.eta * (1 - REL):
                self._fail("monotone", f"new loose pair of length {ell:.4g} < eta {self.eta:.4g}")


def _dump(fr, report: LemmaReport, dump_dir: Optional[str]) -> str:
    d = dump_dir or tempfile.gettempdir()
    os.makedirs(d, exist_ok=True)
    fd, path = tempfile.mkstemp(prefix="lemma-", suffix=".json", dir=d)
    state = {
        "points": fr.P, "kinds": fr.kinds, "act": fr.act, "dead": fr.dead,
        "constants": fr.consts.table(), "violations": report.violations,
    }
    with os.fdopen(fd, "w") as fh:
        json.dump(state, fh)
    return path


def instrumented_run(points: Sequence, consts: Optional[RefinementConstants] = None,
                     raise_on_failure: bool = False, dump_dir: Optional[str] = None,
                     max_insertions: Optional[int] = None) -> LemmaReport:
    consts = consts or RefinementConstants()
    report = LemmaReport()
    obs = LemmaObserver(consts, report)
    holder = {}

    # wrap stage_start to keep a handle on the refiner for the final audit
    orig = obs.stage_start

    def stage_start(fr, level):
        holder["fr"] = fr
        orig(fr, level)

    obs.stage_start = stage_start
    tri, st = fast_refine(points, consts, max_insertions=max_insertions,
                          safety_net=True, observer=obs)
    fr = holder["fr"]
    report.final_points = len(fr.P)
    report.max_active = st.max_active_per_cell
    report.active_bound = packing_bound(consts)
    report.checks["active"] += 1
    if report.max_active > report.active_bound:
        report.violations["active"].append(
            f"{report.max_active} actives in one cell > bound {report.active_bound:.4g}")
    # L4 at the end with the shrunk constant
    P = fr.P
    shadow = obs.shadow
    for v in range(len(P)):
        if fr.kinds[v] != KIND_STEINER:
            continue
        report.checks["L4"] += 1
        s = 2.0 ** -fr.act[v]
        lfs = _nn(shadow, shadow.vertex_index(P[v]))
        if lfs < consts.c_low_prime * s * (1 - REL):
            report.violations["L4"].append(f"final lfs {lfs:.4g} of {P[v]} < c_low' * {s:.4g}")
    report.residual_loose = st.residual_loose
    report.safety_net_used = st.safety_net_used
    report.checks["sweep"] += 1
    if st.residual_loose:
        report.violations["sweep"].append(f"{st.residual_loose} loose pairs left by the main loop")
    if not report.passed:
        report.dump_path = _dump(fr, report, dump_dir)
        if raise_on_failure:
            lemma = report.failed()[0]
            raise LemmaViolation(lemma, report.violations[lemma][0], report.dump_path)
    return report
