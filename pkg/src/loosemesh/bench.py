"""Paired experiments and scaling measurements."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .generators import generate
from .pipeline import mesh_points

AIRFOIL_RATIO = 441 / 731


@dataclass
class BenchRow:
    generator: str
    n: int
    seed: int
    algorithm: str
    beta: float
    steiner_count: int
    triangle_count: int
    vertex_count: int
    wall_time: float
    audit_pass: bool
    capped: bool = False
    readback_ok: Optional[bool] = None


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    def passing(self, algorithm: Optional[str] = None) -> List[BenchRow]:
        return [r for r in self.rows if r.audit_pass and (algorithm is None or r.algorithm == algorithm)]

    def steiner_ratio(self, num: str, den: str) -> Optional[float]:
        """Mean of num over mean of den, over instances where both passed."""
        a = {(r.generator, r.n, r.seed): r for r in self.passing(num)}
        b = {(r.generator, r.n, r.seed): r for r in self.passing(den)}
        keys = sorted(set(a) & set(b))
        if not keys:
            return None
        sa = np.mean([a[k].steiner_count for k in keys])
        sb = np.mean([b[k].steiner_count for k in keys])
        return float(sa / sb) if sb else None

    def time_ratio(self, num: str, den: str) -> Optional[float]:
        ta = [r.wall_time for r in self.passing(num)]
        tb = [r.wall_time for r in self.passing(den)]
        if not ta or not tb:
            return None
        return float(np.sum(ta) / np.sum(tb))

    def scaling_exponent(self, algorithm: str) -> Optional[float]:
        rows = self.passing(algorithm)
        if len({r.n for r in rows}) < 2:
            return None
        return fit_exponent([r.n + r.vertex_count for r in rows], [r.wall_time for r in rows])

    def aggregates(self) -> dict:
        out = {}
        algos = sorted({r.algorithm for r in self.rows})
        if {"baseline-offcenter", "baseline-circumcenter"} <= set(algos):
            out["offcenter_circumcenter_steiner_ratio"] = self.steiner_ratio(
                "baseline-offcenter", "baseline-circumcenter")
            out["airfoil_reference_ratio"] = AIRFOIL_RATIO
        if {"fast", "baseline-offcenter"} <= set(algos):
            out["fast_baseline_steiner_ratio"] = self.steiner_ratio("fast", "baseline-offcenter")
            out["fast_baseline_time_ratio"] = self.time_ratio("fast", "baseline-offcenter")
        for a in algos:
            out[f"scaling_exponent[{a}]"] = self.scaling_exponent(a)
        out["rows"] = len(self.rows)
        out["rows_failing_audit"] = sum(1 for r in self.rows if not r.audit_pass)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = list(BenchRow.__dataclass_fields__)
        w = csv.DictWriter(buf, fieldnames=names)
        w.writeheader()
        for r in self.rows:
            w.writerow(asdict(r))
        return buf.getvalue()

    def to_text(self) -> str:
        from .meshio import format_stats

        rec = {k: ("none" if v is None else v) for k, v in self.aggregates().items()}
        return format_stats(rec)


def fit_exponent(x: Sequence[float], t: Sequence[float]) -> float:
    """Least-squares slope of log t against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    lt = np.log(np.maximum(np.asarray(t, dtype=float), 1e-9))
    return float(np.polyfit(lx, lt, 1)[0])


def _readback(res, tmpdir: str) -> bool:
    """Write the mesh, read it back and check the audit is unchanged."""
    from .cli import audit_files
    from .meshio import write_mesh

    base = os.path.join(tmpdir, "mesh")
    write_mesh(res.tri, base, res.transform)
    a2 = audit_files(base + ".node", res.beta)
    a1 = res.audit
    return (a1.passed == a2.passed and a1.vertex_count == a2.vertex_count
            and a1.triangle_count == a2.triangle_count
            and a1.loose_pair_count == a2.loose_pair_count
            and abs(a1.min_angle_deg - a2.min_angle_deg) < 1e-6)


def run_bench(generator: str, sizes: Iterable[int], seeds: Iterable[int],
              algorithms: Iterable[str], beta: float = math.sqrt(2.0),
              max_insertions: Optional[int] = None, readback: bool = True,
              progress=None) -> BenchReport:
    rep = BenchReport()
    seeds = list(seeds)
    algorithms = list(algorithms)
    with tempfile.TemporaryDirectory() as tmp:
        for n in sizes:
            for seed in seeds:
                raw = generate(generator, n, seed)
                for algo in algorithms:
                    res = mesh_points(raw, algo, beta, max_insertions=max_insertions)
                    row = BenchRow(generator, n, seed, algo, beta, res.steiner_count,
                                   res.tri.n_triangles, len(res.tri.points), res.wall_time,
                                   res.audit.passed, bool(getattr(res.stats, "capped", False)))
                    if readback:
                        row.readback_ok = _readback(res, tmp)
                    rep.rows.append(row)
                    if progress is not None:
                        progress(row)
    return rep


def strategy_comparison(instances: int = 20, n: int = 30, min_angle: float = 30.0,
                        generator: str = "uniform", cap_factor: int = 200):
    """Paired off-center vs circumcenter runs at an experimental angle.

    Returns (mean off-center count, mean circumcenter count, ratio, rows).
    Runs that hit the insertion cap are kept in the means (both modes
    share the same cap).
    """
    from .baseline import RefinerConfig, refine
    from .frame import normalize_input
    from .geometry import beta_from_angle

    beta = beta_from_angle(min_angle)
    rows = []
    for seed in range(instances):
        pts, _ = normalize_input(generate(generator, n, seed))
        cap = cap_factor * (len(pts) + 12)
        counts = []
        for mode in ("off_center", "circumcenter"):
            _, st = refine(pts, RefinerConfig(beta=beta, mode=mode, max_insertions=cap))
            counts.append((st.steiner_count, st.capped, st.min_angle_deg))
        rows.append((seed, *counts))
    off = float(np.mean([r[1][0] for r in rows]))
    cc = float(np.mean([r[2][0] for r in rows]))
    return off, cc, off / cc, rows


def scaling_runs(sizes: Sequence[int], seed: int = 0, generator: str = "uniform",
                 algorithms=("fast", "baseline-offcenter"), progress=None) -> BenchReport:
    return run_bench(generator, sizes, [seed], algorithms, progress=progress)


def output_difference(raw, beta: float = math.sqrt(2.0)) -> dict:
    """Vertex-set difference between the fast and the off-center baseline output."""
    f = mesh_points(raw, "fast", beta, do_audit=False)
    b = mesh_points(raw, "baseline-offcenter", beta, do_audit=False)
    F, G = set(f.tri.points), set(b.tri.points)
    return {"fast_only": len(F - G), "baseline_only": len(G - F), "shared": len(F & G),
            "identical": F == G}
