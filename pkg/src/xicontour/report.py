"""Pipeline stages behind the command line: per-sign jobs, file writers, verification."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .arrangement import line_segment
from .chambers import (
    chamber_bound,
    count_chambers,
    hypothesis_check,
    incremental_line_check,
    isotopy_bound,
    korben_bound,
    steiner_regions,
)
from .completion import completed_signed_contour, facet_lines
from .contour import (
    Sampling,
    attained_sign_classes,
    cusp_roots_crosscheck,
    find_cusps,
    leading_drop,
    verify_gauss_normal,
)
from .exceptions import WindowTooSmall, XiContourError
from .parametrization import all_sign_classes, canonical_sign, circuit_membership_test, sign_string
from .spectrum import affine_dimension, build_lifted, nullspace_basis


def _sampling(cfg) -> Sampling:
    return Sampling(clip_window=cfg.window, max_step=cfg.sampling["max_step"], max_turn=cfg.sampling["max_turn"])


def basis_of(cfg):
    return nullspace_basis(build_lifted(cfg.spectrum), cfg.tolerances["svd"]).B


def planar(cfg) -> bool:
    return cfg.spectrum.t - affine_dimension(build_lifted(cfg.spectrum), cfg.tolerances["svd"]) - 1 == 2


def requested_signs(cfg, B) -> list[tuple]:
    if cfg.sign_classes == "all":
        return all_sign_classes(cfg.spectrum.t)
    if cfg.sign_classes == "attained":
        return sorted(attained_sign_classes(B), key=sign_string)
    return sorted(cfg.sign_classes, key=sign_string)


@dataclass
class SignJob:
    sigma: tuple
    attained: bool
    contour: object = field(repr=False)
    chambers: object = field(repr=False, default=None)
    error: str | None = None
    hypothesis: object = None
    line_steps: list = field(default_factory=list)


def _run_sign(args) -> SignJob:
    cfg, B, sigma, cusps, attained, count = args
    cc = completed_signed_contour(cfg.spectrum, B, sigma, _sampling(cfg), cusps)
    job = SignJob(sigma, sigma in attained, cc)
    if count:
        try:
            job.chambers = count_chambers(cc, window=cfg.window, resolution=cfg.grid)
        except WindowTooSmall as exc:
            job.error = str(exc)
        job.hypothesis = hypothesis_check(cc.arcs, 1e-6 * cfg.window)
        job.line_steps = incremental_line_check(cc, cfg.window)
    return job


def run_signs(cfg, B=None, count=True, workers=1) -> list[SignJob]:
    """One job per requested sign class, returned in sorted sign-string order."""
    B = basis_of(cfg) if B is None else B
    cusps = find_cusps(B)
    attained = set(attained_sign_classes(B))
    args = [(cfg, B, s, cusps, attained, count) for s in requested_signs(cfg, B)]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = list(pool.map(_run_sign, args))
    else:
        jobs = [_run_sign(a) for a in args]
    return sorted(jobs, key=lambda j: sign_string(j.sigma))


# ---------------------------------------------------------------------------
# files


def write_csv(path: Path, job: SignJob, window: float):
    """Columns: kind (arc/line/cusp), piece, index, theta, v1, v2."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "piece", "index", "theta", "v1", "v2"])
        for p, arc in enumerate(job.contour.arcs):
            for i, (th, pt) in enumerate(zip(arc.theta, arc.points)):
                w.writerow(["arc", p, i, f"{th:.12g}", f"{pt[0]:.12g}", f"{pt[1]:.12g}"])
        for p, ln in enumerate(job.contour.lines):
            seg = line_segment(*ln.point_and_direction(), window)
            if seg is None:
                continue
            for i, pt in enumerate(seg):
                w.writerow(["line", p, i, "", f"{pt[0]:.12g}", f"{pt[1]:.12g}"])
        cusp_pts = [(a.theta_range[1], a.points[-1]) for a in job.contour.arcs if a.cusp_flags[1]]
        for i, (th, pt) in enumerate(cusp_pts):
            w.writerow(["cusp", 0, i, f"{th:.12g}", f"{pt[0]:.12g}", f"{pt[1]:.12g}"])


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def write_svg(path: Path, jobs, window: float, size: int = 600):
    """SVG 1.1 with groups for arcs (one sub-group per sign), completion lines, cusps and the origin."""
    from .arrangement import clip_polyline

    scale = size / (2 * window)

    def px(p):
        return (p[0] + window) * scale, (window - p[1]) * scale

    arcs, lines, cusps = [], [], []
    for k, job in enumerate(jobs):
        color = _PALETTE[k % len(_PALETTE)]
        label = sign_string(job.sigma)
        # XML ids may not contain '+'
        gid = label.replace("+", "p").replace("-", "m")
        paths = []
        for arc in job.contour.arcs:
            for run in _runs(clip_polyline(arc.points, window)):
                pts = " ".join("%.3f,%.3f" % px(p) for p in run)
                paths.append(f'<polyline points="{pts}"/>')
            if arc.cusp_flags[1] and np.abs(arc.points[-1]).max() <= window:
                cx, cy = px(arc.points[-1])
                cusps.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="3"/>')
        arcs.append(f'<g id="arcs-{gid}" stroke="{color}"><title>{escape(label)}</title>{"".join(paths)}</g>')
        for ln in job.contour.lines:
            seg = line_segment(*ln.point_and_direction(), window)
            if seg is not None:
                (x1, y1), (x2, y2) = px(seg[0]), px(seg[1])
                lines.append(
                    f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" stroke="{color}">'
                    f"<title>{escape(label)}</title></line>"
                )
    ox, oy = px((0.0, 0.0))
    cross = (
        f'<line x1="{ox - 4:.3f}" y1="{oy - 4:.3f}" x2="{ox + 4:.3f}" y2="{oy + 4:.3f}"/>'
        f'<line x1="{ox - 4:.3f}" y1="{oy + 4:.3f}" x2="{ox + 4:.3f}" y2="{oy - 4:.3f}"/>'
    )
    body = (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>\n'
        f'<g id="arcs" fill="none" stroke-width="1.5">{"".join(arcs)}</g>\n'
        f'<g id="completion" stroke-width="1.5" stroke-dasharray="6,3">{"".join(lines)}</g>\n'
        f'<g id="cusps" fill="black">{"".join(cusps)}</g>\n'
        f'<g id="origin" stroke="black" stroke-width="1">{cross}</g>\n'
        "</svg>\n"
    )
    Path(path).write_text(body)


def _runs(segs):
    """Group consecutive clipped segments into connected point runs."""
    runs = []
    for a, b in segs:
        if runs and np.array_equal(runs[-1][-1], a):
            runs[-1].append(b)
        else:
            runs.append([a, b])
    return runs


def write_json(path: Path, payload: dict):
    Path(path).write_text(json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n")


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(f"{float(x):.12g}")
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    return x


# ---------------------------------------------------------------------------
# reports


def bounds_table(n: int, t: int | None = None, d: int | None = None, lines: int | None = None,
                 cusps: int | None = None) -> dict:
    from .contour import component_bound

    out = {"n": n, "chamberBound": chamber_bound(n), "isotopyBound": isotopy_bound(n)}
    ell = n if cusps is None else cusps
    out["korbenBound"] = {"cusps": ell, **korben_bound(ell)}
    m = (t - d - 1 if t is not None and d is not None else 2) if lines is None else lines
    out["steinerRegions"] = {"lines": m, "regions": steiner_regions(m)}
    if t is not None and d is not None:
        out["t"], out["d"] = t, d
        k = t - d - 1
        out["degreeBound"] = k * (t - 1)
        out["componentBound"] = component_bound(t, d)
    return out


def chambers_payload(cfg, jobs, B) -> dict:
    n = cfg.spectrum.n
    per = {}
    for job in jobs:
        entry = {"attained": job.attained, "facetLines": len(job.contour.lines)}
        if job.error:
            entry["error"] = job.error
        if job.chambers is not None:
            ch = job.chambers
            entry.update(
                chamberCount=ch.count,
                innerChambers=ch.inner,
                outerChambers=ch.outer,
                floodFillCount=ch.raster_count,
                floodFillInner=ch.raster_inner,
                dualAgreement=ch.agree,
                chambers=[
                    {"id": c.id, "bounded": c.bounded, "representative": list(c.representative), "clearance": c.clearance}
                    for c in ch.chambers
                ],
                boundComparisons={
                    "chamberBound": {"value": chamber_bound(n), "observed": ch.count, "relation": "<=" if ch.count <= chamber_bound(n) else ">"},
                    "isotopyBound": {"value": isotopy_bound(n), "observed": ch.count, "relation": "<=" if ch.count <= isotopy_bound(n) else ">"},
                },
            )
        if job.hypothesis is not None:
            h = job.hypothesis
            entry["hypothesisViolations"] = [list(v) for v in h.violations] + [["cusp-shared", *v] for v in h.cusp_sharing_hits]
            entry["subArcPairs"] = {f"{i}-{j}": c for (i, j), c in sorted(h.pair_counts.items())}
            entry["nearTangent"] = len(h.near_tangent)
        if job.line_steps:
            entry["lineSteps"] = [
                {"before": s.before, "after": s.after, "crossings": s.crossings, "ok": s.ok} for s in job.line_steps
            ]
        per[sign_string(job.sigma)] = entry
    located = {}
    for name, c in sorted(cfg.points.items()):
        v = np.log(np.abs(np.asarray(c))) @ B
        sig = canonical_sign(np.sign(c))
        job = next((j for j in jobs if j.sigma == sig), None)
        chamber = job.chambers.locate(v) if job is not None and job.chambers is not None else None
        located[name] = {"reduced": list(v), "sign": sign_string(sig), "chamber": chamber}
    return {
        "case": cfg.case,
        "spectrum": cfg.spectrum.A.tolist(),
        "window": cfg.window,
        "grid": cfg.grid,
        "signs": per,
        "points": located,
        "bounds": bounds_table(n, cfg.spectrum.t, affine_dimension(build_lifted(cfg.spectrum))),
        "cusps": len(find_cusps(B)),
    }


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def run_verification(cfg, basis=None, workers=1) -> list[Check]:
    """Property suite plus the golden expectations recorded in the config.

    ``basis`` overrides the computed nullspace basis (used to check that a
    corrupted basis is caught).
    """
    checks = []
    lifted = build_lifted(cfg.spectrum)
    own = nullspace_basis(lifted, cfg.tolerances["svd"])
    B = own.B if basis is None else np.asarray(basis, dtype=float)
    resid = float(np.abs(lifted @ B).max())
    ortho = float(np.abs(B.T @ B - np.eye(B.shape[1])).max())
    checks.append(Check("nullspace residual", resid < 1e-10 and ortho < 1e-10, f"|A^B| = {resid:.2e}, |B'B - I| = {ortho:.2e}"))

    k = B.shape[1]
    if k == 1:
        b = B[:, 0]
        for name, c in sorted(cfg.points.items()):
            try:
                res = circuit_membership_test(c, b)
            except XiContourError as exc:
                checks.append(Check(f"circuit test {name}", False, str(exc)))
                continue
            expected = cfg.expect.get("discriminant", {}).get(name, True)
            ok = res.on_discriminant == expected
            checks.append(Check(f"circuit test {name}", ok, f"residual {res.residual:.2e}, signs compatible {res.sign_compatible}"))
        return checks
    if k != 2:
        checks.append(Check("planar contour", True, f"{k}-dimensional reduced space: contour checks skipped"))
        return checks

    try:
        cusps = find_cusps(B)
    except XiContourError as exc:
        checks.append(Check("cusp polynomials", False, str(exc)))
        return checks
    p1, p2 = cusps.polynomials
    d1, d2 = leading_drop(p1), leading_drop(p2)
    checks.append(Check("cusp degree drop", max(d2) < 1e-8, f"p2 leading {d2[0]:.1e}, {d2[1]:.1e} (p1 leading {d1[0]:.1e}, {d1[1]:.1e})"))
    cross = cusp_roots_crosscheck(B)
    n = cfg.spectrum.n
    checks.append(
        Check("cusp count", len(cusps) <= n and len(cross) == len(cusps), f"{len(cusps)} cusps (<= n = {n}); companion check finds {len(cross)}")
    )

    jobs = run_signs(cfg, B, count=True, workers=workers)
    picked = [a.theta[:: max(1, len(a.theta) // 400)] for j in jobs for a in j.contour.arcs]
    # no traced arcs: the Gauss property does not depend on the sign, check it on a grid
    thetas = np.concatenate(picked) if picked else np.linspace(0.0, np.pi, 2000, endpoint=False)
    if thetas.size:
        worst, used = verify_gauss_normal(B, thetas, cusps=cusps.thetas)
        checks.append(Check("gauss map normal", used > 0 and worst < cfg.tolerances["gauss"], f"max residual {worst:.2e} over {used} points"))
    for job in jobs:
        s = sign_string(job.sigma)
        if job.error:
            checks.append(Check(f"chambers {s}", False, job.error))
            continue
        ch = job.chambers
        checks.append(
            Check(f"dual chamber count {s}", ch.agree, f"arrangement {ch.count} ({ch.inner} inner), flood fill {ch.raster_count} ({ch.raster_inner} inner)")
        )
        clear = min((c.clearance for c in ch.chambers), default=math.inf)
        checks.append(Check(f"representatives {s}", clear >= 1e-3 * cfg.window, f"min clearance {clear:.3g}"))
        if job.line_steps:
            checks.append(Check(f"incremental lines {s}", all(st.ok for st in job.line_steps), str([(st.after - st.before, st.crossings) for st in job.line_steps])))

    exp = cfg.expect
    if "attained" in exp:
        got = len(attained_sign_classes(B))
        checks.append(Check("attained sign classes", got == exp["attained"], f"{got} (expected {exp['attained']})"))
    by_sign = {j.sigma: j for j in jobs}
    for key, label in (("chambers", "count"), ("inner", "inner")):
        for sig, want in exp.get(key, {}).items():
            j = by_sign.get(sig)
            got = None if j is None or j.chambers is None else (j.chambers.count if label == "count" else j.chambers.inner)
            checks.append(Check(f"golden {label} {sign_string(sig)}", got == want, f"{got} (expected {want})"))
    if "total_inner" in exp:
        got = sum(j.chambers.inner for j in jobs if j.chambers is not None)
        checks.append(Check("golden total inner", got == exp["total_inner"], f"{got} (expected {exp['total_inner']})"))
    if "facet_lines" in exp:
        got = len(facet_lines(cfg.spectrum, B))
        checks.append(Check("golden facet lines", got == exp["facet_lines"], f"{got} (expected {exp['facet_lines']})"))
    for a, b, sig in exp.get("separated", []):
        j = by_sign.get(sig)
        if j is None or j.chambers is None:
            checks.append(Check(f"separated {a}/{b}", False, f"sign {sign_string(sig)} not computed"))
            continue
        va = np.log(np.abs(cfg.points[a])) @ B
        vb = np.log(np.abs(cfg.points[b])) @ B
        ca, cb = j.chambers.locate(va), j.chambers.locate(vb)
        checks.append(Check(f"separated {a}/{b}", ca is not None and cb is not None and ca != cb, f"chambers {ca} and {cb}"))
    if exp.get("signatures"):
        from .zeroset import ExpSum, topology_signature

        for name, want in sorted(exp["signatures"].items()):
            sig = topology_signature(ExpSum(cfg.spectrum, cfg.points[name]), grid=cfg.zeroset_grid)
            checks.append(Check(f"signature {name}", sig.as_tuple() == want, f"{sig.as_tuple()} (expected {want})"))
    if cfg.constancy:
        from .exceptions import ConstancyViolation
        from .zeroset import chamber_constancy_check

        sig = cfg.constancy["sigma"]
        j = by_sign.get(sig)
        try:
            rep = chamber_constancy_check(
                cfg.spectrum, B, sig, cfg.constancy["samples"], chambers=j.chambers if j else None,
                grid=cfg.zeroset_grid, fiber_moves=cfg.constancy["fiber_moves"], window=cfg.window,
            )
            sigs = {cid: s.as_tuple() for cid, s in rep.signatures.items()}
            checks.append(Check(f"chamber constancy {sign_string(sig)}", True, f"signatures per chamber {sigs}; refined types {rep.refined_distinct}"))
        except ConstancyViolation as exc:
            checks.append(Check(f"chamber constancy {sign_string(sig)}", False, str(exc)))
    return checks


__all__ = [
    "Check",
    "bounds_table",
    "chambers_payload",
    "run_signs",
    "run_verification",
    "write_csv",
    "write_json",
    "write_svg",
]
