"""Check registry and suite orchestration.

Every check the CLI can run is declared in CHECK_TABLE: a short
description, the section anchor it reports under, a default tolerance,
and a driver taking (scenario, ctx).  run_suite samples points per
check with a seed derived from the suite seed and the check name, so
adding or removing checks never reshuffles anybody else's samples.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import __version__, geodesics, geometry, submersion, tangent_bundle
from .builtins import Scenario
from .config import SuiteConfig, build_scenario
from .errors import BoundaryExit, SubgeoError
from .fields import FDField
from .results import INCONCLUSIVE, PASS, CheckResult, summarize
from .sampling import sample_box, subseed

FD_PROBES = 16


@dataclass
class CheckSpec:
    name: str
    paper_ref: str
    tolerance: float
    description: str
    driver: object  # callable(scenario, ctx) -> CheckResult
    needs: str = ""  # "", "submersion", "bundle", "geodesics"


class RunContext:
    """Per-suite state shared by the check drivers."""

    def __init__(self, scenario: Scenario, count: int, seed: int, boxes=None):
        self.scenario = scenario
        self.count = count
        self.seed = seed
        self.boxes = boxes if boxes is not None else scenario.space.chart.box
        self._curves = None
        self.curve_incidents = 0

    def points(self, check_name: str):
        return sample_box(self.boxes, self.count, subseed(self.seed, check_name)).points

    def curves(self):
        """Integrate the scenario's geodesic jobs once, in name order."""
        if self._curves is None:
            self._curves = {}
            space = self.scenario.space
            for name in sorted(self.scenario.geodesic_jobs):
                job = self.scenario.geodesic_jobs[name]
                try:
                    self._curves[name] = geodesics.integrate_geodesic(
                        space.conn, space.chart, job["p0"], job["v0"],
                        job["t_end"], job["h"],
                    )
                except (SubgeoError, BoundaryExit):
                    self.curve_incidents += 1
        return self._curves

    def take_curve_incidents(self) -> int:
        """Integration failures, charged to the first check that asks."""
        out, self.curve_incidents = self.curve_incidents, 0
        return out


def _missing(name: str, what: str) -> CheckResult:
    return CheckResult(
        name=name, samples=0, max_residual=float("inf"), tolerance=0.0,
        status=INCONCLUSIVE, details={"skipped": f"scenario has no {what}"},
    )


def _manifold_driver(fn_name):
    def drive(scenario, ctx, name, tol):
        pts = ctx.points(name)
        fn = getattr(geometry, fn_name)
        return fn(scenario.space.conn, scenario.space.metric, pts, tol)

    return drive


def _constant_curvature(scenario, ctx, name, tol):
    if scenario.curvature_k is None:
        return _missing(name, "reference curvature constant")
    pts = ctx.points(name)
    return geometry.check_constant_curvature(
        scenario.space.conn, scenario.space.metric, scenario.curvature_k, pts, tol)


def _probe_field(fld, p) -> float:
    """Relative jet-vs-stencil disagreement; hessian level when reachable.

    Derived fields on a bundle chart can exhaust the jet order budget at
    hessian depth; those fall back to a gradient-level probe.
    """
    from .errors import ContractViolation

    order = 2
    try:
        jet = fld.jets(p, order)
    except ContractViolation:
        order = 1
        jet = fld.jets(p, order)
    ref = FDField(fld).jets(p, order)
    r = float(np.max(np.abs(jet.grad - ref.grad) / (1.0 + np.abs(ref.grad))))
    if order == 2:
        dh = float(np.max(np.abs(jet.hess - ref.hess) / (1.0 + np.abs(ref.hess))))
        r = max(r, dh)
    return r


def _fd_crosscheck(scenario, ctx, name, tol):
    total = lambda p: p
    fields = [(lbl, f, total) for lbl, f in scenario.space.metric.entry_fields()]
    fields += [(lbl, f, total) for lbl, f in scenario.space.conn.entry_fields()]
    setup = scenario.setup
    if setup is not None:
        fields += [(f"pi_{a + 1}", f, total) for a, f in enumerate(setup.pi)]
        if setup.phi is not None:
            fields.append(("phi", setup.phi, total))
        fields += [("base_" + lbl, f, setup.base_point)
                   for lbl, f in setup.base.metric.entry_fields()]
    pts = ctx.points(name)
    residuals, incidents, worst = [], 0, ""
    for k in range(FD_PROBES):
        label, fld, to_point = fields[k % len(fields)]
        p = to_point(pts[k % len(pts)])
        try:
            r = _probe_field(fld, p)
        except SubgeoError:
            incidents += 1
            continue
        if not residuals or r > max(residuals):
            worst = label
        residuals.append(r)
    res = summarize(name, residuals, tol, FD_PROBES, incidents=incidents)
    res.details["fields_probed"] = len(fields)
    res.details["worst_field"] = worst
    return res


def _submersion_driver(fn):
    def drive(scenario, ctx, name, tol):
        if scenario.setup is None:
            return _missing(name, "submersion")
        return fn(scenario.setup, ctx.points(name), tol)

    return drive


def _geodesic_driver(fn):
    def drive(scenario, ctx, name, tol):
        if scenario.setup is None:
            return _missing(name, "submersion")
        curves = ctx.curves()
        if not curves:
            return _missing(name, "geodesic jobs")
        res = fn(scenario.setup, list(curves.values()), tol)
        res.incidents += ctx.take_curve_incidents()
        return res

    return drive


def _geodesic_energy(scenario, ctx, name, tol):
    curves = ctx.curves()
    if not curves:
        return _missing(name, "geodesic jobs")
    residuals = [geodesics.energy_drift(scenario.space.metric, t)
                 for t in curves.values()]
    res = summarize(name, residuals, tol, len(curves),
                    incidents=ctx.take_curve_incidents())
    res.details["jobs"] = sorted(curves)
    return res


def _bundle_driver(fn):
    def drive(scenario, ctx, name, tol):
        if scenario.bundle is None:
            return _missing(name, "tangent bundle")
        return fn(scenario.bundle, ctx.points(name), tol)

    return drive


def _spec(name, ref, tol, desc, driver, needs=""):
    return CheckSpec(name, ref, tol, desc, driver, needs)


CHECK_TABLE = {s.name: s for s in [
    _spec("is_statistical", "§2 Definition", 1e-8,
          "torsion-freeness and total symmetry of the cubic form nabla g",
          _manifold_driver("is_statistical")),
    _spec("dual_involution", "§2 Definition", 1e-9,
          "taking the metric dual twice returns the original connection",
          _manifold_driver("check_dual_involution")),
    _spec("curvature_duality", "§2", 1e-8,
          "curvatures of a dual pair are skew-adjoint through the metric",
          _manifold_driver("check_curvature_duality")),
    _spec("constant_curvature", "§2 Example", 1e-8,
          "R(X,Y)Z matches k (g(Y,Z)X - g(X,Z)Y) for the scenario's k",
          _constant_curvature),
    _spec("fd_crosscheck", "numerics hygiene", 1e-4,
          "jet gradients and hessians agree with central differences",
          _fd_crosscheck),
    _spec("split_identities", "§2", 1e-9,
          "projector algebra of the vertical/horizontal splitting",
          _submersion_driver(submersion.check_split_identities), "submersion"),
    _spec("tensoriality", "§2", 1e-8,
          "fundamental tensors are pointwise in both arguments",
          _submersion_driver(submersion.check_tensoriality), "submersion"),
    _spec("gauss_weingarten", "§2", 1e-8,
          "Gauss-Weingarten split of covariant derivatives along the fibers",
          _submersion_driver(submersion.check_gauss_weingarten), "submersion"),
    _spec("semi_riemannian", "§2 Definition", 1e-8,
          "horizontal lifts are isometric and fibers stay nondegenerate",
          _submersion_driver(submersion.check_semi_riemannian), "submersion"),
    _spec("conformal_metric", "§3 Definition", 1e-8,
          "lifted metric equals e^(2 phi) times the base metric",
          _submersion_driver(submersion.check_conformal_metric), "submersion"),
    _spec("conformal_defect", "§3 Theorem 3.2", 1e-8,
          "conformal submersion defect of the total connection over the base",
          _submersion_driver(submersion.check_conformal_hd), "submersion"),
    _spec("affine_hd", "§2 Definition", 1e-8,
          "horizontal part of lifted covariant derivatives matches the base",
          _submersion_driver(submersion.check_affine_hd), "submersion"),
    _spec("dual_conformal_pair", "§3 Proposition", 1e-8,
          "primal and dual connections are conformal over the base together",
          _submersion_driver(submersion.check_dual_conformal_pair), "submersion"),
    _spec("lemma_components", "§3 Lemma", 1e-7,
          "six component identities for nabla g on mixed lift arguments",
          _submersion_driver(submersion.check_lemma_components), "submersion"),
    _spec("four_conditions", "§3 Theorem", 1e-8,
          "the four split conditions hold iff the total space is statistical",
          _submersion_driver(submersion.four_conditions_check), "submersion"),
    _spec("projectable", "§2", 1e-8,
          "induced base connection is constant along every fiber",
          _submersion_driver(submersion.check_projectable), "submersion"),
    _spec("induced_statistical", "§2 Theorem 2.1", 1e-7,
          "projected structure on the base is statistical when the total is",
          _submersion_driver(submersion.theorem21_verify), "submersion"),
    _spec("geodesic_projection", "§3.1 Theorem", 1e-6,
          "projection criterion verdict matches the base geodesic verdict",
          _geodesic_driver(geodesics.geodesic_projection_check), "geodesics"),
    _spec("curve_decomposition", "§3.1 Theorem", 1e-8,
          "horizontal/vertical decomposition of derivatives along curves",
          _geodesic_driver(geodesics.check_curve_decomposition), "geodesics"),
    _spec("sigma_second", "§3.1 Corollary", 1e-5,
          "second-derivative split of a geodesic through the submersion",
          _geodesic_driver(geodesics.check_sigma_second), "geodesics"),
    _spec("geodesic_energy", "integrator hygiene", 1e-6,
          "kinetic energy drift along integrated geodesics",
          _geodesic_energy, "geodesics"),
    _spec("tb_defining_rules", "§4 Definitions", 1e-8,
          "lifted metrics and connections reproduce their frame rules",
          _bundle_driver(tangent_bundle.check_defining_rules), "bundle"),
    _spec("prop41", "§4 Proposition 4.1", 1e-8,
          "bundle projection is affine with the horizontal distribution",
          _bundle_driver(tangent_bundle.prop41_check), "bundle"),
    _spec("prop42", "§4 Proposition 4.2", 1e-8,
          "bundle projection is a semi-Riemannian submersion for sasaki",
          _bundle_driver(tangent_bundle.prop42_check), "bundle"),
    _spec("tm_statistical", "§4 Theorem", 1e-7,
          "split conditions on TM agree with direct statisticity of the lift",
          _bundle_driver(tangent_bundle.tm_statistical_check), "bundle"),
    _spec("remark_complete_metric", "§4 Remark (a)", 1e-8,
          "complete lift pair stays statistical when the base pair is",
          _bundle_driver(tangent_bundle.remark_complete_check), "bundle"),
    _spec("remark_dual_complete", "§4 Remark (b)", 1e-8,
          "dual of the complete lift equals the complete lift of the dual",
          _bundle_driver(tangent_bundle.remark_dual_check), "bundle"),
    _spec("remark_horizontal", "§4 Remark (c)", 1e-7,
          "horizontal lift statisticity tracks metric compatibility below",
          _bundle_driver(tangent_bundle.remark_horizontal_check), "bundle"),
]}


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if value is None or isinstance(value, str):
        return value
    return repr(value)


def run_suite(cfg: SuiteConfig) -> dict:
    """Execute the configured checks and assemble the report."""
    scenario = build_scenario(cfg)
    requested = list(cfg.checks) if cfg.checks else [(n, None) for n in scenario.checks]
    ctx = RunContext(scenario, cfg.count, cfg.seed, cfg.boxes)

    rows = []
    attempted_total = 0
    incident_total = 0
    for name, tol_override in sorted(requested):
        spec = CHECK_TABLE[name]
        tol = spec.tolerance if tol_override is None else tol_override
        start = time.perf_counter()
        try:
            result = spec.driver(scenario, ctx, name, tol)
        except SubgeoError as exc:
            result = CheckResult(
                name=name, samples=0, max_residual=float("inf"), tolerance=tol,
                status=INCONCLUSIVE, details={"error": str(exc)}, incidents=1,
            )
        result.wall_time_s = time.perf_counter() - start
        result.paper_ref = spec.paper_ref
        result.name = name
        attempted_total += result.samples + result.incidents
        incident_total += result.incidents
        rows.append(result)

    incident_rate = incident_total / float(max(attempted_total, 1))
    report = {
        "schema": "subgeo-report/1",
        "suite": {
            "source": cfg.source,
            "target": scenario.name,
            "seed": cfg.seed,
            "samples": cfg.count,
            "mode": cfg.mode,
            "version": __version__,
        },
        "checks": [
            {
                "name": r.name,
                "paper_ref": r.paper_ref,
                "samples": r.samples,
                "max_residual": float(r.max_residual),
                "tolerance": float(r.tolerance),
                "status": r.status,
                "incidents": r.incidents,
                "details": _jsonable(r.details),
                "wall_time_s": r.wall_time_s,
            }
            for r in rows
        ],
        "summary": {
            "pass": sum(1 for r in rows if r.status == PASS),
            "fail": sum(1 for r in rows if r.status == "fail"),
            "inconclusive": sum(1 for r in rows if r.status == INCONCLUSIVE),
            "incident_rate": incident_rate,
        },
    }
    return report


def exit_code(report: dict) -> int:
    """0 all pass, 1 any non-pass, 3 when the incident rate tops 10%."""
    if report["summary"]["incident_rate"] > 0.10:
        return 3
    if report["summary"]["fail"] or report["summary"]["inconclusive"]:
        return 1
    return 0


def list_checks() -> str:
    lines = []
    for name in sorted(CHECK_TABLE):
        spec = CHECK_TABLE[name]
        lines.append(f"{name} [{spec.paper_ref}] - {spec.description}")
    return "\n".join(lines) + "\n"


def list_builtins() -> str:
    from .builtins import BUILTIN_PATTERNS

    lines = [f"{pattern} - {desc}" for pattern, desc in sorted(BUILTIN_PATTERNS)]
    return "\n".join(lines) + "\n"
