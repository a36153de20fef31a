"""
🔄 Verification Workflow
=======================

Runs verification cases against the engines and assembles reports:

- ``run(spec)`` dispatches one CaseSpec to its module runner and returns a
  Report holding the residual table, the tolerances, pass/fail and a
  provenance echo of the input
- ``suite(scope, seed)`` runs a builtin acceptance suite concurrently and
  returns the reports sorted by case name
- ``VerificationWorkflow.run_analysis`` wraps both in the status/error dict
  used by the command line
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from algebra.clifford import CliffordElement, Signature, geometric_product, inner
from algebra.spinor_rep import build_spinor_rep, volume_phase
from geometry.catalog import (WARPINGS, embedding_datum, family, flat, metric, round_sphere,
                              sphere_killing_spinor_value)
from geometry.chart_tensor import MetricField, metric_from_json, sample_points
from geometry.cylinder import IDENTITIES, MetricFamily, cylinder_curvature, family_from_json, warped_family
from geometry.embedding import EndoField, endo_from_json, killing_family, verify_embedding
from geometry.expressions import coord
from lorentz.lorentz_space import (ConnectionVerdict, geodesic_samples, random_lorentz_pair)
from lorentz.spectral import classify_nd, eigvec_vmu, sign_pattern, spectral_split
from spin.hypersurface import commutator_residual, leaf_rep
from spin.killing import killing_cylinder_check
from spin.spin_field import SpinorField, spinor_from_json
from spin.variation import (convergence_ratio, energy_momentum, generalized_killing_energy,
                            lagrangian_variation_check, variation_check, volume_derivative_check)
from utils.config import resolve
from utils.errors import PreconditionError, SchemaError, SignatureMismatchError, SpinCylError
from utils.numerics import make_rng
from workflows.cases import (CaseSpec, CliffordPayload, CylinderPayload, EmbedPayload, LorentzPayload,
                             SpinPayload, builtin_cases)

logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "1.0"

# fixed tolerances of the exact and matrix-level checks
MATRIX_TOL = 1e-12
VOLUME_TOL = 1e-10
LORENTZ_TOL = 1e-9
SPECTRAL_TOL = 1e-8
ENERGY_TOL = 1e-5
VOLUME_DERIVATIVE_TOL = 1e-6


@dataclass
class Report:
    """📊 Residual table of one case; pass means every residual is within its tolerance"""

    name: str
    kind: str
    residuals: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)
    # module-specific summary keys, printed at the top level of the JSON report
    headline: Dict[str, Any] = field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None
    elapsed: float = 0.0

    def check(self, key: str, residual: float, tol: float) -> None:
        """Record a residual, keeping the worst value seen for ``key``"""
        residual = float(residual)
        if key in self.residuals and not np.isnan(self.residuals[key]):
            residual = max(residual, self.residuals[key])
        self.residuals[key] = residual
        self.tolerances[key] = float(tol)

    @property
    def failures(self) -> List[str]:
        # NaN residuals fail
        return sorted(k for k, v in self.residuals.items() if not v <= self.tolerances[k])

    @property
    def passed(self) -> bool:
        return self.error is None and not self.failures

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        out = {**self.headline,
               "name": self.name, "kind": self.kind, "residuals": self.residuals, "tolerances": self.tolerances,
               "pass": self.passed, "failures": self.failures, "details": self.details,
               "provenance": self.provenance, "artifact_version": ARTIFACT_VERSION}
        if self.error is not None:
            out["error"] = self.error
        if timing:
            out["elapsed"] = self.elapsed
        return out


@dataclass
class SuiteReport:
    """📊 Aggregate of a suite run"""

    scope: str
    seed: int
    reports: List[Report] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def error(self) -> Optional[Dict[str, Any]]:
        """The first case error, which decides the exit code when nothing else failed"""
        return next((r.error for r in self.reports if r.error is not None), None)

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        out = {"scope": self.scope, "seed": self.seed, "pass": self.passed,
               "summary": {"cases": len(self.reports), "passed": sum(r.passed for r in self.reports),
                           "failed": sorted(r.name for r in self.reports if not r.passed)},
               "cases": [r.to_dict(timing) for r in self.reports], "artifact_version": ARTIFACT_VERSION}
        if timing:
            out["elapsed"] = self.elapsed
        return out


# ---------------------------------------------------------------------------
# shared input resolution
# ---------------------------------------------------------------------------

def resolve_family(spec: Any, leaf: Optional[str] = None, seed: Optional[int] = None) -> MetricFamily:
    """Catalog name, ``warped:<f>`` over a named leaf, or family JSON"""
    if isinstance(spec, dict):
        return family_from_json(spec)
    if leaf is not None:
        if not spec.startswith("warped:") or spec.split(":", 1)[1] not in WARPINGS:
            raise SchemaError(f"a leaf can only be combined with warped:<f> families, got {spec!r}")
        f = spec.split(":", 1)[1]
        return warped_family(WARPINGS[f], metric(leaf), (-0.5, 0.5), name=f"{spec}({leaf})")
    return family(spec, seed)


def resolve_metric(spec: Any) -> MetricField:
    return metric_from_json(spec) if isinstance(spec, dict) else metric(spec)


def default_spinor(leaf: MetricField, rep) -> SpinorField:
    """A non-parallel polynomial spinor, so the Dirac variations do not vanish identically"""
    last = f"x{leaf.dim - 1}"
    components = [["1 + 0.3*x0", f"0.2*{last}"], [f"0.1*{last}", "-0.2*x0"]] + [["0", "0"]] * (rep.dim - 2)
    return SpinorField.from_expressions(leaf, rep, components[:rep.dim], name="polynomial")


def killing_datum(name: str) -> Tuple[MetricField, EndoField, SpinorField]:
    """(g, A, ψ) with ∇_X ψ = ½ A(X)·ψ, except for ``non_codazzi``"""
    sig = Signature(2, 0)
    rep = leaf_rep(sig)
    sigma0 = np.zeros(rep.dim, dtype=complex)
    sigma0[0] = 1.0
    if name == "sphere_cone":
        g = round_sphere(2)
        value = sphere_killing_spinor_value(rep.gamma[0], rep.gamma[1], sigma0)
        return g, EndoField.scalar(g, 1.0), SpinorField(metric=g, rep=rep, value=value, name="killing")
    g = flat(sig)
    if name == "flat":
        A = EndoField.scalar(g, 0.0)
    elif name == "non_codazzi":
        A = EndoField.from_expressions([[coord(1), 0], [0, 0]], name="diag(x1, 0)")
    else:
        raise SchemaError(f"unknown Killing datum {name!r}")
    return g, A, SpinorField.constant(g, rep, sigma0)


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

def _run_clifford(case: CaseSpec, payload: CliffordPayload, report: Report) -> None:
    sig = payload.parsed
    zero = CliffordElement(sig)
    violations = 0
    for i in range(1, sig.n + 1):
        for j in range(1, sig.n + 1):
            ei, ej = CliffordElement.basis(sig, i), CliffordElement.basis(sig, j)
            relation = geometric_product(ei, ej) + geometric_product(ej, ei) \
                + CliffordElement.scalar(sig, 2 * inner(ei, ej))
            violations += relation != zero
    report.check("blade_relation", violations, 0.0)
    report.details["signature"] = [sig.r, sig.s]
    if not payload.matrices:
        return
    rep = build_spinor_rep(sig)
    for key, value in rep.invariant_residuals().items():
        report.check(key, value, MATRIX_TOL if key == "clifford" else VOLUME_TOL)
    phase = volume_phase(sig)
    eigenvalues = np.linalg.eigvals(rep.volume)
    report.check("volume_eigenvalues",
                 max(min(abs(lam - phase), abs(lam + phase)) for lam in eigenvalues), VOLUME_TOL)
    report.details.update({"dim": rep.dim, "module": rep.module_label, "beta_skew": rep.beta_skew,
                           "volume_phase": phase})


def _run_cylinder(case: CaseSpec, payload: CylinderPayload, report: Report) -> None:
    fam = resolve_family(payload.family, payload.leaf, case.seed)
    fam.validate()
    rng = make_rng(case.seed)
    points = sample_points(fam.domain, case.samples, rng, margin=0.1)
    lo, hi = fam.t_interval
    if payload.t_values:
        ts = [payload.t_values[k % len(payload.t_values)] for k in range(case.samples)]
    else:
        ts = list(lo + (hi - lo) * (0.1 + 0.8 * rng.random(case.samples)))
    tol = resolve("curvature_tol", case.tol)
    worst: Dict[str, Any] = {}
    for t, x in zip(ts, points):
        curvature = cylinder_curvature(fam, float(t), x)
        for key in IDENTITIES:
            value = curvature.residuals.get(key, 0.0)
            if value >= report.residuals.get(key, -1.0):
                worst[key] = {"t": float(t), "point": x.tolist()}
            report.check(key, value, tol)
    report.details.update({"family": fam.name, "t_interval": [lo, hi], "worst_points": worst})
    report.headline["max_residual_by_identity"] = {key: report.residuals[key] for key in IDENTITIES
                                                   if key in report.residuals}


def _run_embed(case: CaseSpec, payload: EmbedPayload, report: Report) -> None:
    if payload.datum is not None:
        datum = embedding_datum(payload.datum)
        g, A, kappa = datum.metric, datum.endomorphism, datum.kappa
    else:
        g, A, kappa = resolve_metric(payload.metric), endo_from_json(payload.endomorphism), payload.kappa
    result = verify_embedding(g, A, kappa, samples=case.samples, tol=case.tol, seed=case.seed)
    residual = result.curvature.curvature_residual
    if payload.expect_fail:
        # negative control: the construction must visibly miss constant curvature
        report.check("negative_control", 0.1 / max(residual, 1e-300), 1.0)
    else:
        report.check("constant_curvature", residual, result.tol)
    summary = result.to_dict()
    report.details.update(summary)
    report.headline.update({key: summary[key] for key in
                            ("codazzi_residual", "gauss_residual", "window", "curvature_residual")})


def _family_spin_check(case: CaseSpec, payload: SpinPayload, report: Report) -> None:
    fam = resolve_family(payload.family, seed=case.seed)
    rep = leaf_rep(fam.signature)
    leaf = fam.slice(payload.t0)
    psi = spinor_from_json(payload.spinor, leaf, rep) if payload.spinor else default_spinor(leaf, rep)
    if payload.points:
        points = np.asarray(payload.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != fam.dim:
            raise SchemaError(f"points must have {fam.dim} coordinates", {"points": payload.points})
    else:
        points = sample_points(fam.domain, case.samples, make_rng(case.seed), margin=0.2)
    tol = resolve("curvature_tol", case.tol)
    for p in points:
        if payload.check == "variation":
            report.check("variation", variation_check(fam, psi, payload.t0, p).residual, tol)
        elif payload.check == "commutator":
            report.check("commutator", commutator_residual(fam, psi, payload.t0, p), tol)
        else:
            result = lagrangian_variation_check(fam, psi, payload.lam, payload.t0, p)
            report.check("lagrangian", result["residual"], tol)
            report.check("volume_derivative", volume_derivative_check(fam, payload.t0, p)["residual"],
                         VOLUME_DERIVATIVE_TOL)
    if payload.convergence:
        ratio = convergence_ratio(fam, psi, payload.t0, points[0])
        report.check("convergence_order", abs(ratio - 4.0), 1.0)
        report.details["convergence_ratio"] = ratio
    report.details.update({"family": fam.name, "spinor": psi.name, "t0": payload.t0})


def _killing_spin_check(case: CaseSpec, payload: SpinPayload, report: Report) -> None:
    g, A, psi = killing_datum(payload.datum)
    if payload.datum == "non_codazzi":
        try:
            killing_cylinder_check(g, A, psi, samples=case.samples, seed=case.seed)
        except PreconditionError as e:
            report.check("rejected", 0.0, 0.0)
            report.details["rejection"] = e.to_dict()
            return
        report.check("rejected", 1.0, 0.0)
        return
    if payload.check == "killing":
        result = killing_cylinder_check(g, A, psi, samples=case.samples, tol=case.tol, seed=case.seed)
        report.check("killing_cylinder", result.residual, result.tol)
        report.details.update(result.to_dict())
        return
    points = sample_points(g.domain, case.samples, make_rng(case.seed), margin=0.2)
    for p in points:
        Q = energy_momentum(psi, p)
        expected = generalized_killing_energy(psi, A(p), p)
        report.check("energy_momentum", np.abs(Q.frame_components - expected.frame_components).max(),
                     case.tol or ENERGY_TOL)
    fam = killing_family(g, A, check=False)
    for p in points:
        report.check("volume_derivative", volume_derivative_check(fam, 0.0, p)["residual"], VOLUME_DERIVATIVE_TOL)


def _run_spin(case: CaseSpec, payload: SpinPayload, report: Report) -> None:
    if payload.check in ("variation", "commutator", "lagrangian"):
        _family_spin_check(case, payload, report)
    else:
        _killing_spin_check(case, payload, report)


def _lorentz_residuals(verdict: ConnectionVerdict, report: Report, samples: int) -> None:
    G1 = verdict.g1
    scale = max(1.0, float(np.abs(np.linalg.solve(verdict.g0, G1)).max()))
    for key, value in verdict.residuals().items():
        report.check(key, value, LORENTZ_TOL * scale)
    if not verdict.connected:
        return
    member = (0.0, 1) if verdict.family is not None else None
    try:
        path = geodesic_samples(verdict, samples, member)
    except SignatureMismatchError:
        report.check("signature", 1.0, 0.0)
        return
    report.check("signature", 0.0, 0.0)
    report.check("endpoint", np.abs(path[-1] - G1).max(), LORENTZ_TOL * scale * 10)


def _spectral_residuals(g0: np.ndarray, g1: np.ndarray, report: Report) -> Dict[str, Any]:
    data = spectral_split(g0, g1)
    report.check("characteristic_polynomial", data.brute_force_residual, SPECTRAL_TOL)
    checks = []
    for root in data.roots:
        if root.is_real and root.multiplicity == 1:
            check = eigvec_vmu(data, root.real)
            report.check("normv", check.normv_residual, SPECTRAL_TOL * max(1.0, abs(check.g_norm)))
            report.check("eigenvector", check.eigen_residual, SPECTRAL_TOL)
            checks.append(check.to_dict())
    return {"case": data.case, "m": data.m, "eigenvectors": checks, "sign_pattern": sign_pattern(data)}


def _run_lorentz(case: CaseSpec, payload: LorentzPayload, report: Report) -> None:
    if payload.random is None:
        g0, g1 = np.asarray(payload.g0, dtype=float), np.asarray(payload.g1, dtype=float)
        verdict = classify_nd(g0, g1)
        if payload.expect is not None:
            report.check("verdict", float(verdict.kind != payload.expect), 0.0)
        _lorentz_residuals(verdict, report, payload.samples)
        if g0.shape[0] >= 3:
            report.details["spectral"] = _spectral_residuals(g0, g1, report)
        summary = verdict.to_dict()
        report.details["verdict"] = summary
        report.headline.update({key: summary[key] for key in ("verdict", "generator", "diagnostics")
                                if key in summary})
        return
    rng = make_rng(case.seed)
    kinds: Dict[str, int] = {}
    for _ in range(payload.random):
        g0, g1 = random_lorentz_pair(rng, payload.dim)
        verdict = classify_nd(g0, g1)
        kinds[verdict.kind.value] = kinds.get(verdict.kind.value, 0) + 1
        report.check("not_unique", float(not verdict.unique), 0.0)
        _lorentz_residuals(verdict, report, payload.samples)
        if payload.dim >= 3:
            _spectral_residuals(g0, g1, report)
    report.details.update({"dim": payload.dim, "pairs": payload.random, "verdicts": dict(sorted(kinds.items()))})


RUNNERS: Dict[str, Callable[[CaseSpec, Any, Report], None]] = {
    "clifford": _run_clifford,
    "cylinder": _run_cylinder,
    "embed": _run_embed,
    "spin": _run_spin,
    "lorentz": _run_lorentz,
}


def run(spec: CaseSpec) -> Report:
    """
    Run one case. Library errors propagate; use ``run_safely`` to record
    them in the report instead.
    """
    report = Report(name=spec.name, kind=spec.kind, provenance=spec.model_dump(mode="json"))
    start = time.perf_counter()
    logger.info("🔍 running %s", spec.name)
    RUNNERS[spec.kind](spec, spec.typed, report)
    report.elapsed = time.perf_counter() - start
    if report.passed:
        logger.info("✅ %s passed", spec.name)
    else:
        logger.warning("❌ %s failed: %s", spec.name, ", ".join(report.failures))
    return report


def run_safely(spec: CaseSpec) -> Report:
    try:
        return run(spec)
    except SpinCylError as e:
        logger.error("❌ %s: %s", spec.name, e.message)
        return Report(name=spec.name, kind=spec.kind, provenance=spec.model_dump(mode="json"),
                      error={**e.to_dict(), "exit_code": e.exit_code})


def suite(scope: str = "all", seed: Optional[int] = None, max_workers: Optional[int] = None,
          progress: bool = False) -> SuiteReport:
    """Run a builtin suite; the report is sorted by case name, independent of completion order"""
    seed = resolve("seed", seed)
    cases = builtin_cases(scope, seed)
    start = time.perf_counter()
    reports: List[Report] = []
    with ThreadPoolExecutor(max_workers=resolve("max_workers", max_workers)) as executor:
        future_to_case = {executor.submit(run_safely, case): case for case in cases}
        for future in tqdm(as_completed(future_to_case), total=len(cases), desc=f"suite {scope}",
                           disable=not progress):
            reports.append(future.result())
    reports.sort(key=lambda r: r.name)
    return SuiteReport(scope=scope, seed=seed, reports=reports, elapsed=time.perf_counter() - start)


class VerificationWorkflow:
    """
    🚀 Case and suite runner with the status/error result dicts of the
    command line.
    """

    def __init__(self, tol: Optional[float] = None, samples: Optional[int] = None,
                 seed: Optional[int] = None, max_workers: Optional[int] = None, timing: bool = False):
        self.tol = tol
        self.timing = timing
        self.samples = samples
        self.seed = seed
        self.max_workers = max_workers

    def with_overrides(self, tol: Optional[float] = None, samples: Optional[int] = None,
                       seed: Optional[int] = None) -> "VerificationWorkflow":
        """A copy whose knobs are replaced by the given non-None values"""
        return VerificationWorkflow(tol=self.tol if tol is None else tol,
                                    samples=self.samples if samples is None else samples,
                                    seed=self.seed if seed is None else seed,
                                    max_workers=self.max_workers, timing=self.timing)

    def apply_overrides(self, spec: CaseSpec) -> CaseSpec:
        """Command-line --tol/--samples/--seed win over the values in the case"""
        update = {k: v for k, v in (("tol", self.tol), ("samples", self.samples), ("seed", self.seed))
                  if v is not None}
        return spec.model_copy(update=update) if update else spec

    def run_analysis(self, spec: CaseSpec) -> Dict[str, Any]:
        spec = self.apply_overrides(spec)
        try:
            report = run(spec)
        except SpinCylError as e:
            return {"status": "error", "error": e, "report": None}
        return {"status": "success" if report.passed else "failed", "error": None, "report": report}

    def run_suite(self, scope: str = "all", progress: bool = True) -> Dict[str, Any]:
        result = suite(scope, self.seed, self.max_workers, progress=progress)
        return {"status": "success" if result.passed else "failed", "error": None, "report": result}
