"""
🧭 spincyl command line
======================

JSON in, JSON out: every command prints its machine-readable result on
standard output and a short human summary on standard error.

Exit codes: 0 pass, 1 identity violation or failed precondition, 2 schema
error, 3 numerical conditioning error.
"""

import functools
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
import numpy as np

from algebra.clifford import Signature, multiplication_table
from algebra.spinor_rep import build_spinor_rep
from geometry.catalog import catalog_names
from lorentz.lorentz_space import geodesic_samples
from lorentz.spectral import classify_nd
from utils import console
from utils.errors import SchemaError, SpinCylError
from utils.formatting import dumps, loads
from workflows.cases import SUITES, CaseSpec, load_case, parse_case
from workflows.verification_workflow import VerificationWorkflow


def _emit(obj: Any) -> None:
    click.echo(dumps(obj))


def handle_errors(fn):
    """Turn library errors into their JSON error object and exit code"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SpinCylError as e:
            _emit(e.to_dict())
            console.failure(f"{e.kind}: {e.message}")
            sys.exit(e.exit_code)
    return wrapper


def _read_json(text: str) -> Any:
    try:
        return loads(text)
    except ValueError as e:
        raise SchemaError(f"malformed JSON: {e}") from e


def _spec_value(text: Optional[str]) -> Any:
    """An option value given as a JSON file path, inline JSON, or a plain catalog name"""
    if text is None:
        return None
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        try:
            return _read_json(path.read_text())
        except OSError as e:
            raise SchemaError(f"cannot read {text}: {e.strerror}", {"path": text}) from e
    if text.lstrip()[:1] in ("[", "{"):
        return _read_json(text)
    return text


def _points(values: Tuple[str, ...]) -> Optional[List[List[float]]]:
    """``--point 0.1,0.2`` repeated; None means random sample points"""
    if not values:
        return None
    try:
        return [[float(x) for x in value.split(",")] for value in values]
    except ValueError as e:
        raise SchemaError(f"--point expects comma-separated numbers: {e}", {"points": list(values)}) from e


def _case_from_input(spec_file: Optional[str], inline: Optional[str], fallback: Dict[str, Any]) -> CaseSpec:
    """A case from a file (``-`` for stdin), inline JSON, or the command's own options"""
    if spec_file is not None:
        try:
            stream = click.open_file(spec_file, "r")
        except OSError as e:
            raise SchemaError(f"cannot read case file {spec_file}: {e.strerror}", {"path": spec_file}) from e
        with stream:
            return load_case(stream.read())
    if inline is not None:
        return load_case(inline)
    return parse_case(fallback)


def _finish_case(workflow: VerificationWorkflow, case: CaseSpec, extra: Optional[Dict[str, Any]] = None) -> None:
    result = workflow.run_analysis(case)
    if result["status"] == "error":
        raise result["error"]
    report = result["report"]
    out = report.to_dict(timing=workflow.timing)
    if extra:
        out.update(extra)
    _emit(out)
    if report.passed:
        console.success(f"{report.name}: pass")
        return
    console.failure(f"{report.name}: fail ({', '.join(report.failures)})")
    sys.exit(1)


def _print_catalog(ctx: click.Context, _param: click.Parameter, value: bool) -> None:
    if not value or ctx.resilient_parsing:
        return
    _emit({**catalog_names(), "suites": sorted(SUITES)})
    ctx.exit(0)


@click.group()
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default from SPINCYL_LOG_LEVEL)")
@click.option("--tol", type=float, default=None, help="Override the case tolerance")
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Override the sample count")
@click.option("--seed", type=int, default=None, help="Seed of every randomized choice")
@click.option("--timing", is_flag=True, help="Include wall-clock timings in the JSON report")
@click.option("--catalog-list", is_flag=True, expose_value=False, is_eager=True, callback=_print_catalog,
              help="Print the builtin catalog names and exit")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], tol: Optional[float], samples: Optional[int],
        seed: Optional[int], timing: bool) -> None:
    """🌀 Generalized cylinders, spinors and Lorentzian geodesics"""
    console.setup_logging(log_level)
    ctx.obj = VerificationWorkflow(tol=tol, samples=samples, seed=seed, timing=timing)


spec_argument = click.argument("spec_file", required=False, type=click.Path(allow_dash=True))
json_option = click.option("--json", "inline", default=None, help="Inline case JSON")


def case_knobs(fn):
    """``--tol/--samples/--seed`` after the subcommand; they win over the group-level values"""
    @click.option("--tol", "sub_tol", type=float, default=None, help="Override the case tolerance")
    @click.option("--samples", "sub_samples", type=click.IntRange(min=1), default=None,
                  help="Override the sample count")
    @click.option("--seed", "sub_seed", type=int, default=None, help="Seed of every randomized choice")
    @functools.wraps(fn)
    def wrapper(workflow: VerificationWorkflow, *args, sub_tol: Optional[float] = None,
                sub_samples: Optional[int] = None, sub_seed: Optional[int] = None, **kwargs):
        return fn(workflow.with_overrides(sub_tol, sub_samples, sub_seed), *args, **kwargs)
    return wrapper


@cli.command()
@spec_argument
@json_option
@click.pass_obj
@case_knobs
@handle_errors
def run(workflow: VerificationWorkflow, spec_file: Optional[str], inline: Optional[str]) -> None:
    """Run one case file (or ``-`` for standard input)"""
    if spec_file is None and inline is None:
        raise SchemaError("run needs a case file or --json")
    _finish_case(workflow, _case_from_input(spec_file, inline, {}))


@cli.command()
@click.argument("scope", default="all", type=click.Choice(["all", *sorted(SUITES)]))
@click.option("--max-workers", type=click.IntRange(min=1), default=None, help="Worker threads (default from config)")
@click.option("--seed", "suite_seed", type=int, default=None, help="Seed of every randomized choice")
@click.pass_obj
@handle_errors
def suite(workflow: VerificationWorkflow, scope: str, max_workers: Optional[int], suite_seed: Optional[int]) -> None:
    """Run the builtin acceptance suite of one module or of all of them"""
    workflow = workflow.with_overrides(seed=suite_seed)
    if max_workers is not None:
        workflow.max_workers = max_workers
    console.info(f"suite {scope}, seed {workflow.seed if workflow.seed is not None else 'default'}")
    result = workflow.run_suite(scope, progress=True)["report"]
    _emit(result.to_dict(timing=workflow.timing))
    summary = result.to_dict()["summary"]
    console.report(f"{summary['passed']}/{summary['cases']} cases passed")
    if result.passed:
        console.success(f"suite {scope}: pass")
        return
    console.failure(f"suite {scope}: failed {', '.join(summary['failed'])}")
    # a suite that only failed through errors exits with the first error's code
    error = result.error
    if error is not None and all(r.error is not None for r in result.reports if not r.passed):
        sys.exit(error.get("exit_code", 1))
    sys.exit(1)


# ---------------------------------------------------------------------------
# clifford
# ---------------------------------------------------------------------------

@cli.group()
def clifford() -> None:
    """Clifford algebras and spinor representations"""


@clifford.command("table")
@click.option("--signature", "signature", required=True, help='Signature "r,s"')
@handle_errors
def clifford_table(signature: str) -> None:
    """Blade multiplication table"""
    sig = _signature(signature)
    _emit({"signature": [sig.r, sig.s], **multiplication_table(sig)})
    console.success(f"Cl{sig}: {2 ** sig.n} blades")


@clifford.command("rep")
@click.option("--signature", "signature", required=True, help='Signature "r,s"')
@click.pass_obj
@case_knobs
@handle_errors
def clifford_rep(workflow: VerificationWorkflow, signature: str) -> None:
    """Gamma matrices, volume element and invariant form, with their identity residuals"""
    sig = _signature(signature)
    rep = build_spinor_rep(sig)
    extra = {"representation": {"gamma": list(rep.gamma), "volume": rep.volume, "beta": rep.beta,
                                "beta_skew": rep.beta_skew, "module": rep.module_label}}
    _finish_case(workflow, parse_case({"kind": "clifford", "payload": {"signature": signature}}), extra)


def _signature(text: str) -> Signature:
    return Signature.parse(text)


# ---------------------------------------------------------------------------
# cylinder / embed / spin
# ---------------------------------------------------------------------------

@cli.group()
def cylinder() -> None:
    """Curvature identities of generalized cylinders"""


@cylinder.command("verify")
@spec_argument
@json_option
@click.option("--family", "family_spec", default="warped:cos", help="Catalog family name or family JSON (inline or file)")
@click.option("--leaf", default=None, help="Leaf metric for warped:<f> families")
@click.option("--t", "t_values", type=float, multiple=True, help="Leaf parameters (default: random)")
@click.pass_obj
@case_knobs
@handle_errors
def cylinder_verify(workflow: VerificationWorkflow, spec_file: Optional[str], inline: Optional[str],
                    family_spec: str, leaf: Optional[str], t_values: tuple) -> None:
    """Closed-form cylinder curvature against the brute-force curvature"""
    payload = {"family": _spec_value(family_spec), "leaf": leaf, "t_values": list(t_values) or None}
    _finish_case(workflow, _case_from_input(spec_file, inline, {"kind": "cylinder", "payload": payload}))


@cli.group()
def embed() -> None:
    """Constant-curvature cylinders from hypersurface data"""


@embed.command("verify")
@spec_argument
@json_option
@click.option("--datum", default=None, help="Catalog embedding datum (default sphere_cone)")
@click.option("--g", "metric_spec", default=None, help="Hypersurface metric: catalog name or metric JSON")
@click.option("--A", "endo_spec", default=None, help="Shape endomorphism as JSON (inline or file)")
@click.option("--kappa", type=float, default=None, help="Ambient curvature κ")
@click.option("--expect-fail", is_flag=True, help="Treat the data as a negative control")
@click.pass_obj
@case_knobs
@handle_errors
def embed_verify(workflow: VerificationWorkflow, spec_file: Optional[str], inline: Optional[str],
                 datum: Optional[str], metric_spec: Optional[str], endo_spec: Optional[str],
                 kappa: Optional[float], expect_fail: bool) -> None:
    """Curvature of the cylinder built from (g, A, κ)"""
    explicit = {"metric": _spec_value(metric_spec), "endomorphism": _spec_value(endo_spec), "kappa": kappa}
    if datum is None and all(value is None for value in explicit.values()):
        datum = "sphere_cone"
    payload: Dict[str, Any] = {"expect_fail": expect_fail}
    if datum is not None:
        payload["datum"] = datum
    else:
        payload.update(explicit)
    _finish_case(workflow, _case_from_input(spec_file, inline, {"kind": "embed", "payload": payload}))


@cli.group()
def spin() -> None:
    """Spinor variation and Killing-cylinder checks"""


@spin.command("variation-check")
@spec_argument
@json_option
@click.option("--family", "family_spec", default="linear", help="Catalog family name or family JSON (inline or file)")
@click.option("--spinor", "spinor_spec", default=None,
              help='Spinor JSON {"components": [[re, im], ...]} (inline or file); default a fixed polynomial spinor')
@click.option("--point", "points", multiple=True, help="Evaluation point as comma-separated coordinates")
@click.option("--check", type=click.Choice(["variation", "commutator", "lagrangian"]), default="variation")
@click.option("--t0", type=float, default=0.0)
@click.option("--lam", type=float, default=0.0, help="λ of the Lagrangian check")
@click.option("--convergence", is_flag=True, help="Also report the t-step halving ratio")
@click.pass_obj
@case_knobs
@handle_errors
def spin_variation(workflow: VerificationWorkflow, spec_file: Optional[str], inline: Optional[str],
                   family_spec: str, spinor_spec: Optional[str], points: Tuple[str, ...], check: str,
                   t0: float, lam: float, convergence: bool) -> None:
    """Variation of the transported Dirac operator against its closed form"""
    payload = {"check": check, "family": _spec_value(family_spec), "spinor": _spec_value(spinor_spec),
               "points": _points(points), "t0": t0, "lam": lam, "convergence": convergence}
    fallback = {"kind": "spin", "payload": payload, "samples": 2}
    _finish_case(workflow, _case_from_input(spec_file, inline, fallback))


@spin.command("killing-check")
@spec_argument
@json_option
@click.option("--case", "--datum", "datum", type=click.Choice(["flat", "sphere_cone", "non_codazzi"]),
              default="sphere_cone", help="Catalog Killing data")
@click.option("--energy", is_flag=True, help="Check the energy-momentum tensor instead")
@click.pass_obj
@case_knobs
@handle_errors
def spin_killing(workflow: VerificationWorkflow, spec_file: Optional[str], inline: Optional[str],
                 datum: str, energy: bool) -> None:
    """Parallel spinors on the cylinder over generalized Killing data"""
    payload = {"check": "energy" if energy else "killing", "datum": datum}
    fallback = {"kind": "spin", "payload": payload, "samples": 3}
    _finish_case(workflow, _case_from_input(spec_file, inline, fallback))


# ---------------------------------------------------------------------------
# lorentz
# ---------------------------------------------------------------------------

@cli.group()
def lorentz() -> None:
    """Geodesics in the space of Lorentzian inner products"""


def _pair_payload(g0: Optional[str], g1: Optional[str]) -> Dict[str, Any]:
    if g0 is None or g1 is None:
        raise SchemaError("both --g0 and --g1 are required without a case file")
    return {"g0": _spec_value(g0), "g1": _spec_value(g1)}


@lorentz.command("classify")
@spec_argument
@json_option
@click.option("--g0", default=None, help="Gram matrix of g₀ as JSON (inline or file)")
@click.option("--g1", default=None, help="Gram matrix of g₁ as JSON (inline or file)")
@click.pass_obj
@case_knobs
@handle_errors
def lorentz_classify(workflow: VerificationWorkflow, spec_file: Optional[str], inline: Optional[str],
                     g0: Optional[str], g1: Optional[str]) -> None:
    """Unique, none or infinitely many geodesics from g₀ to g₁"""
    if spec_file is None and inline is None:
        case = parse_case({"kind": "lorentz", "payload": _pair_payload(g0, g1)})
    else:
        case = _case_from_input(spec_file, inline, {})
    _finish_case(workflow, case)


@lorentz.command("interpolate")
@click.option("--g0", required=True, help="Gram matrix of g₀ as JSON (inline or file)")
@click.option("--g1", required=True, help="Gram matrix of g₁ as JSON (inline or file)")
@click.option("--samples", "--steps", "steps", type=click.IntRange(min=2), default=5,
              help="Number of equally spaced t in [0, 1]")
@click.option("--s", "member_s", type=float, default=0.0, help="Family parameter for the antipodal case")
@click.option("--branch", type=click.Choice(["1", "-1"]), default="1")
@handle_errors
def lorentz_interpolate(g0: str, g1: str, steps: int, member_s: float, branch: str) -> None:
    """JSON array of the Gram matrices g_t at equally spaced t in [0, 1]"""
    pair = _pair_payload(g0, g1)
    try:
        g0_matrix, g1_matrix = np.asarray(pair["g0"], dtype=float), np.asarray(pair["g1"], dtype=float)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"--g0/--g1 must be numeric matrices: {e}") from e
    verdict = classify_nd(g0_matrix, g1_matrix)
    if not verdict.connected:
        _emit([])
        console.warning(f"{verdict.kind.value}: nothing to interpolate")
        sys.exit(1)
    member = (member_s, int(branch)) if verdict.family is not None else None
    _emit(geodesic_samples(verdict, steps, member))
    console.success(f"{verdict.kind.value}: {steps} samples, residuals {verdict.residuals()}")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@cli.group()
def catalog() -> None:
    """Builtin metrics, families, embedding data and suites"""


@catalog.command("list")
def catalog_list() -> None:
    _emit({**catalog_names(), "suites": sorted(SUITES)})


if __name__ == "__main__":
    cli()
