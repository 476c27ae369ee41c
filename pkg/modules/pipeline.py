#!/usr/bin/env python3
"""
Pipeline module for nilcohom
Dispatches one subcommand per run: loads the algebra, runs the requested stage
and writes the report, CSV artifacts and the manifest.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from modules.adapted_rep import build_adapted, quotient_reduction
from modules.algebra_core import (
    LatticeData,
    NilpotentLieAlgebra,
    Vector,
    parse_vector,
    vector_to_float,
)
from modules.coadjoint import (
    LinearForm,
    perp_inclusions,
    maximal_rank_conditions,
    orbit_invariants,
    polarizing_subalgebra,
    weakly_integral,
)
from modules.config_manager import ConfigManager
from modules.diophantine import certify, frequency_vector
from modules.nilflow_sim import (
    NilPoint,
    Observable,
    birkhoff_series,
    character_closed_form,
    equidistribution_report,
)
from modules.recipes import parse_recipe
from modules.rep_solver import (
    EstimateViolated,
    RepFunction,
    SolverSettings,
    apply_X,
    check_central_bound,
    check_green_estimates,
    check_invdist_estimate,
    green,
    invariant_distribution,
    y_sobolev_norm,
)
from modules.report_manager import ReportManager
from modules.validation import InternalError, RunConfig, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_ESTIMATE = 3

SOLUTION_CSV = "solution.csv"
SHELLS_CSV = "shells.csv"
BIRKHOFF_CSV = "birkhoff.csv"


@dataclass
class PipelineDependencies:
    """Collaborators of a pipeline run; tests inject their own."""
    config_manager: ConfigManager
    report_manager: ReportManager


class PipelineRunner:
    """Runs one subcommand described by a RunConfig."""

    def __init__(self, config: RunConfig, dependencies: Optional[PipelineDependencies] = None):
        self.config = config
        if dependencies:
            self.config_manager = dependencies.config_manager
            self.report_manager = dependencies.report_manager
        else:
            self.config_manager = ConfigManager()
            self.report_manager = ReportManager(config.out_dir, config.precision)
        if config.seed is not None:
            np.random.seed(config.seed)
        self._handlers: Dict[str, Callable[[], Dict[str, Any]]] = {
            "analyze": self.analyze,
            "orbit": self.orbit,
            "adapt": self.adapt,
            "solve": self.solve,
            "diophantine": self.diophantine,
            "simulate": self.simulate,
        }

    def execute(self) -> Dict[str, Any]:
        """Run the subcommand and write report.json plus manifest.json."""
        logging.info(f"▶️  Running '{self.config.subcommand}'")
        body = self._handlers[self.config.subcommand]()
        report = {"subcommand": self.config.subcommand, "seed": self.config.seed}
        report.update(body)
        self.report_manager.save_report(report)
        self.report_manager.write_manifest()
        logging.info(f"📁 Artifacts written to {self.report_manager.output_dir}")
        return report

    # Inputs

    def _algebra(self) -> NilpotentLieAlgebra:
        if not self.config.algebra_path:
            raise ValidationError(f"'{self.config.subcommand}' needs an algebra file")
        return self.config_manager.load_algebra(self.config.algebra_path)

    def _lambda(self, algebra: NilpotentLieAlgebra) -> LinearForm:
        if not self.config.lambda_form:
            raise ValidationError("--lambda is required")
        return LinearForm.parse(algebra, self.config.lambda_form)

    def _x(self, algebra: NilpotentLieAlgebra) -> Vector:
        if not self.config.x_vector:
            raise ValidationError("--X is required")
        return parse_vector(self.config.x_vector, algebra.dim)

    def _settings(self) -> SolverSettings:
        c = self.config
        return SolverSettings(
            grid_n=c.grid_n,
            grid_l=c.grid_l,
            hermite_modes=c.hermite_modes,
            tail_tol=c.tail_tol,
            nyquist_tol=c.nyquist_tol,
            zero_tol_rel=c.zero_tol_rel,
            estimate_slack=c.estimate_slack,
        )

    # Subcommands

    def analyze(self) -> Dict[str, Any]:
        algebra = self._algebra()
        series = algebra.central_series()
        report: Dict[str, Any] = {
            "algebra": algebra.name,
            "dim": algebra.dim,
            "step": algebra.step,
            "layers": list(algebra.layers),
            "labels": list(algebra.labels),
            "central_series_dims": [s.dim for s in series],
            "central_series": [s.as_lists() for s in series],
            "center": algebra.center.as_lists(),
            "malcev_flag": True,
        }
        try:
            lattice = LatticeData(algebra)
            report["lattice"] = {
                "integer_brackets": True,
                "central_lattice_basis": [
                    [str(c) for c in v] for v in lattice.central_lattice_basis()
                ],
            }
        except ValidationError as e:
            logging.warning(f"No lattice for {algebra.name}: {e}")
            report["lattice"] = {"integer_brackets": False, "reason": str(e)}
        return report

    def orbit(self) -> Dict[str, Any]:
        algebra = self._algebra()
        lam = self._lambda(algebra)
        x = self._x(algebra)
        report = orbit_invariants(lam, x).to_report()
        report["perp_inclusions"] = perp_inclusions(lam)
        report["maximal_rank_conditions"] = maximal_rank_conditions(lam)
        report["polarizing_subalgebra"] = polarizing_subalgebra(lam).as_lists()
        try:
            report["weakly_integral"] = weakly_integral(lam, LatticeData(algebra))
        except ValidationError as e:
            logging.warning(f"Integrality not decided: {e}")
            report["weakly_integral"] = None
        return report

    def adapt(self) -> Dict[str, Any]:
        algebra = self._algebra()
        rep = build_adapted(self._lambda(algebra), self._x(algebra))
        report = rep.to_report()
        reduced = quotient_reduction(rep)
        report["reduced_dim"] = reduced.dim
        report["Y_central_in_quotient"] = reduced.y_central
        return report

    def solve(self) -> Dict[str, Any]:
        c = self.config
        if not c.f_recipe:
            raise ValidationError("--f is required")
        algebra = self._algebra()
        rep = build_adapted(self._lambda(algebra), self._x(algebra))
        recipe = parse_recipe(c.f_recipe)
        f = RepFunction.from_callable(rep, recipe, self._settings(), mode=c.mode)
        fg = f.to_grid()
        u = green(f)

        obstruction = invariant_distribution(f)
        derivative = apply_X(u)
        residual = float(np.sqrt(fg.grid.integrate(np.abs(derivative.values - fg.values) ** 2).real))
        f_norm = fg.l2_norm()

        report: Dict[str, Any] = {
            "recipe": c.f_recipe,
            "mode": c.mode,
            "grid_N": c.grid_n,
            "grid_L": c.grid_l,
            "B_XY": rep.b_value,
            "delta": rep.delta_value,
            "norm_f": f_norm,
            "norm_f_alpha": y_sobolev_norm(fg, c.alpha),
            "norm_u_beta": y_sobolev_norm(u, c.beta),
            "D_f": {"re": obstruction.real, "im": obstruction.imag},
            "abs_D_f": abs(obstruction),
            "obstruction_free": abs(obstruction) <= f.zero_tol(),
            "solution_kind": u.kind,
            "inversion_residual": residual,
            "relative_residual": residual / f_norm if f_norm > 0 else 0.0,
            "estimates": {
                "invariant_distribution": check_invdist_estimate(fg, c.alpha),
                "green": check_green_estimates(fg, c.alpha, c.beta, c.part),
            },
        }
        if c.mode == "hermite":
            report["estimates"]["central"] = check_central_bound(f)

        self.report_manager.write_csv(
            SOLUTION_CSV,
            ["t", "re_f", "im_f", "re_u", "im_u"],
            zip(fg.t, fg.values.real, fg.values.imag, u.values.real, u.values.imag),
        )
        logging.info(f"🧮 Solved X u = f: |D(f)| = {abs(obstruction):.3e}, residual {residual:.3e}")
        return report

    def diophantine(self) -> Dict[str, Any]:
        c = self.config
        if c.omega:
            omega = list(parse_vector(c.omega, None))
        else:
            algebra = self._algebra()
            omega = frequency_vector(algebra, self._x(algebra))
        result = certify(omega, c.tau, c.m_max)
        self.report_manager.write_csv(SHELLS_CSV, ["r", "min_scaled"], result.shell_rows())
        return result.to_report()

    def simulate(self) -> Dict[str, Any]:
        c = self.config
        if not c.observable:
            raise ValidationError("--obs is required")
        algebra = self._algebra()
        x = vector_to_float(self._x(algebra))
        obs = Observable.parse(c.observable, algebra.generator_count)
        start = vector_to_float(parse_vector(c.x0, algebra.dim)) if c.x0 else np.zeros(algebra.dim)
        x0 = NilPoint.from_coords(algebra, start)

        averages = birkhoff_series(x0, x, obs, c.t_values, c.dt)
        bounds = [self._average_bound(obs, x, algebra, t) for t in c.t_values]
        self.report_manager.write_csv(
            BIRKHOFF_CSV,
            ["T", "re_avg", "im_avg", "bound"],
            [(t, a.real, a.imag, b) for t, a, b in zip(c.t_values, averages, bounds)],
        )
        report: Dict[str, Any] = {
            "observable": c.observable,
            "dt": c.dt,
            "rows": [
                {"T": t, "abs_avg": abs(a), "bound": b, "within_bound": abs(a) <= b + 1e-10}
                for t, a, b in zip(c.t_values, averages, bounds)
            ],
        }
        if obs.kind == "character":
            report["equidistribution"] = equidistribution_report(
                x0, x, [obs.modes[0][0]], c.t_values, c.dt
            )
        return report

    @staticmethod
    def _average_bound(obs: Observable, x: np.ndarray, algebra: NilpotentLieAlgebra, t: float) -> float:
        if obs.kind == "constant":
            return 1.0
        if obs.kind == "coboundary":
            return 2.0 * obs.sup_bound / t
        nu = float(obs.frequencies(x[: algebra.generator_count])[0])
        return character_closed_form(nu, t)[1]


def emit(report: Dict[str, Any], as_json: bool) -> str:
    if as_json:
        return json.dumps(report, indent=2, default=str)
    return ReportManager.format_text(report)


def run(config: RunConfig, dependencies: Optional[PipelineDependencies] = None) -> int:
    """
    Execute one run and map failures to exit codes.

    Returns:
        0 on success, 1 on validation failure, 2 on a missing input file,
        3 when an estimate check is violated
    """
    try:
        report = PipelineRunner(config, dependencies).execute()
    except FileNotFoundError as e:
        logging.error(f"❌ {e}")
        return EXIT_USAGE
    except EstimateViolated as e:
        logging.error(f"❌ Estimate violated: {e}")
        return EXIT_ESTIMATE
    except ValidationError as e:
        logging.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_VALIDATION
    except InternalError as e:
        logging.error(f"❌ Internal consistency check failed: {e}")
        raise
    print(emit(report, config.json_output))
    return EXIT_OK
