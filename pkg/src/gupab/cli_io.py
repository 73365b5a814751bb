"""Config loading, command dispatch, parameter sweeps, and machine output.

Configs are strict JSON: unknown keys are rejected, every parameter is
validated against its engine precondition before any computation starts.
Structured results go out as JSON, sweep tables as CSV with a frozen header.
Exit codes: 0 success, 1 verification or computation failure, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import clifford, gup_algebra
from .errors import ConfigError, GupabError
from .field_geometry import LoopPath, QuadratureSpec, SolenoidSpec, make_loop
from .phase_engine import ParticleSpec, PhaseResult, dispersion, gup_phase_projected, total_phase
from .units import UnitSystem, gup_from_a0

SWEEP_CSV_HEADER = "sweep_value,a,standard_phase,projected_correction,total_phase,quadrature_error"
DISPERSION_CSV_HEADER = "p,E_plus_a0,E_plus,shift"
SWEEP_PARAMETERS = ("gup.a", "loop.radius", "particle.v", "solenoid.flux")
PROJECTIONS = ("comoving_on_shell", "fixed_spinor")


def _reject_unknown(mapping: dict, allowed, context: str):
    for key in mapping:
        if key not in allowed:
            where = context or "top level"
            raise ConfigError(f"unknown key '{key}' in {where}")


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing required key '{context}.{key}'" if context else f"missing required key '{key}'")
    return mapping[key]


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    return value


def _vector3(value, name: str):
    if not (isinstance(value, list) and len(value) == 3):
        raise ConfigError(f"{name} must be a list of three numbers")
    return [_number(c, name) for c in value]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class RunConfig:
    """Fully validated inputs for one engine run (plus an optional sweep)."""

    particle: ParticleSpec
    solenoid: SolenoidSpec
    loop_kind: str
    loop_params: dict
    a: float
    quadrature: QuadratureSpec
    projection: str
    spinor: np.ndarray | None
    sweep: SweepSpec | None

    def build_loop(self) -> LoopPath:
        return make_loop(self.loop_kind, **self.loop_params)


def _parse_particle(raw) -> ParticleSpec:
    if not isinstance(raw, dict):
        raise ConfigError("particle must be an object")
    _reject_unknown(raw, {"q", "m", "v"}, "particle")
    q = _number(_require(raw, "q", "particle"), "particle.q")
    m = _number(_require(raw, "m", "particle"), "particle.m")
    v = _number(_require(raw, "v", "particle"), "particle.v")
    if not m > 0.0:
        raise ConfigError("particle.m must be positive")
    if not (0.0 < v < 1.0):
        raise ConfigError("particle.v must be in (0,1)")
    return ParticleSpec(charge=q, mass=m, speed=v)


def _parse_solenoid(raw) -> SolenoidSpec:
    if not isinstance(raw, dict):
        raise ConfigError("solenoid must be an object")
    _reject_unknown(raw, {"flux", "radius"}, "solenoid")
    flux = _number(_require(raw, "flux", "solenoid"), "solenoid.flux")
    radius = _number(_require(raw, "radius", "solenoid"), "solenoid.radius")
    if not radius > 0.0:
        raise ConfigError("solenoid.radius must be positive")
    return SolenoidSpec(flux=flux, radius=radius)


def _parse_loop(raw):
    if not isinstance(raw, dict):
        raise ConfigError("loop must be an object")
    kind = _require(raw, "kind", "loop")
    if kind == "circle":
        _reject_unknown(raw, {"kind", "center", "radius", "windings"}, "loop")
        params = {
            "radius": _number(_require(raw, "radius", "loop"), "loop.radius"),
            "center": tuple(_vector3(raw.get("center", [0.0, 0.0, 0.0]), "loop.center")),
        }
        windings = raw.get("windings", 1)
        if isinstance(windings, bool) or not isinstance(windings, int) or windings == 0:
            raise ConfigError("loop.windings must be a nonzero integer")
        params["windings"] = windings
        if not params["radius"] > 0.0:
            raise ConfigError("loop.radius must be positive")
    elif kind == "rectangle":
        _reject_unknown(raw, {"kind", "corners"}, "loop")
        corners = _require(raw, "corners", "loop")
        if not (isinstance(corners, list) and len(corners) == 4):
            raise ConfigError("loop.corners must list exactly four points")
        params = {"corners": [_vector3(c, "loop.corners") for c in corners]}
    elif kind == "polyline":
        _reject_unknown(raw, {"kind", "vertices"}, "loop")
        vertices = _require(raw, "vertices", "loop")
        if not (isinstance(vertices, list) and len(vertices) >= 3):
            raise ConfigError("loop.vertices must list at least three points")
        params = {"vertices": [_vector3(v, "loop.vertices") for v in vertices]}
    else:
        raise ConfigError("loop.kind must be one of circle, rectangle, polyline")
    return kind, params


def _parse_gup(raw) -> float:
    if not isinstance(raw, dict):
        raise ConfigError("gup must be an object")
    _reject_unknown(raw, {"a", "a0", "units"}, "gup")
    if "a" in raw:
        if "a0" in raw or "units" in raw:
            raise ConfigError("gup accepts either 'a' or 'a0'+'units', not both")
        a = _number(raw["a"], "gup.a")
    else:
        a0 = _number(_require(raw, "a0", "gup"), "gup.a0")
        mode = raw.get("units", "natural")
        if mode not in ("natural", "si"):
            raise ConfigError("gup.units must be 'natural' or 'si'")
        units = UnitSystem.si() if mode == "si" else UnitSystem.natural()
        if a0 < 0.0:
            raise ConfigError("gup.a0 must be nonnegative")
        a = gup_from_a0(a0, units).a
    if a < 0.0:
        raise ConfigError("gup.a must be nonnegative")
    return a


def _parse_quadrature(raw) -> QuadratureSpec:
    if raw is None:
        return QuadratureSpec()
    if not isinstance(raw, dict):
        raise ConfigError("quadrature must be an object")
    _reject_unknown(raw, {"nodes_per_segment", "tolerance", "refinement"}, "quadrature")
    nodes = raw.get("nodes_per_segment", 16)
    if isinstance(nodes, bool) or not isinstance(nodes, int) or nodes < 4:
        raise ConfigError("quadrature.nodes_per_segment must be an integer >= 4")
    tolerance = _number(raw.get("tolerance", 1e-10), "quadrature.tolerance")
    if not tolerance > 0.0:
        raise ConfigError("quadrature.tolerance must be positive")
    refinement = raw.get("refinement", "fixed")
    if refinement not in ("fixed", "doubling"):
        raise ConfigError("quadrature.refinement must be 'fixed' or 'doubling'")
    return QuadratureSpec(nodes_per_segment=nodes, refinement=refinement, tolerance=tolerance)


def _parse_spinor(raw, particle: ParticleSpec):
    if not isinstance(raw, dict):
        raise ConfigError("spinor must be an object")
    _reject_unknown(raw, {"momentum", "branch"}, "spinor")
    momentum = _vector3(_require(raw, "momentum", "spinor"), "spinor.momentum")
    branch = raw.get("branch", "particle1")
    if branch not in ("particle1", "particle2"):
        raise ConfigError("spinor.branch must be 'particle1' or 'particle2'")
    return clifford.on_shell_spinor(np.asarray(momentum), particle.mass, branch)


def _parse_sweep(raw) -> SweepSpec:
    if not isinstance(raw, dict):
        raise ConfigError("sweep must be an object")
    _reject_unknown(raw, {"parameter", "values"}, "sweep")
    parameter = _require(raw, "parameter", "sweep")
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"sweep.parameter must be one of {', '.join(SWEEP_PARAMETERS)}")
    values = _require(raw, "values", "sweep")
    if not (isinstance(values, list) and values):
        raise ConfigError("sweep.values must be a non-empty list")
    values = tuple(_number(v, "sweep.values") for v in values)
    return SweepSpec(parameter=parameter, values=values)


def _validate_sweep_values(config: RunConfig):
    sweep = config.sweep
    if sweep is None:
        return
    for value in sweep.values:
        if sweep.parameter == "gup.a" and value < 0.0:
            raise ConfigError("sweep.values for gup.a must be nonnegative")
        if sweep.parameter == "loop.radius":
            if config.loop_kind != "circle":
                raise ConfigError("sweeping loop.radius requires a circle loop")
            if not value > 0.0:
                raise ConfigError("sweep.values for loop.radius must be positive")
        if sweep.parameter == "particle.v" and not (0.0 < value < 1.0):
            raise ConfigError("sweep.values for particle.v must be in (0,1)")


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {"particle", "solenoid", "loop", "gup", "quadrature", "projection", "spinor", "sweep"}
    _reject_unknown(raw, allowed, "")
    particle = _parse_particle(_require(raw, "particle", ""))
    solenoid = _parse_solenoid(_require(raw, "solenoid", ""))
    loop_kind, loop_params = _parse_loop(_require(raw, "loop", ""))
    a = _parse_gup(_require(raw, "gup", ""))
    quadrature = _parse_quadrature(raw.get("quadrature"))
    projection = raw.get("projection", "comoving_on_shell")
    if projection not in PROJECTIONS:
        raise ConfigError(f"projection must be one of {', '.join(PROJECTIONS)}")
    spinor = None
    if projection == "fixed_spinor":
        spinor = _parse_spinor(_require(raw, "spinor", ""), particle)
    elif "spinor" in raw:
        raise ConfigError("spinor is only meaningful with projection 'fixed_spinor'")
    sweep = _parse_sweep(raw["sweep"]) if "sweep" in raw else None
    config = RunConfig(
        particle=particle,
        solenoid=solenoid,
        loop_kind=loop_kind,
        loop_params=loop_params,
        a=a,
        quadrature=quadrature,
        projection=projection,
        spinor=spinor,
        sweep=sweep,
    )
    _validate_sweep_values(config)
    try:
        config.build_loop()  # surfaces degenerate geometry before any computation
    except GupabError as exc:
        raise ConfigError(f"loop: {exc}") from exc
    return config


def load_config(path) -> RunConfig:
    """Read, parse, and fully validate a JSON run configuration."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw)


def run_phase(config: RunConfig) -> PhaseResult:
    return total_phase(
        config.particle,
        config.solenoid,
        config.build_loop(),
        config.a,
        config.quadrature,
        projection=config.projection,
        spinor=config.spinor,
    )


def _with_sweep_value(config: RunConfig, value: float) -> RunConfig:
    parameter = config.sweep.parameter
    if parameter == "gup.a":
        return replace(config, a=value)
    if parameter == "loop.radius":
        params = dict(config.loop_params)
        params["radius"] = value
        return replace(config, loop_params=params)
    if parameter == "particle.v":
        particle = ParticleSpec(config.particle.charge, config.particle.mass, value)
        return replace(config, particle=particle)
    if parameter == "solenoid.flux":
        solenoid = SolenoidSpec(flux=value, radius=config.solenoid.radius)
        return replace(config, solenoid=solenoid)
    raise ConfigError(f"unsupported sweep parameter {parameter!r}")


def run_sweep(config: RunConfig):
    """Evaluate the engine once per sweep value, preserving input order."""
    if config.sweep is None:
        raise ConfigError("config has no sweep section")
    rows = []
    for value in config.sweep.values:
        result = run_phase(_with_sweep_value(config, value))
        rows.append((value, result))
    return rows


def sweep_csv(rows) -> str:
    lines = [SWEEP_CSV_HEADER]
    for value, result in rows:
        lines.append(
            ",".join(
                repr(float(x))
                for x in (
                    value,
                    result.a,
                    result.standard_phase,
                    result.projected_correction,
                    result.total_phase,
                    result.quadrature_error,
                )
            )
        )
    return "\n".join(lines) + "\n"


def dispersion_csv(config: RunConfig, p_max: float, steps: int) -> str:
    if steps < 2:
        raise ConfigError("dispersion needs at least 2 steps")
    if not p_max > 0.0:
        raise ConfigError("dispersion p range must be positive")
    m, a = config.particle.mass, config.a
    lines = [DISPERSION_CSV_HEADER]
    for p in np.linspace(0.0, p_max, steps):
        base = dispersion((p, 0.0, 0.0), m, 0.0)
        shifted = dispersion((p, 0.0, 0.0), m, a)
        shift = shifted.e_plus - base.e_plus
        lines.append(",".join(repr(float(x)) for x in (p, base.e_plus, shifted.e_plus, shift)))
    return "\n".join(lines) + "\n"


# --- verification suite -----------------------------------------------------


def _check(name, residual, bound):
    return {"name": name, "passed": bool(residual <= bound), "residual": float(residual), "bound": float(bound)}


def _gamma_algebra_residual(perturbation: float) -> float:
    gammas = [clifford.gamma(mu) for mu in range(4)]
    if perturbation:
        gammas[1] = gammas[1] + perturbation  # test hook: detector must flag this
    eye = np.eye(4)
    worst = 0.0
    for mu in range(4):
        for nu in range(4):
            anti = gammas[mu] @ gammas[nu] + gammas[nu] @ gammas[mu]
            worst = max(worst, float(np.max(np.abs(anti - 2.0 * clifford.MINKOWSKI_METRIC[mu, nu] * eye))))
    alphas = [clifford.alpha(i) for i in (1, 2, 3)]
    b = clifford.beta()
    for i in range(3):
        for j in range(3):
            anti = alphas[i] @ alphas[j] + alphas[j] @ alphas[i]
            worst = max(worst, float(np.max(np.abs(anti - 2.0 * (1.0 if i == j else 0.0) * eye))))
        worst = max(worst, float(np.max(np.abs(alphas[i] @ b + b @ alphas[i]))))
    return worst


def run_verification(level: str = "fast", gamma_perturbation: float = 0.0) -> dict:
    """Run the built-in consistency checks; 'full' adds the grid operator lab."""
    if level not in ("fast", "full"):
        raise ConfigError("verify level must be 'fast' or 'full'")
    rng = np.random.default_rng(20250810)
    checks = []

    checks.append(_check("gamma_algebra_exact", _gamma_algebra_residual(gamma_perturbation), 0.0))

    worst = 0.0
    for _ in range(100):
        p = clifford.FourVector(*rng.uniform(-2.0, 2.0, size=4))
        sq = clifford.slash(p) @ clifford.slash(p)
        scale = max(abs(p.square()), 1e-3)
        worst = max(worst, float(np.max(np.abs(sq - p.square() * np.eye(4)))) / scale)
    checks.append(_check("slash_square_relative", worst, 1e-12))

    worst = 0.0
    for _ in range(20):
        p3 = rng.uniform(-1.5, 1.5, size=3)
        m = rng.uniform(0.2, 2.0)
        energy = math.sqrt(p3 @ p3 + m * m)
        sl = clifford.slash(clifford.FourVector.from_spatial(energy, p3))
        u1 = clifford.on_shell_spinor(p3, m, "particle1")
        u2 = clifford.on_shell_spinor(p3, m, "particle2")
        worst = max(worst, float(np.max(np.abs(sl @ u1 - m * u1))) / m)
        worst = max(worst, float(np.max(np.abs(sl @ u2 - m * u2))) / m)
        worst = max(worst, abs(complex(np.vdot(u1, u2))))
    checks.append(_check("on_shell_spinor", worst, 1e-12))

    worst = 0.0
    for _ in range(50):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        p0 = direction * rng.uniform(0.1, 2.0)
        exponent = gup_algebra.commutator_consistency_exponent(p0)
        worst = max(worst, abs(exponent - 3.0))
    checks.append(_check("deformation_consistency_a_cubed", worst, 0.3))

    grid = gup_algebra.MomentumGrid.uniform(0.5, 2.5, 1024)
    gaussian = gup_algebra.gaussian_state(grid)
    report = gup_algebra.uncertainty_check(grid, gaussian, 0.0)
    worst = abs(report.lhs - report.rhs) / abs(report.rhs)
    checks.append(_check("uncertainty_gaussian_equality", worst, 1e-3))

    count = 100 if level == "full" else 20
    failures = 0.0
    for _ in range(count):
        state = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        norm = math.sqrt(float(np.sum(gup_algebra._trapezoid_weights(grid.n, grid.h) * np.abs(state) ** 2)))
        report = gup_algebra.uncertainty_check(grid, state / norm, rng.uniform(0.0, 0.19), tolerance=1e-6)
        failures += 0.0 if report.holds else 1.0
    checks.append(_check("uncertainty_random_states", failures, 0.0))

    from .field_geometry import circle_loop
    from .phase_engine import ab_phase

    particle = ParticleSpec(charge=1.0, mass=1.0, speed=0.6)
    solenoid = SolenoidSpec(flux=1.0, radius=0.1)
    quad = QuadratureSpec(refinement="doubling", tolerance=1e-12)
    worst = 0.0
    for windings in (1, -1, 2):
        loop = circle_loop(radius=2.0, windings=windings)
        worst = max(worst, abs(ab_phase(particle, solenoid, loop, quad) - windings))
    checks.append(_check("flux_phase_quantization", worst, 1e-9))

    loop = circle_loop(radius=1.0)
    a = 0.01
    projected = gup_phase_projected(particle, loop, a, quad)
    closed_form = -a * particle.charge * particle.mass * (particle.energy / particle.speed - particle.momentum) * (
        2.0 * math.pi
    )
    checks.append(_check("comoving_closed_form", abs(projected - closed_form) / abs(closed_form), 1e-10))

    worst = 0.0
    for _ in range(100):
        p3 = rng.uniform(-2.0, 2.0, size=3)
        m = rng.uniform(0.2, 2.0)
        a_val = rng.uniform(0.0, 0.2)
        result = dispersion(p3, m, a_val)
        expected = np.array([result.e_minus, result.e_minus, result.e_plus, result.e_plus])
        worst = max(worst, float(np.max(np.abs(result.eigenvalues - expected))))
    checks.append(_check("dispersion_eigenvalues", worst, 1e-12))

    if level == "full":
        lab0 = gup_algebra.grid_operator_lab(gup_algebra.MomentumGrid.uniform(1.0, 2.0, 256), 0.0)
        checks.append(_check("grid_lab_discretization_order", abs(lab0.discretization_order - 2.0), 0.3))
        lab = gup_algebra.grid_operator_lab(gup_algebra.MomentumGrid.uniform(1.0, 2.0, 256), 0.05)
        checks.append(_check("grid_lab_residual", lab.max_residual_interior, 1e-3))
        lab512 = gup_algebra.grid_operator_lab(gup_algebra.MomentumGrid.uniform(1.0, 2.0, 512), 0.05)
        checks.append(_check("grid_lab_scaling_exponent", abs(lab512.gup_scaling_exponent - 3.0), 0.3))

    return {"level": level, "checks": checks, "all_passed": all(c["passed"] for c in checks)}


# --- command-line interface ---------------------------------------------------


def _write(stream, text: str):
    stream.write(text)
    stream.flush()


def cmd_phase(config: RunConfig, stream) -> int:
    result = run_phase(config)
    _write(stream, json.dumps(result.to_json_dict(), indent=2) + "\n")
    return 0


def cmd_sweep(config: RunConfig, stream) -> int:
    _write(stream, sweep_csv(run_sweep(config)))
    return 0


def cmd_verify(level: str, stream, gamma_perturbation: float = 0.0) -> int:
    report = run_verification(level, gamma_perturbation)
    _write(stream, json.dumps(report, indent=2) + "\n")
    return 0 if report["all_passed"] else 1


def cmd_dispersion(config: RunConfig, p_max: float, steps: int, stream) -> int:
    _write(stream, dispersion_csv(config, p_max, steps))
    return 0


def _open_output(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gupab",
        description="Flux phases for charged spin-half particles with a minimal-length deformed algebra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_phase = sub.add_parser("phase", help="compute one phase result as JSON")
    p_phase.add_argument("-c", "--config", required=True, help="path to JSON run config")
    p_phase.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    p_sweep = sub.add_parser("sweep", help="evaluate a parameter sweep as CSV")
    p_sweep.add_argument("-c", "--config", required=True)
    p_sweep.add_argument("-o", "--output", default=None)

    p_verify = sub.add_parser("verify", help="run the built-in consistency checks")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")
    p_verify.add_argument("-o", "--output", default=None)
    p_verify.add_argument(
        "--inject-fault",
        action="store_true",
        help="perturb an internal matrix to confirm the checks can fail (testing hook)",
    )

    p_disp = sub.add_parser("dispersion", help="tabulate the deformed dispersion relation as CSV")
    p_disp.add_argument("-c", "--config", required=True)
    p_disp.add_argument("--pmax", type=float, default=2.0)
    p_disp.add_argument("--steps", type=int, default=100)
    p_disp.add_argument("-o", "--output", default=None)

    args = parser.parse_args(argv)
    try:
        stream, owned = _open_output(getattr(args, "output", None))
        try:
            if args.command == "phase":
                return cmd_phase(load_config(args.config), stream)
            if args.command == "sweep":
                config = load_config(args.config)
                if config.sweep is None:
                    raise ConfigError("sweep command needs a 'sweep' section in the config")
                return cmd_sweep(config, stream)
            if args.command == "verify":
                return cmd_verify(args.level, stream, 1e-6 if args.inject_fault else 0.0)
            if args.command == "dispersion":
                return cmd_dispersion(load_config(args.config), args.pmax, args.steps, stream)
            raise ConfigError(f"unknown command {args.command!r}")
        finally:
            if owned:
                stream.close()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GupabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
