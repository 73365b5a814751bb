"""Solenoid vector potential, closed-loop geometry, and line-integral quadrature.

Loops are piecewise-smooth parametric curves; each piece maps s in [0, 1] to
points with an analytic tangent. Line integrals use composite Gauss-Legendre
per piece, with the error estimated by node doubling. The built-in field
source is the ideal infinite solenoid: purely azimuthal potential, flux
Phi / (2 pi rho) outside the coil and Phi rho / (2 pi R^2) inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, FieldEvaluationError, GeometryError, SingularInputError

_MAX_NODES_PER_SEGMENT = 1024  # 2**10 cap for the doubling refinement
_VALIDATION_SAMPLES = 64


def _unit(v, name):
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if v.shape != (3,) or norm == 0.0:
        raise DomainError(f"{name} must be a nonzero 3-vector")
    return v / norm


@dataclass(frozen=True)
class SolenoidSpec:
    """Ideal infinite solenoid: total flux, coil radius, and axis placement."""

    flux: float
    radius: float
    axis_point: tuple = (0.0, 0.0, 0.0)
    axis_direction: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise DomainError("solenoid radius must be positive")
        if not math.isfinite(self.flux):
            raise DomainError("solenoid flux must be finite")
        origin = np.asarray(self.axis_point, dtype=float)
        if origin.shape != (3,):
            raise DomainError("axis point must be a 3-vector")
        direction = _unit(self.axis_direction, "axis direction")
        object.__setattr__(self, "axis_point", tuple(float(c) for c in origin))
        object.__setattr__(self, "axis_direction", tuple(float(c) for c in direction))

    def axial_decomposition(self, point):
        """Split point - axis_point into (radial vector, radial distance)."""
        rel = np.asarray(point, dtype=float) - np.asarray(self.axis_point)
        d = np.asarray(self.axis_direction)
        radial = rel - (rel @ d) * d
        return radial, float(np.linalg.norm(radial))


def solenoid_vector_potential(point, spec: SolenoidSpec) -> np.ndarray:
    """Azimuthal vector potential of the ideal solenoid, in Cartesian components.

    Continuous at the coil radius; singular-direction only on the axis itself,
    which is rejected.
    """
    radial, rho = spec.axial_decomposition(point)
    if rho == 0.0:
        raise SingularInputError("vector potential direction is undefined on the solenoid axis")
    d = np.asarray(spec.axis_direction)
    azimuthal = np.cross(d, radial)  # magnitude rho, direction phi-hat * rho
    if rho >= spec.radius:
        return spec.flux / (2.0 * math.pi * rho * rho) * azimuthal
    return spec.flux / (2.0 * math.pi * spec.radius**2) * azimuthal


def solenoid_field(spec: SolenoidSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Close over a spec to get a plain point -> A function for the integrator."""
    return lambda point: solenoid_vector_potential(point, spec)


def gauge_shift(field, chi_gradient):
    """Shift a field by the gradient of a (single-valued) scalar, point -> A + grad chi."""
    return lambda point: np.asarray(field(point), dtype=float) + np.asarray(chi_gradient(point), dtype=float)


@dataclass(frozen=True)
class Segment:
    """One smooth parametric piece: s in [0, 1] -> R^3, with analytic tangent.

    Both callables must accept a 1D array of parameters and return an
    (n, 3) array.
    """

    point: Callable[[np.ndarray], np.ndarray]
    tangent: Callable[[np.ndarray], np.ndarray]

    def reversed(self) -> "Segment":
        fwd_point, fwd_tangent = self.point, self.tangent
        return Segment(
            point=lambda s: fwd_point(1.0 - np.asarray(s, dtype=float)),
            tangent=lambda s: -fwd_tangent(1.0 - np.asarray(s, dtype=float)),
        )


def line_segment(start, end) -> Segment:
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    delta = end - start
    if np.linalg.norm(delta) == 0.0:
        raise GeometryError("degenerate segment: start equals end")

    def point(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return start + np.outer(s, delta)

    def tangent(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.tile(delta, (s.size, 1))

    return Segment(point, tangent)


def arc_segment(center, radius, theta0, theta1, z=None) -> Segment:
    """Circular arc in a z = const plane, angles in radians about the center."""
    center = np.asarray(center, dtype=float)
    if not (radius > 0.0):
        raise GeometryError("arc radius must be positive")
    if theta1 == theta0:
        raise GeometryError("degenerate arc: zero angular sweep")
    height = center[2] if z is None else float(z)
    sweep = theta1 - theta0

    def point(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        th = theta0 + s * sweep
        return np.column_stack(
            [center[0] + radius * np.cos(th), center[1] + radius * np.sin(th), np.full(s.size, height)]
        )

    def tangent(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        th = theta0 + s * sweep
        return np.column_stack(
            [-radius * sweep * np.sin(th), radius * sweep * np.cos(th), np.zeros(s.size)]
        )

    return Segment(point, tangent)


@dataclass(frozen=True)
class LoopPath:
    """Ordered smooth pieces forming a (usually closed) contour.

    Construction validates finiteness and nonvanishing of every tangent on a
    64-point sample, junction continuity, and, for closed paths, overall
    closure relative to the path diameter.
    """

    segments: tuple
    closed: bool = True

    def __post_init__(self):
        segments = tuple(self.segments)
        object.__setattr__(self, "segments", segments)
        if not segments:
            raise GeometryError("path needs at least one segment")
        s = np.linspace(0.0, 1.0, _VALIDATION_SAMPLES)
        clouds = []
        for seg in segments:
            pts = np.asarray(seg.point(s), dtype=float)
            tans = np.asarray(seg.tangent(s), dtype=float)
            if pts.shape != (s.size, 3) or tans.shape != (s.size, 3):
                raise GeometryError("segment callables must map (n,) parameters to (n, 3) arrays")
            if not (np.isfinite(pts).all() and np.isfinite(tans).all()):
                raise GeometryError("segment has non-finite points or tangents")
            if np.min(np.linalg.norm(tans, axis=1)) <= 0.0:
                raise GeometryError("segment tangent vanishes somewhere on [0, 1]")
            clouds.append(pts)
        cloud = np.vstack(clouds)
        diameter = float(np.linalg.norm(cloud.max(axis=0) - cloud.min(axis=0)))
        if diameter == 0.0:
            raise GeometryError("path has zero spatial extent")
        tol = 1e-12 * diameter
        for prev, nxt in zip(segments[:-1], segments[1:]):
            gap = np.linalg.norm(prev.point(np.array([1.0]))[0] - nxt.point(np.array([0.0]))[0])
            if gap >= tol:
                raise GeometryError(f"segments do not join continuously (gap {gap:.3e})")
        if self.closed:
            gap = np.linalg.norm(
                segments[0].point(np.array([0.0]))[0] - segments[-1].point(np.array([1.0]))[0]
            )
            if gap >= tol:
                raise GeometryError(f"path marked closed but endpoints differ by {gap:.3e}")
        object.__setattr__(self, "_diameter", diameter)

    @property
    def diameter(self) -> float:
        return self._diameter

    def reverse(self) -> "LoopPath":
        return LoopPath(tuple(seg.reversed() for seg in reversed(self.segments)), closed=self.closed)

    def sample(self, per_segment: int = 64) -> np.ndarray:
        s = np.linspace(0.0, 1.0, per_segment)
        return np.vstack([seg.point(s) for seg in self.segments])

    def concat(self, other: "LoopPath") -> "LoopPath":
        """Join two paths sharing a junction point into one path."""
        return LoopPath(self.segments + other.segments, closed=self.closed and other.closed)


def circle_loop(center=(0.0, 0.0, 0.0), radius=1.0, windings=1, phase=0.0) -> LoopPath:
    """Circle in the z = center_z plane, traversed ``windings`` times (sign = orientation)."""
    if not (radius > 0.0):
        raise GeometryError("circle radius must be positive")
    w = int(windings)
    if w != windings or w == 0:
        raise GeometryError("windings must be a nonzero integer")
    return LoopPath((arc_segment(center, radius, phase, phase + 2.0 * math.pi * w),))


def rectangle_loop(corners) -> LoopPath:
    corners = np.asarray(corners, dtype=float)
    if corners.shape != (4, 3):
        raise GeometryError("rectangle needs exactly four 3D corners")
    edges = [corners[(k + 1) % 4] - corners[k] for k in range(4)]
    normal = np.cross(edges[0], edges[1])
    if np.linalg.norm(normal) == 0.0:
        raise GeometryError("rectangle corners are collinear")
    scale = float(np.max(np.abs(corners - corners[0]))) or 1.0
    if abs((corners[3] - corners[0]) @ normal) > 1e-9 * scale * np.linalg.norm(normal):
        raise GeometryError("rectangle corners are not planar")
    return polyline_loop(corners)


def polyline_loop(vertices) -> LoopPath:
    vertices = np.asarray(vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[0] < 3 or vertices.shape[1] != 3:
        raise GeometryError("polyline needs at least three 3D vertices")
    n = vertices.shape[0]
    for k in range(n):
        if np.array_equal(vertices[k], vertices[(k + 1) % n]):
            raise GeometryError(f"repeated consecutive vertex at index {k}")
    segs = tuple(line_segment(vertices[k], vertices[(k + 1) % n]) for k in range(n))
    return LoopPath(segs)


def make_loop(kind: str, **params) -> LoopPath:
    """Dispatch constructor: kind in {'circle', 'rectangle', 'polyline'}."""
    builders = {"circle": circle_loop, "rectangle": rectangle_loop, "polyline": polyline_loop}
    if kind not in builders:
        raise GeometryError(f"unknown loop kind {kind!r}")
    return builders[kind](**params)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre order per segment and the refinement policy."""

    nodes_per_segment: int = 16
    refinement: str = "fixed"  # 'fixed' or 'doubling'
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.nodes_per_segment < 4:
            raise DomainError("need at least 4 quadrature nodes per segment")
        if self.refinement not in ("fixed", "doubling"):
            raise DomainError(f"unknown refinement mode {self.refinement!r}")
        if not (self.tolerance > 0.0):
            raise DomainError("quadrature tolerance must be positive")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    nodes_per_segment: int


@lru_cache(maxsize=32)
def _unit_interval_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _field_samples(field, pts, s):
    vals = np.asarray([field(p) for p in pts], dtype=float)
    if not np.isfinite(vals).all():
        bad = int(np.argwhere(~np.isfinite(vals))[0, 0])
        raise FieldEvaluationError(
            f"field sample is not finite at curve parameter s = {s[bad]!r}", parameter=float(s[bad])
        )
    return vals


def _circulation_at(field, loop, n):
    s, w = _unit_interval_rule(n)
    total = 0.0
    for seg in loop.segments:
        pts = seg.point(s)
        tans = seg.tangent(s)
        vals = _field_samples(field, pts, s)
        total += float(np.sum(w * np.einsum("ij,ij->i", vals, tans)))
    return total


def _refine(evaluate, quad: QuadratureSpec):
    """Shared node-doubling driver; returns (fine value, |fine - coarse|, fine nodes)."""
    n = quad.nodes_per_segment
    coarse = evaluate(n)
    fine = evaluate(2 * n)
    err = abs(fine - coarse)
    if quad.refinement == "doubling":
        while err > quad.tolerance and 2 * n < _MAX_NODES_PER_SEGMENT:
            n *= 2
            coarse = fine
            fine = evaluate(2 * n)
            err = abs(fine - coarse)
    return fine, err, 2 * n


def line_integral(field, loop: LoopPath, quad: QuadratureSpec | None = None) -> IntegralResult:
    """Circulation of a vector field along the path, with a doubling error estimate."""
    quad = quad or QuadratureSpec()
    value, err, nodes = _refine(lambda n: _circulation_at(field, loop, n), quad)
    return IntegralResult(value=value, error_estimate=err, nodes_per_segment=nodes)


def loop_length(loop: LoopPath, quad: QuadratureSpec | None = None) -> IntegralResult:
    """Arc length of the path by the same quadrature machinery."""
    quad = quad or QuadratureSpec()

    def evaluate(n):
        s, w = _unit_interval_rule(n)
        total = 0.0
        for seg in loop.segments:
            total += float(np.sum(w * np.linalg.norm(seg.tangent(s), axis=1)))
        return total

    value, err, nodes = _refine(evaluate, quad)
    return IntegralResult(value=value, error_estimate=err, nodes_per_segment=nodes)


class WindingResult(NamedTuple):
    number: int
    residual: float


def winding_number(loop: LoopPath, axis_point=(0.0, 0.0, 0.0), axis_direction=(0.0, 0.0, 1.0)) -> WindingResult:
    """Signed turns of the path about an axis, by accumulated azimuthal angle.

    Samples each segment densely, unwraps the azimuth in the plane normal to
    the axis, and rounds total angle / 2 pi. The pre-rounding residual is
    returned; a residual above 1e-3 (or a path point within 1e-9 of the
    axis) raises, since the winding is then geometrically ambiguous.
    """
    origin = np.asarray(axis_point, dtype=float)
    d = _unit(axis_direction, "axis direction")
    candidate = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = candidate - (candidate @ d) * d
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)

    samples = 256
    while True:
        thetas = []
        for seg in loop.segments:
            s = np.linspace(0.0, 1.0, samples + 1)
            rel = seg.point(s) - origin
            u = rel @ e1
            v = rel @ e2
            if np.min(np.hypot(u, v)) < 1e-9:
                raise GeometryError("path passes within 1e-9 of the winding axis")
            thetas.append(np.arctan2(v, u))
        theta = np.unwrap(np.concatenate(thetas))
        steps = np.abs(np.diff(theta))
        if steps.size == 0 or np.max(steps) < math.pi / 2.0:
            break
        samples *= 2
        if samples > 2**14:
            raise GeometryError("winding angle varies too fast to resolve")

    turns = float((theta[-1] - theta[0]) / (2.0 * math.pi))
    nearest = round(turns)
    residual = abs(turns - nearest)
    if residual > 1e-3:
        raise GeometryError(f"winding number ambiguous: fractional part {residual:.3e}")
    return WindingResult(number=int(nearest), residual=residual)
