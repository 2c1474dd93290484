"""Exact reference computations the moment paths are checked against.

Everything here works directly on the input points (no moments): the true
algebraic and geometric objectives, an iterative geometric fitter, and the
point-to-arc deviation / ordering checks that the compressor uses to accept
an arc candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence
from .fit import Circle

__all__ = [
    "Arc",
    "DeviationReport",
    "exact_objective_sq",
    "exact_sse",
    "geometric_fit",
    "arc_deviation",
    "check_tolerance_zigzag",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Arc:
    """Directed circular arc between two endpoint anchors.

    a0/a1 are the endpoint angles; the arc runs from a0 to a1 going
    counterclockwise when ccw is True, clockwise otherwise.
    """

    circle: Circle
    a0: float
    a1: float
    ccw: bool
    p0: tuple[float, float]
    p1: tuple[float, float]

    @classmethod
    def from_endpoints(cls, circle: Circle, p0, p1, ccw: bool) -> "Arc":
        p0 = (float(p0[0]), float(p0[1]))
        p1 = (float(p1[0]), float(p1[1]))
        for p in (p0, p1):
            gap = abs(math.hypot(p[0] - circle.cx, p[1] - circle.cy) - circle.r)
            if gap > 1e-9 * circle.r:
                raise ValueError(f"endpoint {p} is not on the circle")
        # np.arctan2 throughout: position() must reproduce these angles bit
        # for bit so the endpoints land at parameters 0 and span exactly
        a0 = float(np.arctan2(p0[1] - circle.cy, p0[0] - circle.cx))
        a1 = float(np.arctan2(p1[1] - circle.cy, p1[0] - circle.cx))
        arc = cls(circle=circle, a0=a0, a1=a1, ccw=ccw, p0=p0, p1=p1)
        if not 0.0 < arc.span < _TWO_PI:
            raise ValueError("degenerate angular span")
        return arc

    @property
    def span(self) -> float:
        if self.ccw:
            return (self.a1 - self.a0) % _TWO_PI
        return (self.a0 - self.a1) % _TWO_PI

    def position(self, p) -> float:
        """Angular parameter of p along the arc's orientation, in [0, 2*pi);
        values <= span lie within the arc's sector."""
        theta = float(np.arctan2(p[1] - self.circle.cy, p[0] - self.circle.cx))
        if self.ccw:
            return (theta - self.a0) % _TWO_PI
        return (self.a0 - theta) % _TWO_PI

    def positions(self, pts: np.ndarray) -> np.ndarray:
        theta = np.arctan2(pts[:, 1] - self.circle.cy, pts[:, 0] - self.circle.cx)
        if self.ccw:
            return (theta - self.a0) % _TWO_PI
        return (self.a0 - theta) % _TWO_PI


@dataclass(frozen=True)
class DeviationReport:
    max_dev: float
    sum_sq: float
    monotone: bool
    ok: bool


def _pts(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
        raise ValueError("expected an (n, 2) array of points")
    return pts


def exact_objective_sq(points, c: Circle) -> float:
    """Sum over points of ((distance^2 to center) - r^2)^2."""
    pts = _pts(points)
    d2 = (pts[:, 0] - c.cx) ** 2 + (pts[:, 1] - c.cy) ** 2
    return float(np.sum((d2 - c.r * c.r) ** 2))


def exact_sse(points, c: Circle) -> float:
    """Sum of squared radial deviations: the true geometric misfit."""
    pts = _pts(points)
    d = np.hypot(pts[:, 0] - c.cx, pts[:, 1] - c.cy)
    return float(np.sum((d - c.r) ** 2))


def geometric_fit(points, start: Circle, max_iter: int = 200,
                  tol: float = 1e-12) -> Circle:
    """Local minimizer of the radial deviations by Gauss-Newton with step
    halving. The residual never increases; converges when the relative
    parameter change drops below tol."""
    pts = _pts(points)
    if pts.shape[0] < 3:
        raise ValueError("geometric fit needs at least 3 points")
    x = pts[:, 0]
    y = pts[:, 1]
    p = np.array([start.cx, start.cy, start.r])

    def sse(params):
        d = np.hypot(x - params[0], y - params[1])
        return float(np.sum((d - params[2]) ** 2))

    current = sse(p)
    for _ in range(max_iter):
        dx = x - p[0]
        dy = y - p[1]
        d = np.hypot(dx, dy)
        d = np.maximum(d, 1e-300)
        e = d - p[2]
        jac = np.column_stack((-dx / d, -dy / d, -np.ones_like(d)))
        jtj = jac.T @ jac
        jte = jac.T @ e
        try:
            step = -np.linalg.solve(jtj, jte)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(jtj, jte, rcond=None)[0]

        lam = 1.0
        accepted = False
        while lam >= 2.0 ** -40:
            trial = p + lam * step
            if trial[2] > 0.0:
                trial_sse = sse(trial)
                if trial_sse <= current:
                    moved = float(np.linalg.norm(lam * step))
                    p, current, accepted = trial, trial_sse, True
                    break
            lam *= 0.5
        if not accepted:
            return Circle(p[0], p[1], p[2])
        if moved <= tol * (1.0 + float(np.linalg.norm(p))):
            return Circle(p[0], p[1], p[2])
    raise NonConvergence(f"geometric fit did not settle in {max_iter} iterations")


def arc_deviation(p, arc: Arc) -> float:
    """Distance from p to the arc: radial gap when p projects inside the
    arc's angular sector, distance to the nearer endpoint otherwise."""
    u = arc.position(p)
    if u <= arc.span:
        return abs(math.hypot(p[0] - arc.circle.cx, p[1] - arc.circle.cy)
                   - arc.circle.r)
    return min(math.hypot(p[0] - arc.p0[0], p[1] - arc.p0[1]),
               math.hypot(p[0] - arc.p1[0], p[1] - arc.p1[1]))


def check_tolerance_zigzag(points, arc: Arc, tol: float) -> DeviationReport:
    """Validate an arc candidate against the polyline window it would replace.

    points run from the arc's first anchor to its second; interior deviations
    are measured with arc_deviation and the angular parameters of the whole
    sequence must be strictly increasing along the arc's orientation (the
    zigzag rejection). Passes when max_dev <= tol (inclusive) and monotone.
    """
    pts = _pts(points)
    u = arc.positions(pts)
    monotone = bool(np.all(np.diff(u) > 0.0))

    interior = pts[1:-1]
    if interior.shape[0] == 0:
        max_dev = 0.0
        sum_sq = 0.0
    else:
        ui = u[1:-1]
        rad = np.hypot(interior[:, 0] - arc.circle.cx,
                       interior[:, 1] - arc.circle.cy)
        dev_in = np.abs(rad - arc.circle.r)
        d0 = np.hypot(interior[:, 0] - arc.p0[0], interior[:, 1] - arc.p0[1])
        d1 = np.hypot(interior[:, 0] - arc.p1[0], interior[:, 1] - arc.p1[1])
        dev_out = np.minimum(d0, d1)
        dev = np.where(ui <= arc.span, dev_in, dev_out)
        max_dev = float(np.max(dev))
        sum_sq = float(np.sum(dev * dev))
    ok = monotone and max_dev <= tol
    return DeviationReport(max_dev=max_dev, sum_sq=sum_sq, monotone=monotone, ok=ok)
