"""Bivariate raw power sums up to total order four.

Every fit in this package is computed from the sums S[g,h] = sum_i w_i *
x_i^g * y_i^h for 0 <= g+h <= 4 (15 values; S[0,0] is the total weight).
The accumulator stores each sum as an exact rational (floats convert to
rationals losslessly), which buys three things at once:

* merging shards is exactly commutative and associative, so accumulators
  built in parallel or split at any index agree bit for bit;
* prefix accumulators can be differenced without catastrophic cancellation,
  which is what makes O(1) windowed fits inside the compressor trustworthy;
* recentering far-from-origin data recovers the centered fourth-order sums
  at full precision, instead of the noise a float re-expansion would leave.

Normalization to plain floats happens once, at fit time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as _Q

__all__ = [
    "ORDERS",
    "MomentAccumulator",
    "NormalizedMoments",
    "empty",
    "accumulate_point",
    "accumulate_segment",
    "from_points",
    "from_segments",
    "merge",
    "difference",
    "translate",
    "normalized",
    "centroid",
]

# Index order used everywhere: total order ascending, x-degree descending.
ORDERS = (
    (0, 0),
    (1, 0), (0, 1),
    (2, 0), (1, 1), (0, 2),
    (3, 0), (2, 1), (1, 2), (0, 3),
    (4, 0), (3, 1), (2, 2), (1, 3), (0, 4),
)
_POS = {gh: i for i, gh in enumerate(ORDERS)}
_ZERO = _Q(0)


@dataclass(frozen=True)
class MomentAccumulator:
    """Exact power sums S[g,h] for g+h <= 4. S[0,0] is the total weight."""

    sums: tuple

    @property
    def weight(self) -> float:
        return float(self.sums[0])

    @property
    def is_empty(self) -> bool:
        return self.sums[0] == 0

    def s(self, g: int, h: int) -> float:
        """Sum S[g,h] as a float."""
        return float(self.sums[_POS[g, h]])


def empty() -> MomentAccumulator:
    return MomentAccumulator(sums=(_ZERO,) * 15)


def _require_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite coordinate or weight: {v!r}")


def _point_terms(x: float, y: float, w: float) -> list:
    """Exact monomial terms w * x^g * y^h in ORDERS order."""
    qx, qy = _Q(x), _Q(y)
    xp = [_Q(1), qx, qx * qx]
    xp.append(xp[2] * qx)
    xp.append(xp[3] * qx)
    yp = [_Q(1), qy, qy * qy]
    yp.append(yp[2] * qy)
    yp.append(yp[3] * qy)
    terms = [xp[g] * yp[h] for g, h in ORDERS]
    if w != 1.0:
        qw = _Q(w)
        terms = [qw * t for t in terms]
    return terms


def accumulate_point(acc: MomentAccumulator, p, w: float = 1.0) -> MomentAccumulator:
    """Return ``acc`` with the weighted point folded in. Requires w > 0."""
    x, y = float(p[0]), float(p[1])
    _require_finite(x, y, w)
    if w <= 0:
        raise ValueError(f"weight must be positive, got {w!r}")
    terms = _point_terms(x, y, w)
    return MomentAccumulator(sums=tuple(s + t for s, t in zip(acc.sums, terms)))


def from_points(points, weights=None) -> MomentAccumulator:
    """Accumulator over a batch of points (unit weights unless given)."""
    sums = list(empty().sums)
    if weights is None:
        for p in points:
            x, y = float(p[0]), float(p[1])
            _require_finite(x, y)
            for i, t in enumerate(_point_terms(x, y, 1.0)):
                sums[i] += t
    else:
        for p, w in zip(points, weights, strict=True):
            x, y, w = float(p[0]), float(p[1]), float(w)
            _require_finite(x, y, w)
            if w <= 0:
                raise ValueError(f"weight must be positive, got {w!r}")
            for i, t in enumerate(_point_terms(x, y, w)):
                sums[i] += t
    return MomentAccumulator(sums=tuple(sums))


# For each (g,h): closed form of integral_0^1 (x0+t*dx)^g (y0+t*dy)^h dt as
# sum over (k,m) of C(g,k)*C(h,m)/(k+m+1) * x0^(g-k) dx^k y0^(h-m) dy^m.
_SEGMENT_COEFFS = {
    (g, h): tuple(
        (k, m, _Q(comb(g, k) * comb(h, m), k + m + 1))
        for k in range(g + 1)
        for m in range(h + 1)
    )
    for g, h in ORDERS
}


def accumulate_segment(acc: MomentAccumulator, p0, p1) -> MomentAccumulator:
    """Fold in a line segment as the arc-length integral of each monomial.

    The segment contributes integral x^g y^h ds, so its weight is its length.
    """
    x0, y0 = float(p0[0]), float(p0[1])
    x1, y1 = float(p1[0]), float(p1[1])
    _require_finite(x0, y0, x1, y1)
    if x0 == x1 and y0 == y1:
        raise ValueError("zero-length segment")
    dx, dy = x1 - x0, y1 - y0
    length = _Q(math.hypot(dx, dy))

    qx0, qy0, qdx, qdy = _Q(x0), _Q(y0), _Q(dx), _Q(dy)
    x0p = [_Q(1)]
    y0p = [_Q(1)]
    dxp = [_Q(1)]
    dyp = [_Q(1)]
    for _ in range(4):
        x0p.append(x0p[-1] * qx0)
        y0p.append(y0p[-1] * qy0)
        dxp.append(dxp[-1] * qdx)
        dyp.append(dyp[-1] * qdy)

    sums = list(acc.sums)
    for i, (g, h) in enumerate(ORDERS):
        total = _ZERO
        for k, m, coeff in _SEGMENT_COEFFS[g, h]:
            total += coeff * x0p[g - k] * dxp[k] * y0p[h - m] * dyp[m]
        sums[i] += length * total
    return MomentAccumulator(sums=tuple(sums))


def from_segments(segments) -> MomentAccumulator:
    acc = empty()
    for p0, p1 in segments:
        acc = accumulate_segment(acc, p0, p1)
    return acc


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Componentwise sum; exact, so commutative and associative."""
    return MomentAccumulator(sums=tuple(x + y for x, y in zip(a.sums, b.sums)))


def difference(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Componentwise a - b; exact. Used for prefix-range extraction."""
    return MomentAccumulator(sums=tuple(x - y for x, y in zip(a.sums, b.sums)))


def _shift_sums(vals, dx, dy):
    """Binomial re-expansion of power sums about an origin shifted by (dx, dy).

    Works over any ring with +, * and int coefficients (exact rationals here,
    plain floats for the normalized convenience path).
    """
    dxp = [dx * 0 + 1, dx]
    dyp = [dy * 0 + 1, dy]
    for _ in range(3):
        dxp.append(dxp[-1] * dx)
        dyp.append(dyp[-1] * dy)
    out = []
    for g, h in ORDERS:
        total = vals[0] * 0
        for k in range(g + 1):
            ck = comb(g, k)
            for m in range(h + 1):
                c = ck * comb(h, m)
                total += c * dxp[g - k] * dyp[h - m] * vals[_POS[k, m]]
        out.append(total)
    return out


def translate(acc: MomentAccumulator, dx: float, dy: float) -> MomentAccumulator:
    """Accumulator as if every input point had been shifted by (dx, dy)."""
    _require_finite(dx, dy)
    if dx == 0.0 and dy == 0.0:
        return acc
    shifted = _shift_sums(list(acc.sums), _Q(dx), _Q(dy))
    return MomentAccumulator(sums=tuple(shifted))


def centroid(acc: MomentAccumulator) -> tuple[float, float]:
    if acc.sums[0] == 0:
        raise ValueError("empty accumulator has no centroid")
    return float(acc.sums[1] / acc.sums[0]), float(acc.sums[2] / acc.sums[0])


@dataclass(frozen=True)
class NormalizedMoments:
    """Weight-normalized raw moments M[g,h] = S[g,h] / W as floats.

    m00 is 1 by construction and not stored.
    """

    w: float
    m10: float
    m01: float
    m20: float
    m11: float
    m02: float
    m30: float
    m21: float
    m12: float
    m03: float
    m40: float
    m31: float
    m22: float
    m13: float
    m04: float

    @classmethod
    def from_values(cls, w: float, vals) -> "NormalizedMoments":
        return cls(w, *vals[1:])

    def values(self) -> list[float]:
        return [1.0, self.m10, self.m01, self.m20, self.m11, self.m02,
                self.m30, self.m21, self.m12, self.m03,
                self.m40, self.m31, self.m22, self.m13, self.m04]

    def translated(self, dx: float, dy: float) -> "NormalizedMoments":
        """Float binomial shift. Adequate for moderate offsets; for large
        offsets translate the exact accumulator instead."""
        if dx == 0.0 and dy == 0.0:
            return self
        return NormalizedMoments.from_values(
            self.w, _shift_sums(self.values(), float(dx), float(dy)))

    @property
    def mean(self) -> tuple[float, float]:
        return self.m10, self.m01


def normalized(acc: MomentAccumulator) -> NormalizedMoments:
    """Normalize by total weight. Rejects the empty accumulator."""
    w = acc.sums[0]
    if w <= 0:
        raise ValueError("cannot normalize an accumulator with zero weight")
    return NormalizedMoments.from_values(
        float(w), [float(s / w) for s in acc.sums])
