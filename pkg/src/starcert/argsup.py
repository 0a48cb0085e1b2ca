"""Estimate sup |arg g| over the unit disk from circles of increasing radius.

``g`` is any vectorized analytic function with ``g(0) = 1``. On each circle
the phase is unwrapped continuously: an adjacent-sample step larger than
pi/2 is resolved by bisecting that interval until every step is small. The
starting phase comes from unwrapping along the ray from 0, so the branch is
the one with ``arg g(0) = 0``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    LadderMonotonicityError,
    NonvanishingError,
    ResolutionError,
)

TWO_PI = 2.0 * math.pi
MAX_STEP = 0.5 * math.pi
MAX_REFINE_DEPTH = 40
DEFAULT_SAMPLES = 4096
DEFAULT_TOL = 1e-4
MONOTONE_SLACK = 1e-9
THETA_XTOL = 1e-12
RAY_SAMPLES = 64


@dataclass(frozen=True)
class EvaluableFunction:
    """A vectorized map ``z -> g(z)`` on the open disk, normalized to ``g(0) = 1``."""

    func: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    normalized: bool = True

    def __call__(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=complex)

    def check_normalization(self, tol: float = 1e-12) -> None:
        if self.normalized:
            v = self(np.zeros(1))[0]
            if abs(v - 1.0) > tol:
                raise DomainError(f"{self.label or 'function'} has g(0) = {v!r}, expected 1")

    def __mul__(self, other: "EvaluableFunction") -> "EvaluableFunction":
        return EvaluableFunction(
            lambda z: self(z) * other(z), f"({self.label})*({other.label})", self.normalized and other.normalized
        )


class _Counter:
    def __init__(self, g):
        self.g = g
        self.count = 0

    def __call__(self, z):
        z = np.atleast_1d(z)
        self.count += z.size
        w = self.g(z)
        if not np.all(np.isfinite(w)):
            raise DomainError("function returned non-finite values on the sample set")
        if np.any(w == 0):
            raise NonvanishingError("function vanishes at a sample point")
        return w


def _increments(g, path, ta, tb, wa, wb, depth=0):
    """Continuous phase change of ``g(path(t))`` from each ``ta`` to ``tb``."""
    d = np.angle(wb / wa)
    bad = np.abs(d) > MAX_STEP
    if not bad.any():
        return d
    if depth >= MAX_REFINE_DEPTH:
        raise ResolutionError(
            f"phase step {np.abs(d[bad]).max():.3f} rad persists after {depth} bisections"
        )
    tm = 0.5 * (ta[bad] + tb[bad])
    wm = g(path(tm))
    d[bad] = _increments(g, path, ta[bad], tm, wa[bad], wm, depth + 1) + _increments(
        g, path, tm, tb[bad], wm, wb[bad], depth + 1
    )
    return d


def circle_grid(m: int) -> np.ndarray:
    """``m`` cell-centred angles in (-pi, pi), symmetric under negation."""
    return -math.pi + math.pi / m + TWO_PI * np.arange(m) / m


@dataclass(frozen=True)
class _Trace:
    radius: float
    theta: np.ndarray
    values: np.ndarray
    arg: np.ndarray
    winding: int


def _ray_phase(g, z_end, w_end):
    t = np.linspace(0.0, 1.0, RAY_SAMPLES + 1)
    path = lambda s: s * z_end  # noqa: E731
    w = g(path(t))
    w[-1] = w_end
    return float(np.angle(w[0]) + _increments(g, path, t[:-1], t[1:], w[:-1], w[1:]).sum())


def _trace(g, r, m):
    theta = circle_grid(m)
    path = lambda t: r * np.exp(1j * t)  # noqa: E731
    w = g(path(theta))
    t_next = np.append(theta[1:], theta[0] + TWO_PI)
    inc = _increments(g, path, theta, t_next, w, np.roll(w, -1))
    start = _ray_phase(g, path(theta[:1])[0], w[0])
    arg = start + np.concatenate(([0.0], np.cumsum(inc[:-1])))
    winding = int(round(inc.sum() / TWO_PI))
    return _Trace(r, theta, w, arg, winding)


def winding_check(g: EvaluableFunction, r: float, m: int = DEFAULT_SAMPLES) -> int:
    """Winding number of ``theta -> g(r e^{i theta})`` about 0."""
    if m < 256:
        raise DomainError("winding_check needs at least 256 samples")
    if not 0 < r < 1:
        raise DomainError(f"radius must lie in (0, 1), got {r!r}")
    return _trace(_Counter(g), r, m).winding


def _wrap(theta):
    t = math.remainder(theta, TWO_PI)
    return math.pi if t == -math.pi else t


def _ternary(func, lo, hi, start_t, start_v, sign=1.0):
    best_t, best_v = start_t, start_v
    while hi - lo > THETA_XTOL:
        t1 = lo + (hi - lo) / 3.0
        t2 = hi - (hi - lo) / 3.0
        v1, v2 = func(t1), func(t2)
        for t, v in ((t1, v1), (t2, v2)):
            if sign * v > sign * best_v:
                best_t, best_v = t, v
        if sign * v1 < sign * v2:
            lo = t1
        else:
            hi = t2
    return best_t, best_v


def _local_extrema(values, count, largest=True):
    v = values if largest else -values
    peaks = np.flatnonzero((v >= np.roll(v, 1)) & (v >= np.roll(v, -1)))
    order = np.argsort(-v[peaks], kind="stable")
    return peaks[order[:count]]


def _refine_sup(g, trace, candidates=3):
    path = lambda t: trace.radius * np.exp(1j * t)  # noqa: E731
    h = TWO_PI / len(trace.theta)
    abs_arg = np.abs(trace.arg)
    best_t, best_v = float(trace.theta[0]), float(abs_arg[0])
    for j in _local_extrema(abs_arg, candidates):
        tj, wj, aj = trace.theta[j], trace.values[j], trace.arg[j]

        def abs_arg_at(t):
            w = g(path(np.array([t])))
            return abs(aj + _increments(g, path, np.array([tj]), np.array([t]), np.array([wj]), w)[0])

        t, v = _ternary(abs_arg_at, tj - h, tj + h, float(tj), float(abs_arg[j]))
        if v > best_v:
            best_t, best_v = t, v
    return _wrap(best_t), float(best_v)


@dataclass(frozen=True)
class Ladder:
    """Radii ``1 - 2**-k`` for ``k = 1..depth``, extended up to ``max_depth`` until converged."""

    depth: int = 12
    max_depth: int = 30

    def __post_init__(self):
        if not 1 <= self.depth <= self.max_depth:
            raise DomainError("ladder needs 1 <= depth <= max_depth")
        if 1.0 - 2.0**-self.max_depth >= 1.0:
            raise DomainError("max_depth exceeds double precision")

    @staticmethod
    def radius(k: int) -> float:
        return 1.0 - 2.0**-k

    def to_dict(self) -> dict:
        return {"depth": self.depth, "max_depth": self.max_depth, "radii": "1 - 2**-k"}


@dataclass(frozen=True)
class RungRecord:
    radius: float
    sup_abs_arg: float
    attained_theta: float


@dataclass(frozen=True)
class ArgSupEstimate:
    sup_abs_arg: float
    attained_theta: float
    radius: float
    samples_used: int
    winding_number: int
    converged: bool
    rungs: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "sup_abs_arg": self.sup_abs_arg,
            "attained_theta": self.attained_theta,
            "radius": self.radius,
            "samples_used": self.samples_used,
            "winding_number": self.winding_number,
            "converged": self.converged,
        }


def measure_rung(g: EvaluableFunction, r: float, m: int = DEFAULT_SAMPLES) -> RungRecord:
    """Max of |unwrapped arg g| on the circle of radius ``r``; requires zero winding."""
    counted = _Counter(g)
    trace = _trace(counted, r, m)
    if trace.winding != 0:
        raise NonvanishingError(f"winding number {trace.winding} on |z| = {r!r}")
    t, v = _refine_sup(counted, trace)
    return RungRecord(float(r), float(v), float(t))


def arg_sup(
    g: EvaluableFunction,
    ladder: Ladder | None = None,
    tol: float = DEFAULT_TOL,
    m: int = DEFAULT_SAMPLES,
) -> ArgSupEstimate:
    """Ladder estimate of ``sup |arg g|`` over the disk.

    Rungs are measured from the inside out. The estimate is converged once
    two consecutive rungs (at or beyond ``ladder.depth``) differ by less than
    ``tol``; otherwise the ladder is extended up to ``ladder.max_depth`` and
    the best estimate is returned with ``converged=False``.
    """
    ladder = ladder or Ladder()
    g.check_normalization()
    counted = _Counter(g)
    rungs = []
    converged = False
    for k in range(1, ladder.max_depth + 1):
        r = ladder.radius(k)
        trace = _trace(counted, r, m)
        if trace.winding != 0:
            raise NonvanishingError(
                f"{g.label or 'function'} winds {trace.winding} times around 0 on |z| = {r!r}"
            )
        t, v = _refine_sup(counted, trace)
        if rungs and v < rungs[-1].sup_abs_arg - MONOTONE_SLACK:
            raise LadderMonotonicityError(
                f"rung maximum fell from {rungs[-1].sup_abs_arg!r} to {v!r} at r = {r!r}"
            )
        rungs.append(RungRecord(float(r), float(v), float(t)))
        if k >= ladder.depth and len(rungs) >= 2:
            if abs(rungs[-1].sup_abs_arg - rungs[-2].sup_abs_arg) < tol:
                converged = True
                break
    top = max(rungs, key=lambda rec: rec.sup_abs_arg)
    return ArgSupEstimate(
        sup_abs_arg=top.sup_abs_arg,
        attained_theta=top.attained_theta,
        radius=rungs[-1].radius,
        samples_used=counted.count,
        winding_number=0,
        converged=converged,
        rungs=tuple(rungs),
    )


@dataclass(frozen=True, eq=False)
class BoundaryProfile:
    radius: float
    theta: np.ndarray
    arg: np.ndarray

    def rows(self):
        return list(zip(self.theta.tolist(), self.arg.tolist()))


def boundary_profile(
    g: EvaluableFunction, r: float, m: int = DEFAULT_SAMPLES, unwrap: bool = True
) -> BoundaryProfile:
    """``m`` uniform samples of arg g on ``|z| = r``, starting at ``theta = -pi + pi/m``.

    With ``unwrap=True`` the values are the continuous branch through
    ``arg g(0) = 0`` and ``g`` must not wind around 0 on the circle. With
    ``unwrap=False`` principal values in (-pi, pi] are returned.
    """
    if not 0 < r < 1:
        raise DomainError(f"radius must lie in (0, 1), got {r!r}")
    counted = _Counter(g)
    if not unwrap:
        theta = circle_grid(m)
        return BoundaryProfile(r, theta, np.angle(counted(r * np.exp(1j * theta))))
    trace = _trace(counted, r, m)
    if trace.winding != 0:
        raise NonvanishingError(f"winding number {trace.winding} on |z| = {r!r}")
    return BoundaryProfile(r, trace.theta, trace.arg)


def write_profile_csv(profile: BoundaryProfile, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "arg"])
        for t, a in profile.rows():
            writer.writerow([repr(t), repr(a)])


def principal_min_abs_arg(
    g: EvaluableFunction, r: float, m: int = DEFAULT_SAMPLES, exclude: float = 0.0
) -> tuple[float, float]:
    """Minimum of the principal ``|Arg g|`` on ``|z| = r`` outside ``|theta| < exclude``.

    Returns ``(minimum, theta)``; the grid minimum is polished by trisection.
    """
    theta = circle_grid(m)
    keep = np.abs(theta) >= exclude
    theta = theta[keep]
    vals = np.abs(np.angle(g(r * np.exp(1j * theta))))
    j = int(np.argmin(vals))
    h = TWO_PI / m
    lo = max(theta[j] - h, -math.pi)
    hi = min(theta[j] + h, math.pi)
    if theta[j] > 0:
        lo = max(lo, exclude)
    else:
        hi = min(hi, -exclude)

    def abs_arg(t):
        return float(np.abs(np.angle(g(np.array([r * np.exp(1j * t)]))))[0])

    t, v = _ternary(abs_arg, lo, hi, float(theta[j]), float(vals[j]), sign=-1.0)
    return float(v), float(t)
