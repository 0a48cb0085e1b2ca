"""Parameter calculus for the sector-angle chain and the admissible angle phi.

The chain links three sector multipliers through the increasing map

    x -> x + (2/pi) * arctan(n * lam * x)

applied twice (alpha -> beta -> gamma), subject to the cap beta <= beta0.
``phi(mu, n)`` is the largest sector half-angle for ``p**2 + z p'`` that
still forces ``|arg p| < pi mu / 2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .errors import AdmissibilityError, DomainError, NoConclusionError, SolverError

TWO_OVER_PI = 2.0 / math.pi

XTOL = 1e-13
MAX_ITER = 200
DEFAULT_TOL = 1e-12
MU_SCAN_STEP = 1e-3
MU_TOL = 1e-9


@dataclass(frozen=True)
class ParamChain:
    n: int
    lam: float
    alpha: float
    beta: float
    gamma: float
    beta0: float
    residual_beta: float
    residual_gamma: float

    @property
    def lhs(self) -> float:
        """Left side of the admissibility inequality, (pi/2)(alpha + gamma)."""
        return 0.5 * math.pi * (self.alpha + self.gamma)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ParamChain":
        d = dict(d)
        d["lam"] = d.pop("lambda")
        return cls(**d)


@dataclass(frozen=True)
class PhiEvaluation:
    mu: float
    n: int
    phi: float
    varphi: float
    x0: float


class HMinimum(NamedTuple):
    varphi_est: float
    argmin_x: float
    resolution: float


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_mu(mu, allow_one=True):
    hi_ok = mu <= 1.0 if allow_one else mu < 1.0
    if not (mu > 0.0 and hi_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise DomainError(f"mu must lie in {bound}, got {mu!r}")
    return float(mu)


def increment(x: float, n: int, lam: float = 1.0) -> float:
    """Return ``x + (2/pi) arctan(n lam x)``."""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    n = _check_n(n)
    return x + TWO_OVER_PI * math.atan(n * lam * x)


def _bisect_increasing(func, lo, hi, tol):
    """Root of an increasing ``func`` on ``[lo, hi]``; returns (root, |residual|)."""
    try:
        root = optimize.bisect(func, lo, hi, xtol=XTOL, maxiter=MAX_ITER)
    except (RuntimeError, ValueError) as exc:
        raise SolverError(str(exc)) from exc
    residual = abs(func(root))
    if residual > tol:
        raise SolverError(
            f"bisection stopped at {root!r} with residual {residual:.3e} > tol {tol:.3e}"
        )
    return root, residual


def solve_increment(target: float, n: int, lam: float = 1.0, tol: float = DEFAULT_TOL) -> float:
    """Invert :func:`increment`: the unique ``x`` in ``[0, target]`` mapping to ``target``."""
    return _solve_increment(target, n, lam, tol)[0]


def _solve_increment(target, n, lam, tol):
    if not target > 0:
        raise DomainError(f"target must be positive, got {target!r}")
    n = _check_n(n)
    return _bisect_increasing(lambda x: increment(x, n, lam) - target, 0.0, target, tol)


def beta0(n: int, lam: float = 1.0, tol: float = DEFAULT_TOL) -> float:
    """Cap on beta: the root of ``beta*pi + arctan(n lam beta) = 3 pi / 2`` in [1, 3/2]."""
    n = _check_n(n)
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    root, _ = _bisect_increasing(
        lambda b: b * math.pi + math.atan(n * lam * b) - 1.5 * math.pi, 1.0, 1.5, tol
    )
    return root


def chain(alpha: float, n: int, tol: float = DEFAULT_TOL) -> ParamChain:
    """Solve alpha -> beta -> gamma with lambda = 1 and enforce beta <= beta0.

    Raises :class:`AdmissibilityError` when beta (or gamma) exceeds beta0;
    in that case no conclusion can be drawn from the hypothesis angle.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    n = _check_n(n)
    b, res_b = _solve_increment(alpha, n, 1.0, tol)
    g, res_g = _solve_increment(b, n, 1.0, tol)
    cap = beta0(n, 1.0, tol)
    if b > cap or g > cap:
        raise AdmissibilityError(
            f"beta = {b:.12g} exceeds beta0 = {cap:.12g} for alpha = {alpha:.12g}, n = {n}"
        )
    return ParamChain(n, 1.0, float(alpha), b, g, cap, res_b, res_g)


def critical_x0(mu: float) -> float:
    """Interior root of ``G = Q'P - P'Q``, i.e. ``sqrt((1 + mu) / (1 - mu))``.

    ``G(x)`` is proportional to ``(1 - mu) x**2 - (1 + mu)``; at ``mu = 1``
    ``Q`` vanishes identically and 0 is returned by convention.
    """
    mu = _check_mu(mu)
    if mu == 1.0:
        return 0.0
    return math.sqrt((1.0 + mu) / (1.0 - mu))


def _arctan_term(mu, n):
    half = 0.5 * mu * math.pi
    shift = n * mu / (1.0 - mu) * ((1.0 - mu) / (1.0 + mu)) ** (0.5 * (1.0 + mu))
    return math.atan(math.cos(half) / (math.sin(half) + shift))


def phi(mu: float, n: int) -> PhiEvaluation:
    mu = _check_mu(mu)
    n = _check_n(n)
    if mu == 1.0:
        return PhiEvaluation(1.0, n, math.pi, math.pi, 0.0)
    t = _arctan_term(mu, n)
    return PhiEvaluation(
        mu=mu,
        n=n,
        phi=0.5 * math.pi * (mu + 1.0) - t,
        varphi=math.pi - t,
        x0=critical_x0(mu),
    )


def arg_H(x, mu: float, n: int):
    """arg of ``H(x) = (ix)**(mu+1) - (n/2) mu (1 + x**2)`` on the (pi/2, pi] branch."""
    x = np.asarray(x, dtype=float)
    xp = x ** (mu + 1.0)
    p = -math.sin(0.5 * mu * math.pi) * xp - 0.5 * n * mu * (1.0 + x * x)
    q = math.cos(0.5 * mu * math.pi) * xp
    return math.pi - np.arctan(q / -p)


def G(x, mu: float, n: int):
    """``Q'(x) P(x) - P'(x) Q(x)`` evaluated from the component formulas."""
    x = np.asarray(x, dtype=float)
    s, c = math.sin(0.5 * mu * math.pi), math.cos(0.5 * mu * math.pi)
    p = -s * x ** (mu + 1.0) - 0.5 * n * mu * (1.0 + x * x)
    dp = -s * (mu + 1.0) * x**mu - n * mu * x
    q = c * x ** (mu + 1.0)
    dq = c * (mu + 1.0) * x**mu
    return dq * p - dp * q


def min_arg_H_bruteforce(
    mu: float, n: int, points: int = 100_000, rounds: int = 3, x_max: float | None = None
) -> HMinimum:
    """Grid minimum of ``arg H(x)`` over ``x >= 0``.

    The grid is half logarithmic, half linear on ``[0, x_max]``; each
    refinement round resamples the bracket around the running argmin.
    ``resolution`` is the coarse-grid spacing at the argmin.
    """
    mu = _check_mu(mu, allow_one=False)
    n = _check_n(n)
    if points < 16:
        raise DomainError("grid needs at least 16 points")
    if x_max is None:
        x_max = max(10.0, 10.0 * critical_x0(mu))
    half = points // 2
    grid = np.unique(
        np.concatenate(
            ([0.0], np.geomspace(1e-8 * x_max, x_max, half), np.linspace(0.0, x_max, points - half))
        )
    )
    vals = arg_H(grid, mu, n)
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    resolution = hi - lo
    best_x, best_v = grid[i], vals[i]
    for _ in range(rounds):
        local = np.linspace(lo, hi, 1001)
        lv = arg_H(local, mu, n)
        j = int(np.argmin(lv))
        if lv[j] <= best_v:
            best_x, best_v = local[j], lv[j]
        lo, hi = local[max(j - 1, 0)], local[min(j + 1, 1000)]
    return HMinimum(float(best_v), float(best_x), float(resolution))


class MuSearch(NamedTuple):
    mu: float
    monotone: bool
    target: float


def _phi_value(mu, n):
    return 0.0 if mu <= 0.0 else phi(mu, n).phi


def search_mu(alpha: float, n: int, tol: float = MU_TOL) -> MuSearch:
    """Smallest mu with ``phi(mu, n) >= (pi/2)(alpha + gamma)``, with a monotonicity flag."""
    params = chain(alpha, n)
    target = params.lhs
    if target > math.pi:
        raise NoConclusionError(
            f"(pi/2)(alpha + gamma) = {target:.12g} exceeds phi(1) = pi"
        )
    steps = int(round(1.0 / MU_SCAN_STEP))
    grid = [k / steps for k in range(1, steps + 1)]
    values = [_phi_value(m, n) for m in grid]
    monotone = all(b >= a for a, b in zip(values, values[1:]))
    k = next(i for i, v in enumerate(values) if v >= target)
    if not monotone:
        return MuSearch(grid[k], False, target)
    lo = grid[k - 1] if k > 0 else 0.0
    hi = grid[k]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _phi_value(mid, n) >= target:
            hi = mid
        else:
            lo = mid
    return MuSearch(hi, True, target)


def best_mu(alpha: float, n: int, tol: float = MU_TOL) -> float:
    """Strongest order mu that the admissibility inequality certifies for ``alpha``."""
    return search_mu(alpha, n, tol).mu
