"""End-to-end certification of strong starlikeness.

A certificate measures the sector angle of ``f' + z f''`` (or of ``f'`` for
the Alexander transform route), solves the parameter chain, and checks
``(pi/2)(alpha + gamma) <= phi(mu)``. Everything needed to re-derive the
verdict is stored in the certificate itself.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .argsup import (
    ArgSupEstimate,
    EvaluableFunction,
    Ladder,
    arg_sup,
    boundary_profile,
    principal_min_abs_arg,
    write_profile_csv,
)
from .errors import (
    AdmissibilityError,
    MeasurementAnomalyError,
    NonvanishingError,
    StarcertError,
    ZeroDenominatorError,
)
from .params import ParamChain, chain, phi, search_mu
from .series import (
    ClassTag,
    PowerSeries,
    alexander_transform,
    differentiate,
    evaluate,
    hypothesis_expression,
    require_class,
    starlike_quotient,
    ulp_equal,
)

SCHEMA = 1

CERTIFIED = "certified"
NOT_CERTIFIED = "not-certified"
NO_CONCLUSION = "no-conclusion"


@dataclass(frozen=True)
class Settings:
    ladder: Ladder = field(default_factory=Ladder)
    tol: float = 1e-4
    samples: int = 4096
    eps_strict: float = 1e-9
    alpha_rel_margin: float = 1e-6
    alpha_abs_margin: float = 1e-9
    chain_tol: float = 1e-12
    class_tol: float = 0.0
    direct_check: bool = False

    def inflate(self, alpha_est: float) -> float:
        return alpha_est * (1.0 + self.alpha_rel_margin) + self.alpha_abs_margin

    def conventions(self) -> dict:
        return {
            "eps_strict": self.eps_strict,
            "argsup_tol": self.tol,
            "samples": self.samples,
            "ladder": self.ladder.to_dict(),
            "alpha_inflation": {"relative": self.alpha_rel_margin, "absolute": self.alpha_abs_margin},
            "chain_tol": self.chain_tol,
            "class_tol": self.class_tol,
        }


def series_function(s: PowerSeries, label: str = "") -> EvaluableFunction:
    return EvaluableFunction(lambda z: evaluate(s, z), label)


def quotient_function(f: PowerSeries, label: str = "z f'/f") -> EvaluableFunction:
    return EvaluableFunction(lambda z: starlike_quotient(f, z), label)


@dataclass(frozen=True)
class DirectCheck:
    sup_quotient_arg: float | None
    bound: float
    passed: bool


@dataclass(frozen=True)
class Certificate:
    input_descriptor: dict
    alpha_est: float | None
    alpha_used: float | None
    chain: ParamChain | None
    mu: float
    phi_mu: float
    lhs: float | None
    margin: float | None
    verdict: str
    direct_check: DirectCheck | None
    conventions: dict
    measurement: dict | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "tool_version": __version__,
            "input_descriptor": self.input_descriptor,
            "alpha_est": self.alpha_est,
            "alpha_used": self.alpha_used,
            "chain": None if self.chain is None else self.chain.to_dict(),
            "mu": self.mu,
            "phi_mu": self.phi_mu,
            "lhs": self.lhs,
            "margin": self.margin,
            "verdict": self.verdict,
            "direct_check": None if self.direct_check is None else asdict(self.direct_check),
            "conventions": self.conventions,
            "measurement": self.measurement,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported certificate schema {d.get('schema')!r}")
        return cls(
            input_descriptor=d["input_descriptor"],
            alpha_est=d["alpha_est"],
            alpha_used=d["alpha_used"],
            chain=None if d["chain"] is None else ParamChain.from_dict(d["chain"]),
            mu=d["mu"],
            phi_mu=d["phi_mu"],
            lhs=d["lhs"],
            margin=d["margin"],
            verdict=d["verdict"],
            direct_check=None if d["direct_check"] is None else DirectCheck(**d["direct_check"]),
            conventions=d["conventions"],
            measurement=d["measurement"],
            reason=d["reason"],
        )


def _verdict(trivial, params, lhs, margin, converged):
    if trivial:
        return CERTIFIED
    if params is None or lhs is None or lhs > math.pi:
        return NO_CONCLUSION
    if not converged:
        return NOT_CERTIFIED
    return CERTIFIED if margin >= 0 and params.alpha > 0 else NOT_CERTIFIED


def recheck(cert: Certificate | dict) -> str:
    """Recompute the verdict from the stored fields alone."""
    if isinstance(cert, dict):
        cert = Certificate.from_dict(cert)
    trivial = cert.input_descriptor.get("identity", False)
    params = cert.chain
    lhs = margin = None
    if params is not None:
        n = params.n
        for x, target, residual in (
            (params.beta, params.alpha, params.residual_beta),
            (params.gamma, params.beta, params.residual_gamma),
        ):
            if abs(x + 2.0 / math.pi * math.atan(n * x) - target) > max(residual, 0.0) + 1e-15:
                return NO_CONCLUSION
        if params.beta > params.beta0 or cert.alpha_est is None or params.alpha < cert.alpha_est:
            return NO_CONCLUSION
        lhs = params.lhs
        margin = phi(cert.mu, n).phi - lhs
    converged = bool(cert.measurement and cert.measurement.get("converged"))
    return _verdict(trivial, params, lhs, margin, converged)


def _descriptor(f: PowerSeries, n: int, theorem: int) -> dict:
    return {
        "digest": f.digest(),
        "n": n,
        "truncation_order": f.truncation_order,
        "theorem": theorem,
        "identity": f.is_identity(),
    }


def _direct(f: PowerSeries, mu: float, settings: Settings) -> DirectCheck:
    bound = 0.5 * math.pi * mu
    try:
        est = arg_sup(quotient_function(f), settings.ladder, settings.tol, settings.samples)
    except (NonvanishingError, ZeroDenominatorError):
        return DirectCheck(None, bound, False)
    return DirectCheck(est.sup_abs_arg, bound, est.sup_abs_arg <= bound - settings.eps_strict)


def _certify(target, hypothesis, n, mu, settings, descriptor):
    """Shared Theorem 1 logic: ``hypothesis`` is the series whose sector angle is measured."""
    conventions = settings.conventions()
    direct = None
    if target.is_identity():
        mu_used = 1.0 if mu is None else mu
        conventions["mu_selection"] = "given" if mu is not None else "default"
        if settings.direct_check:
            direct = DirectCheck(0.0, 0.5 * math.pi * mu_used, True)
        return Certificate(
            descriptor, 0.0, 0.0, None, mu_used, phi(mu_used, n).phi, 0.0,
            phi(mu_used, n).phi, CERTIFIED, direct, conventions,
            reason="f(z) = z: z f'/f is identically 1",
        )

    try:
        est: ArgSupEstimate = arg_sup(
            series_function(hypothesis, "f' + z f''"), settings.ladder, settings.tol, settings.samples
        )
    except NonvanishingError as exc:
        mu_used = 1.0 if mu is None else mu
        return Certificate(
            descriptor, None, None, None, mu_used, phi(mu_used, n).phi, None, None,
            NO_CONCLUSION, None, conventions, reason=f"hypothesis expression vanishes: {exc}",
        )
    if est.sup_abs_arg == 0.0:
        raise MeasurementAnomalyError("measured zero argument for a non-identity input")

    alpha_est = 2.0 / math.pi * est.sup_abs_arg
    alpha_used = settings.inflate(alpha_est)
    measurement = est.to_dict()
    reason = ""
    try:
        params = chain(alpha_used, n, settings.chain_tol)
    except AdmissibilityError as exc:
        params = None
        reason = str(exc)

    if mu is None:
        conventions["mu_selection"] = "smallest admissible"
        mu_used = 1.0
        if params is not None and params.lhs <= math.pi:
            found = search_mu(alpha_used, n)
            mu_used = found.mu
            conventions["mu_scan_monotone"] = found.monotone
    else:
        conventions["mu_selection"] = "given"
        mu_used = mu

    phi_mu = phi(mu_used, n).phi
    lhs = None if params is None else params.lhs
    margin = None if lhs is None else phi_mu - lhs
    if lhs is not None and lhs > math.pi:
        reason = f"(pi/2)(alpha + gamma) = {lhs!r} exceeds pi; no mu in (0, 1] is admissible"
    elif not est.converged:
        reason = "ladder did not converge"
    verdict = _verdict(False, params, lhs, margin, est.converged)

    if settings.direct_check:
        direct = _direct(target, mu_used, settings)
    return Certificate(
        descriptor, alpha_est, alpha_used, params, mu_used, phi_mu, lhs, margin, verdict,
        direct, conventions, measurement, reason,
    )


def certify_theorem1(
    f: PowerSeries, n: int, mu: float | None = None, settings: Settings | None = None
) -> Certificate:
    """Certify ``f`` in STS(mu) from the sector angle of ``f' + z f''``.

    With ``mu=None`` the smallest admissible mu is used.
    """
    settings = settings or Settings()
    require_class(f, ClassTag.A(n), settings.class_tol)
    return _certify(f, hypothesis_expression(f), n, mu, settings, _descriptor(f, n, 1))


def certify_theorem2(
    f: PowerSeries, n: int, mu: float | None = None, settings: Settings | None = None
) -> tuple[PowerSeries, Certificate]:
    """Certify the Alexander transform ``F`` of ``f`` from the sector angle of ``f'``."""
    settings = settings or Settings()
    require_class(f, ClassTag.A(n), settings.class_tol)
    F = alexander_transform(f)
    fprime = differentiate(f)
    if not ulp_equal(hypothesis_expression(F), fprime):
        raise StarcertError("F' + z F'' differs from f' beyond 1 ulp; transform is inconsistent")
    descriptor = _descriptor(f, n, 2)
    descriptor["transform"] = "alexander"
    descriptor["transform_digest"] = F.digest()
    return F, _certify(F, fprime, n, mu, settings, descriptor)


def example1(n: int, alpha: float) -> tuple[PowerSeries, float, float]:
    """``f = z + c z^(n+1)`` with ``c = sin(pi alpha/2)/(n+1)**2``, plus its direct order.

    Returns ``(f, mu_direct, bound)`` where ``bound = (pi/2) mu_direct`` is
    the supremum of ``|arg(z f'/f)|``.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    s = math.sin(0.5 * math.pi * alpha)
    c = np.zeros(n + 2, dtype=complex)
    c[1] = 1.0
    c[n + 1] = s / (n + 1) ** 2
    bound = math.asin(n * (n + 1) * s / ((n + 1) ** 3 - s * s))
    return PowerSeries(c), 2.0 / math.pi * bound, bound


def mobius_bound(n: int, c: float) -> float:
    """sup |arg| of ``n+1 - n/(1 + c w)`` over ``|w| < 1`` from its image disk."""
    centre = (n + 1) - n / (1.0 - c * c)
    radius = n * c / (1.0 - c * c)
    return math.asin(radius / centre)


@dataclass(frozen=True)
class CorollaryRow:
    name: str
    n: int
    alpha: float
    mu: float
    beta: float
    gamma: float
    beta0: float
    lhs: float
    phi: float
    margin: float
    passed: bool


COROLLARIES = (
    ("corollary-1", 2, 1.0, 0.5),
    ("corollary-2", 2, 1.5, 1.0),
    ("corollary-3", 1, 1.0, 2.0 / 3.0),
    ("corollary-4", 1, 4.0 / 3.0, 1.0),
)


def corollary_table() -> list[CorollaryRow]:
    rows = []
    for name, n, alpha, mu in COROLLARIES:
        p = chain(alpha, n)
        ph = phi(mu, n).phi
        margin = ph - p.lhs
        rows.append(CorollaryRow(name, n, alpha, mu, p.beta, p.gamma, p.beta0, p.lhs, ph, margin, margin > 0))
    return rows


def corollary_csv(rows: list[CorollaryRow]) -> str:
    names = list(CorollaryRow.__dataclass_fields__)
    lines = [",".join(names)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in asdict(row).values()))
    return "\n".join(lines) + "\n"


def sector_power(mu: float) -> EvaluableFunction:
    """``q(z) = ((1 + z)/(1 - z))**mu`` with the principal power."""
    return EvaluableFunction(lambda z: ((1.0 + z) / (1.0 - z)) ** mu, f"q_{mu}")


def lemma3_h(mu: float, n: int) -> EvaluableFunction:
    """``h = q**2 + n z q'`` with ``q' = q * 2 mu / (1 - z**2)``."""
    q = sector_power(mu)

    def h(z):
        qz = q(z)
        return qz * qz + n * z * qz * (2.0 * mu / (1.0 - z * z))

    return EvaluableFunction(h, f"h_{mu}_{n}")


@dataclass(frozen=True)
class Lemma3Check:
    mu: float
    n: int
    r: float
    min_abs_arg: float
    phi_ref: float
    passed: bool
    theta_at_min: float
    excluded_halfwidth: float


def lemma3_boundary_check(
    mu: float, n: int, r: float = 0.9999, tol_boundary: float = 1e-2, m: int = 16384
) -> Lemma3Check:
    """Compare min of the principal ``|Arg h|`` on ``|z| = r`` with ``phi(mu, n)``.

    ``h`` has a pole at ``z = 1`` and takes positive real values along
    ``(0, 1)``, so an arc ``|theta| < 8 (1 - r) / tol_boundary`` around the
    pole is excluded; outside it the circle of radius ``r`` tracks the
    unit-circle boundary values to within ``tol_boundary / 4``.
    """
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie in (0, 1), got {mu!r}")
    if r < 0.999 or r >= 1:
        raise ValueError(f"r must lie in [0.999, 1), got {r!r}")
    exclude = 8.0 * (1.0 - r) / tol_boundary
    value, theta = principal_min_abs_arg(lemma3_h(mu, n), r, m, exclude)
    ref = phi(mu, n).phi
    return Lemma3Check(mu, n, r, value, ref, value >= ref - tol_boundary, theta, exclude)


@dataclass(frozen=True)
class ProductCheck:
    identity_error: float
    max_excess: float
    compared: int


def product_decomposition_check(f: PowerSeries, r: float, m: int = 4096, slack: float = 0.1) -> ProductCheck:
    """Check ``f' + z f'' = (f/z)(p**2 + z p')`` and arg subadditivity on ``|z| = r``.

    ``p = z f'/f``; ``p**2 + z p'`` is evaluated as ``z (f' + z f'')/f``.
    Only samples with ``|arg(f/z)| + |arg(p**2 + z p')| < pi - slack`` are
    compared. Arguments are the continuous branches through ``z = 0``.
    """
    hyp = hypothesis_expression(f)
    big_p = EvaluableFunction(lambda z: np.where(z == 0, 1.0, evaluate(f, z) / np.where(z == 0, 1.0, z)), "f/z")
    small = EvaluableFunction(
        lambda z: np.where(z == 0, 1.0, z * evaluate(hyp, z) / np.where(z == 0, 1.0, evaluate(f, z))),
        "p^2 + z p'",
    )
    lhs = series_function(hyp, "f' + z f''")
    a_big = boundary_profile(big_p, r, m).arg
    a_small = boundary_profile(small, r, m).arg
    a_lhs = boundary_profile(lhs, r, m).arg
    z = r * np.exp(1j * boundary_profile(lhs, r, m).theta)
    ident = float(np.max(np.abs(big_p(z) * small(z) - lhs(z))))
    mask = np.abs(a_big) + np.abs(a_small) < math.pi - slack
    excess = np.abs(a_lhs[mask]) - (np.abs(a_big[mask]) + np.abs(a_small[mask]))
    return ProductCheck(ident, float(excess.max()) if excess.size else -math.inf, int(mask.sum()))


@dataclass(frozen=True)
class Example1Check:
    n: int
    alpha: float
    bound: float
    mobius_bound: float
    sup_quotient: float
    sup_hypothesis: float
    hypothesis_target: float
    mu_theorem: float
    verdict: str
    direct_passed: bool
    passed: bool


def example1_check(n: int, alpha: float, settings: Settings | None = None) -> Example1Check:
    """Measure both sector angles for the generated function and certify it."""
    settings = settings or Settings()
    f, _, bound = example1(n, alpha)
    sup_q = arg_sup(quotient_function(f), settings.ladder, settings.tol, settings.samples).sup_abs_arg
    sup_h = arg_sup(
        series_function(hypothesis_expression(f)), settings.ladder, settings.tol, settings.samples
    ).sup_abs_arg
    cert = certify_theorem1(f, n, None, replace(settings, direct_check=True))
    target = 0.5 * math.pi * alpha
    ok = (
        bound - 1e-3 <= sup_q <= bound + 1e-9
        and abs(sup_h - target) <= 1e-2
        and cert.verdict == CERTIFIED
        and cert.direct_check.passed
    )
    return Example1Check(
        n, alpha, bound, mobius_bound(n, f[n + 1].real), sup_q, sup_h, target, cert.mu,
        cert.verdict, cert.direct_check.passed, ok,
    )


LEMMA3_MUS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
LEMMA3_NS = (1, 2, 3)
EXAMPLE1_ALPHAS = (0.25, 0.5, 0.75, 1.0)
EXAMPLE1_NS = (1, 2)


def run_suite(settings: Settings | None = None, emit_profiles: str | Path | None = None) -> dict:
    """Corollary fixtures, the Lemma 3 boundary grid and the Example 1 sweep."""
    settings = settings or Settings()
    rows = corollary_table()
    lemma = [lemma3_boundary_check(mu, n) for mu in LEMMA3_MUS for n in LEMMA3_NS]
    examples = [example1_check(n, a, settings) for n in EXAMPLE1_NS for a in EXAMPLE1_ALPHAS]
    if emit_profiles is not None:
        out = Path(emit_profiles)
        out.mkdir(parents=True, exist_ok=True)
        for chk in lemma:
            prof = boundary_profile(lemma3_h(chk.mu, chk.n), chk.r, settings.samples, unwrap=False)
            write_profile_csv(prof, out / f"lemma3_mu{chk.mu}_n{chk.n}.csv")
        top = settings.ladder.radius(settings.ladder.depth)
        for chk in examples:
            f, _, _ = example1(chk.n, chk.alpha)
            write_profile_csv(
                boundary_profile(quotient_function(f), top, settings.samples),
                out / f"example1_n{chk.n}_alpha{chk.alpha}_quotient.csv",
            )
            write_profile_csv(
                boundary_profile(series_function(hypothesis_expression(f)), top, settings.samples),
                out / f"example1_n{chk.n}_alpha{chk.alpha}_hypothesis.csv",
            )
    passed = all(r.passed for r in rows) and all(c.passed for c in lemma) and all(e.passed for e in examples)
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "conventions": settings.conventions(),
        "corollaries": [asdict(r) for r in rows],
        "lemma3": [asdict(c) for c in lemma],
        "example1": [asdict(e) for e in examples],
        "passed": passed,
    }
