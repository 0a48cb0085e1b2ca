"""Truncated complex power series on the unit disk.

Coefficients are stored low order first. Scaling by the real factors that
appear in differentiation and in the Alexander transform is applied to the
real and imaginary parts separately so each coefficient is rounded once.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ClassViolationError, CoefficientFormatError, DomainError, ZeroDenominatorError

UNDERFLOW_FLOOR = 1e-14
CLASS_TOL = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).ravel()
    arr.setflags(write=False)
    return arr


def _scale(c: np.ndarray, factors: np.ndarray) -> np.ndarray:
    out = np.empty(len(c), dtype=complex)
    out.real = factors * c.real
    out.imag = factors * c.imag
    return out


def _divide(c: np.ndarray, factors: np.ndarray) -> np.ndarray:
    out = np.empty(len(c), dtype=complex)
    out.real = c.real / factors
    out.imag = c.imag / factors
    return out


@dataclass(frozen=True, eq=False)
class PowerSeries:
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = _frozen(self.coefficients)
        if len(coeffs) == 0:
            raise ValueError("a power series needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients) - 1

    order = truncation_order

    @classmethod
    def identity(cls, order: int = 1) -> "PowerSeries":
        c = np.zeros(order + 1, dtype=complex)
        c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value: complex = 1.0, order: int = 0) -> "PowerSeries":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    def __getitem__(self, k: int) -> complex:
        return complex(self.coefficients[k]) if k <= self.truncation_order else 0j

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __hash__(self):
        return hash(self.coefficients.tobytes())

    def __repr__(self):
        return f"PowerSeries(order={self.truncation_order}, coefficients={self.coefficients.tolist()!r})"

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            m = min(self.truncation_order, other.truncation_order) + 1
            return PowerSeries(self.coefficients[:m] + other.coefficients[:m])
        c = self.coefficients.copy()
        c[0] += other
        return PowerSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            m = min(self.truncation_order, other.truncation_order) + 1
            return PowerSeries(np.convolve(self.coefficients[:m], other.coefficients[:m])[:m])
        return PowerSeries(self.coefficients * other)

    __rmul__ = __mul__

    def shift(self, k: int = 1) -> "PowerSeries":
        """Multiply by ``z**k``; the result is known through order + k."""
        return PowerSeries(np.concatenate((np.zeros(k, dtype=complex), self.coefficients)))

    def digest(self) -> str:
        """SHA-256 over the exact float representation of every coefficient."""
        text = ";".join(f"{float(c.real)!r},{float(c.imag)!r}" for c in self.coefficients)
        return hashlib.sha256(text.encode()).hexdigest()

    def is_identity(self) -> bool:
        c = self.coefficients
        return c[1] == 1 and not np.any(np.delete(c, 1))


@dataclass(frozen=True)
class ClassTag:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("A_n", "H_1_n"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")

    @classmethod
    def A(cls, n: int) -> "ClassTag":
        return cls("A_n", n)

    @classmethod
    def H(cls, n: int) -> "ClassTag":
        return cls("H_1_n", n)


def validate_class(s: PowerSeries, tag: ClassTag, tol: float = 0.0) -> bool:
    """Check the structural normalization of ``s``.

    With the default ``tol = 0`` every normalized coefficient must match
    exactly; a positive ``tol`` relaxes the comparison to ``|error| <= tol``.
    """
    def close(k, value):
        return abs(s[k] - value) <= tol

    if tag.kind == "A_n":
        if not (close(0, 0) and close(1, 1)):
            return False
        return all(close(k, 0) for k in range(2, tag.n + 1))
    if not close(0, 1):
        return False
    return all(close(k, 0) for k in range(1, tag.n))


def require_class(s: PowerSeries, tag: ClassTag, tol: float = 0.0) -> None:
    if not validate_class(s, tag, tol):
        raise ClassViolationError(f"series is not in class {tag.kind} with n = {tag.n}")


def differentiate(s: PowerSeries) -> PowerSeries:
    if s.truncation_order == 0:
        return PowerSeries([0.0])
    k = np.arange(1, s.truncation_order + 1, dtype=float)
    return PowerSeries(_scale(s.coefficients[1:], k))


def hypothesis_expression(f: PowerSeries) -> PowerSeries:
    """``f' + z f''``, i.e. ``sum k**2 a_k z**(k-1)``, computed termwise."""
    if f.truncation_order == 0:
        return PowerSeries([0.0])
    k = np.arange(1, f.truncation_order + 1, dtype=float)
    return PowerSeries(_scale(f.coefficients[1:], k * k))


def alexander_transform(f: PowerSeries) -> PowerSeries:
    """Coefficients of ``F(z) = integral_0^z f(t)/t dt``: ``a_k -> a_k / k``."""
    c = np.zeros(f.truncation_order + 1, dtype=complex)
    if f.truncation_order >= 1:
        k = np.arange(1, f.truncation_order + 1, dtype=float)
        c[1:] = _divide(f.coefficients[1:], k)
    return PowerSeries(c)


def evaluate(s: PowerSeries, z):
    """Horner evaluation inside the open unit disk; accepts scalars or arrays."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) >= 1.0):
        raise DomainError("power series are evaluated only inside the unit disk")
    out = np.polynomial.polynomial.polyval(zz, s.coefficients)
    return complex(out) if np.ndim(out) == 0 else out


def starlike_quotient(f: PowerSeries, z):
    """Pointwise ``z f'(z) / f(z)``; equal to 1 at ``z = 0``."""
    zz = np.asarray(z, dtype=complex)
    num = zz * evaluate(differentiate(f), zz)
    den = np.asarray(evaluate(f, zz))
    at_zero = zz == 0
    small = (np.abs(den) < UNDERFLOW_FLOOR) & ~at_zero
    if np.any(small):
        raise ZeroDenominatorError("f vanishes (below the underflow floor) at a sample point")
    out = np.where(at_zero, 1.0 + 0j, num / np.where(at_zero, 1.0, den))
    return complex(out) if np.ndim(out) == 0 else out


def ulp_equal(a: PowerSeries, b: PowerSeries, ulps: float = 1.0) -> bool:
    """Coefficientwise agreement within ``ulps`` units in the last place per component."""
    if a.truncation_order != b.truncation_order:
        return False
    for part in (np.real, np.imag):
        x, y = part(a.coefficients), part(b.coefficients)
        if np.any(np.abs(x - y) > ulps * np.spacing(np.maximum(np.abs(x), np.abs(y)))):
            return False
    return True


def read_coefficients(path) -> PowerSeries:
    """Parse ``k,re,im`` lines (``#`` comments, blank lines ignored)."""
    return parse_coefficients(Path(path).read_text(encoding="utf-8"))


def parse_coefficients(text: str) -> PowerSeries:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise CoefficientFormatError(f"expected 'k,re,im', got {raw!r}", lineno)
        try:
            k = int(parts[0])
            value = complex(float(parts[1]), float(parts[2]))
        except ValueError:
            raise CoefficientFormatError(f"unparseable entry {raw!r}", lineno) from None
        if k < 0:
            raise CoefficientFormatError(f"negative index {k}", lineno)
        if k in entries:
            raise CoefficientFormatError(f"duplicate index {k}", lineno)
        if not (np.isfinite(value.real) and np.isfinite(value.imag)):
            raise CoefficientFormatError(f"non-finite coefficient at index {k}", lineno)
        entries[k] = value
    if not entries:
        raise CoefficientFormatError("no coefficients found")
    c = np.zeros(max(entries) + 1, dtype=complex)
    for k, v in entries.items():
        c[k] = v
    return PowerSeries(c)


def format_coefficients(s: PowerSeries, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    for k, c in enumerate(s.coefficients):
        if c != 0:
            lines.append(f"{k},{float(c.real)!r},{float(c.imag)!r}")
    if s.coefficients[-1] == 0:
        # keep the truncation order through a round trip
        lines.append(f"{s.truncation_order},0.0,0.0")
    return "\n".join(lines) + "\n"
