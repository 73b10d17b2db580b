"""Scalar layer: q-arithmetic, infinite products and series, basic hypergeometric sums.

Two evaluation regimes share one set of formulas:

* exact: ``fractions.Fraction`` (or int) inputs flow through unchanged, so any
  finite formula evaluated on rational inputs returns an exact rational.
* numeric: float or complex inputs; infinite products and series additionally
  take a :class:`SeriesControl` that pins truncation behaviour.

Infinite objects (products over q-powers, series) always coerce to float or
complex and require ``|q| < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


class ConvergenceError(RuntimeError):
    """A truncated series or product hit its term cap before settling."""


class DomainError(ValueError):
    """Inputs outside the admissible parameter domain."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for infinite sums and products.

    A sum stops once ``tail_window`` consecutive terms are below ``abs_tol``
    in absolute value; a product stops once the deviation driver (the ``t q^k``
    scale of the current factor) is below ``abs_tol / 10`` for ``tail_window``
    consecutive factors.  Hitting ``max_terms`` first raises
    :class:`ConvergenceError`.
    """

    max_terms: int = 500
    abs_tol: float = 1e-12
    tail_window: int = 3

    def require_q(self, q):
        if abs(q) >= 1:
            raise DomainError(f"infinite sum/product needs |q| < 1, got q={q!r}")


DEFAULT_CTRL = SeriesControl()


def is_exact(x) -> bool:
    """True when x belongs to the exact (rational) regime."""
    return isinstance(x, Rational)


def _numeric(x):
    """Coerce to float/complex for the numeric regime."""
    if isinstance(x, complex):
        return x
    return float(x)


@dataclass(frozen=True)
class QValue:
    """A base-q value tagged with its degenerate-case mode."""

    value: object

    @property
    def mode(self) -> str:
        if self.value == 1:
            return "one"
        if self.value == 0:
            return "zero"
        return "generic"

    @classmethod
    def of(cls, q) -> "QValue":
        return q if isinstance(q, cls) else cls(q)


# ---------------------------------------------------------------------------
# finite q-arithmetic (regime-polymorphic)
# ---------------------------------------------------------------------------

def q_number(n: int, q):
    """[n]_q = 1 + q + ... + q^(n-1), with [n]_1 = n."""
    if n < 0:
        raise DomainError("q_number needs n >= 0")
    if q == 1:
        return n if is_exact(q) else _numeric(n)
    total = q - q  # zero of the right type
    power = 1 + (q - q)
    for _ in range(n):
        total = total + power
        power = power * q
    return total


def q_factorial(n: int, q):
    """[n]_q! = [1]_q [2]_q ... [n]_q."""
    out = 1 if is_exact(q) else _numeric(1)
    for k in range(1, n + 1):
        out = out * q_number(k, q)
    return out


def q_binomial(n: int, k: int, q):
    """Gaussian binomial; 0 outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0 if is_exact(q) else 0.0
    k = min(k, n - k)
    if q == 1:
        c = math.comb(n, k)
        return c if is_exact(q) else float(c)
    num = 1 + (q - q)
    den = 1 + (q - q)
    for i in range(1, k + 1):
        num = num * (1 - q ** (n - k + i))
        den = den * (1 - q**i)
    if is_exact(q):
        return Fraction(num, den) if isinstance(num, int) else num / den
    return num / den


def q_pochhammer(a, q, n: int):
    """(a; q)_n = prod_{i<n} (1 - a q^i) for n >= 0."""
    if n < 0:
        raise DomainError("q_pochhammer needs n >= 0")
    out = 1 if (is_exact(a) and is_exact(q)) else _numeric(1) * _one_like(a, q)
    power = out * 0 + 1
    for _ in range(n):
        out = out * (1 - a * power)
        power = power * q
    return out


def _one_like(*vals):
    for v in vals:
        if isinstance(v, complex):
            return complex(1)
    return 1.0


def q_pochhammer_many(avals, q, n: int):
    """(a1, a2, ..., ak; q)_n, the product of individual symbols."""
    out = 1
    for a in avals:
        out = out * q_pochhammer(a, q, n)
    return out


def q_pochhammer_inf(a, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """(a; q)_infinity, truncated per ctrl; needs |q| < 1."""
    ctrl.require_q(q)
    a = _numeric(a)
    q = _numeric(q)
    out = _one_like(a, q)
    term = a
    small = 0
    for _ in range(ctrl.max_terms):
        if abs(term) < ctrl.abs_tol / 10:
            small += 1
            if small >= ctrl.tail_window:
                return out
        else:
            small = 0
        out = out * (1 - term)
        term = term * q
    raise ConvergenceError("q_pochhammer_inf did not settle")


def q_pochhammer_inf_many(avals, q, ctrl: SeriesControl = DEFAULT_CTRL):
    out = 1
    for a in avals:
        out = out * q_pochhammer_inf(a, q, ctrl)
    return out


# ---------------------------------------------------------------------------
# conjugate-pair quadratic factors and their infinite products
# ---------------------------------------------------------------------------

def conj_pair_factor(x, a):
    """(1 - a e^{i theta})(1 - a e^{-i theta}) at x = cos theta: 1 - 2ax + a^2."""
    return 1 - 2 * a * x + a * a


def double_angle_factor(x, a):
    """Conjugate-pair factor at the doubled angle: (1+a)^2 - 4 a x^2."""
    return (1 + a) * (1 + a) - 4 * a * x * x


def cross_pair_factor(x, y, a):
    """Four-factor cross term, equal to the product of conjugate-pair factors
    at cos(theta+phi) and cos(theta-phi):

    (1 - a^2)^2 - 4 x y a (1 + a^2) + 4 a^2 (x^2 + y^2).
    """
    a2 = a * a
    return (1 - a2) * (1 - a2) - 4 * x * y * a * (1 + a2) + 4 * a2 * (x * x + y * y)


def _product_over_qpowers(factor, t, q, ctrl: SeriesControl):
    """prod_{k>=0} factor(t q^k) with the |t q^k| tail rule."""
    ctrl.require_q(q)
    t = _numeric(t)
    q = _numeric(q)
    out = _one_like(t, q)
    scale = t
    small = 0
    for _ in range(ctrl.max_terms):
        if abs(scale) < ctrl.abs_tol / 10:
            small += 1
            if small >= ctrl.tail_window:
                return out
        else:
            small = 0
        out = out * factor(scale)
        scale = scale * q
    raise ConvergenceError("infinite product did not settle")


def conj_pair_product(x, t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """prod_{k>=0} (1 - 2 t q^k x + t^2 q^{2k})."""
    x = _numeric(x)
    return _product_over_qpowers(lambda a: conj_pair_factor(x, a), t, q, ctrl)


def double_angle_product(x, t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """prod_{k>=0} double_angle_factor(x, t q^k)."""
    x = _numeric(x)
    return _product_over_qpowers(lambda a: double_angle_factor(x, a), t, q, ctrl)


def cross_pair_product(x, y, t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """prod_{k>=0} cross_pair_factor(x, y, t q^k)."""
    x = _numeric(x)
    y = _numeric(y)
    return _product_over_qpowers(lambda a: cross_pair_factor(x, y, a), t, q, ctrl)


def inv_conj_pair_product(x, t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """1 / conj_pair_product; the reciprocal kernel the densities multiply in."""
    return 1.0 / conj_pair_product(x, t, q, ctrl)


# ---------------------------------------------------------------------------
# series driver and the two Euler expansions
# ---------------------------------------------------------------------------

def sum_series(terms, ctrl: SeriesControl = DEFAULT_CTRL):
    """Sum an iterable of terms, stopping per the consecutive-small-tail rule."""
    total = 0
    small = 0
    count = 0
    for term in terms:
        count += 1
        total = total + term
        if abs(term) < ctrl.abs_tol:
            small += 1
            if small >= ctrl.tail_window:
                return total
        else:
            small = 0
        if count >= ctrl.max_terms:
            raise ConvergenceError("series did not settle within max_terms")
    return total


def euler_inverse_series(t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """sum_k t^k / (q; q)_k, which equals 1 / (t; q)_infinity for |t| < 1."""
    ctrl.require_q(q)
    t = _numeric(t)
    q = _numeric(q)

    def terms():
        term = _one_like(t, q)
        k = 0
        while True:
            yield term
            k += 1
            term = term * t / (1 - q**k)

    return sum_series(terms(), ctrl)


def euler_series(t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """sum_k (-1)^k q^{k(k-1)/2} t^k / (q; q)_k, equal to (t; q)_infinity."""
    ctrl.require_q(q)
    t = _numeric(t)
    q = _numeric(q)

    def terms():
        term = _one_like(t, q)
        k = 0
        while True:
            yield term
            k += 1
            # ratio of consecutive terms: -t q^{k-1} / (1 - q^k)
            term = term * (-t) * q ** (k - 1) / (1 - q**k)

    return sum_series(terms(), ctrl)


# ---------------------------------------------------------------------------
# basic hypergeometric series
# ---------------------------------------------------------------------------

def _as_qpower_degree(a, q, rel_tol=1e-12):
    """If a == q^{-m} for an integer m >= 0, return m, else None."""
    if a == 1:
        return 0
    if q == 0 or abs(q) >= 1:
        return None
    try:
        target = math.log(abs(a)) / math.log(abs(q))
    except ValueError:
        return None
    m = round(-target)
    if m < 0:
        return None
    qa = _numeric(q) ** (-m)
    if abs(_numeric(a) - qa) <= rel_tol * max(1.0, abs(qa)):
        return m
    return None


def basic_hyper(uppers, lowers, q, z, ctrl: SeriesControl = DEFAULT_CTRL):
    """The basic hypergeometric sum with j upper and k lower symbols:

    sum_n  (uppers; q)_n / ((q; q)_n (lowers; q)_n)
           * ((-1)^n q^{n(n-1)/2})^{1 + k - j} * z^n

    Terminates when an upper symbol is an exact negative q-power; otherwise
    truncates per ctrl.  A lower symbol hitting a pole raises DomainError.
    """
    uppers = [_numeric(a) for a in uppers]
    lowers = [_numeric(b) for b in lowers]
    q = _numeric(q)
    z = _numeric(z)
    excess = 1 + len(lowers) - len(uppers)

    stop = None
    for a in uppers:
        m = _as_qpower_degree(a, q)
        if m is not None:
            stop = m if stop is None else min(stop, m)

    total = 0.0
    term = _one_like(q, z, *uppers, *lowers)
    n = 0
    small = 0
    while True:
        total = total + term
        if stop is not None and n >= stop:
            return total
        if stop is None:
            if abs(term) < ctrl.abs_tol:
                small += 1
                if small >= ctrl.tail_window:
                    return total
            else:
                small = 0
        if n + 1 >= ctrl.max_terms:
            raise ConvergenceError("basic_hyper did not settle")
        qn = q**n
        ratio = z
        for a in uppers:
            ratio = ratio * (1 - a * qn)
        den = 1 - q ** (n + 1)
        for b in lowers:
            fac = 1 - b * qn
            if fac == 0:
                raise DomainError("basic_hyper lower symbol hit a pole")
            den = den * fac
        ratio = ratio / den
        if excess:
            ratio = ratio * ((-1) * qn) ** excess
        term = term * ratio
        n += 1


def very_well_poised(a, others, q, z, ctrl: SeriesControl = DEFAULT_CTRL):
    """The very-well-poised assembly 2mW2m-1(a; a1..a_{2m-3}; q, z).

    Built as basic_hyper with uppers [a, q sqrt(a), -q sqrt(a), a1, ...] and
    lowers [sqrt(a), -sqrt(a), q a / a1, ...].
    """
    import cmath

    a = _numeric(a)
    ra = cmath.sqrt(a) if (isinstance(a, complex) or a < 0) else math.sqrt(a)
    uppers = [a, q * ra, -q * ra] + list(others)
    lowers = [ra, -ra] + [q * a / ai for ai in others]
    return basic_hyper(uppers, lowers, q, z, ctrl)


# ---------------------------------------------------------------------------
# exact univariate polynomials (dense, constant coefficient first)
# ---------------------------------------------------------------------------

class Poly:
    """Exact dense polynomial in one variable.

    Coefficients may be int, Fraction, float, or complex; arithmetic never
    normalizes types, so rational inputs stay rational.  Used to run the
    three-term recurrences symbolically and to compare identities
    coefficient by coefficient.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @staticmethod
    def x():
        return Poly((0, 1))

    @staticmethod
    def const(v):
        return Poly((v,))

    @property
    def degree(self):
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        n = max(len(self.c), len(other.c))
        a = list(self.c) + [0] * (n - len(self.c))
        for i, v in enumerate(other.c):
            a[i] = a[i] + v
        return Poly(a)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-v for v in self.c))

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly.const(-other))

    def __rsub__(self, other):
        return Poly.const(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(tuple(v * other for v in self.c))
        if not self.c or not other.c:
            return Poly()
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, u in enumerate(self.c):
            if u == 0:
                continue
            for j, v in enumerate(other.c):
                out[i + j] = out[i + j] + u * v
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Poly):
            raise TypeError("Poly division only by scalars")
        if isinstance(scalar, int):
            scalar = Fraction(scalar)
        return Poly(tuple(v / scalar for v in self.c))

    def __pow__(self, n: int):
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x):
        out = 0
        for v in reversed(self.c):
            out = out * x + v
        return out

    def max_abs_coeff(self):
        return max((abs(v) for v in self.c), default=0)

    def __repr__(self):
        return f"Poly({list(self.c)!r})"
