"""Three-term recurrences for the polynomial families and their helpers.

Every family is evaluated by running its recurrence forward from the seed
pair (p_{-1}, p_0).  The recurrence step is written once per family over
generic scalars, so the same code path serves

* floats and complex numbers (numeric evaluation),
* ``fractions.Fraction`` (exact evaluation at rational arguments), and
* :class:`qaw.qcore.Poly` in the x slot (exact coefficient extraction).

Parameter vectors are flat tuples with q last, e.g. ``(a, b, q)`` for the
Al-Salam-Chihara family.  ``eval_seq`` returns the whole ladder p_0..p_n,
which the series and identity layers reuse heavily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .qcore import (
    DomainError,
    Poly,
    conj_pair_factor,
    is_exact,
    q_binomial,
    q_factorial,
    q_number,
    q_pochhammer,
)


def _comb2(n: int) -> int:
    return n * (n - 1) // 2


def _div(num, den):
    """Division that keeps int/int exact."""
    if den == 0:
        raise DomainError("recurrence coefficient pole (zero denominator)")
    if isinstance(den, int):
        if isinstance(num, int):
            return Fraction(num, den)
        if isinstance(num, (Fraction, Poly)):
            den = Fraction(den)
    return num / den


# ---------------------------------------------------------------------------
# family table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """Descriptor binding a family id to its recurrence."""

    name: str
    param_names: tuple
    support: str
    init: object  # (x, P) -> (p_{-1}, p_0)
    step: object  # (k, x, p_k, p_{k-1}, P) -> p_{k+1}
    doc: str = ""


def _init01(x, P):
    return (0, 1)


def _cdh_e(k, a, b, c, q):
    s1 = a + b + c
    s3 = a * b * c
    if k == 0:
        # the q^{k-1} factors cancel exactly at k = 0
        return s1 - s3
    return s1 * q**k + s3 * (q ** (k - 1) - q ** (2 * k - 1) - q ** (2 * k))


def _cdh_f(k, a, b, c, q):
    if k == 0:
        return 0
    qk1 = q ** (k - 1)
    return (1 - q**k) * (1 - a * b * qk1) * (1 - c * b * qk1) * (1 - a * c * qk1)


def _aw_e(k, a, b, c, d, q):
    s1 = a + b + c + d
    s3 = a * b * c + a * b * d + a * c * d + b * c * d
    p4 = a * b * c * d
    if k == 0:
        # the q^{-2} factors cancel exactly at k = 0
        return _div(s1 - s3, 1 - p4)
    num = s1 * (q**k - p4 * q ** (2 * k - 2) * (1 + q - q ** (k + 1))) + s3 * (
        q ** (k - 1) - q ** (2 * k) - q ** (2 * k - 1) + p4 * q ** (3 * k - 2)
    )
    return _div(num, (1 - p4 * q ** (2 * k - 2)) * (1 - p4 * q ** (2 * k)))


def _aw_f(k, a, b, c, d, q):
    if k == 0:
        return 0
    p4 = a * b * c * d
    qk1 = q ** (k - 1)
    pairs = (
        (1 - a * b * qk1)
        * (1 - a * c * qk1)
        * (1 - a * d * qk1)
        * (1 - b * c * qk1)
        * (1 - b * d * qk1)
        * (1 - c * d * qk1)
    )
    if k == 1:
        # (1 - abcd/q) cancels between numerator and denominator
        return _div((1 - q) * pairs, (1 - p4) ** 2 * (1 - p4 * q))
    num = (1 - q**k) * pairs * (1 - p4 * q ** (k - 2))
    den = (
        (1 - p4 * q ** (2 * k - 3))
        * (1 - p4 * q ** (2 * k - 2)) ** 2
        * (1 - p4 * q ** (2 * k - 1))
    )
    return _div(num, den)


def _psihat_step(k, x, p, pm, P):
    a, b, c, q = P
    if q == 0:
        raise DomainError("q^{-1}-type recurrence needs q != 0; q = 0 uses closed forms")
    s1 = a + b + c
    s3 = a * b * c
    if k == 0:
        return -(2 * x - (s1 - s3)) * p
    A = s1 + s3 * (q - q ** (1 - k) - q ** (-k))
    qk1 = q ** (k - 1)
    B = -(q ** (2 - 2 * k)) * (1 - q**k) * (qk1 - a * b) * (qk1 - b * c) * (qk1 - a * c)
    return -(2 * x * q**k - A) * p - B * pm


FAMILIES = {}


def _register(name, param_names, support, init, step, doc=""):
    FAMILIES[name] = Family(name, tuple(param_names), support, init, step, doc)


_register(
    "Hermite_H", (), "R", _init01,
    lambda k, x, p, pm, P: x * p - k * pm,
    "monic probabilists' Hermite",
)
_register(
    "Hermite_h", (), "R", _init01,
    lambda k, x, p, pm, P: 2 * x * p - 2 * k * pm,
    "physicists' Hermite",
)
_register(
    "Chebyshev_T", (), "[-1,1]",
    lambda x, P: (x, 1),
    lambda k, x, p, pm, P: 2 * x * p - pm,
    "first kind; the seed p_{-1} = x makes the n = 0 step give T_1 = x",
)
_register(
    "Chebyshev_U", (), "[-1,1]", _init01,
    lambda k, x, p, pm, P: 2 * x * p - pm,
    "second kind",
)
_register(
    "RogersSzego_s", ("q",), "R", _init01,
    lambda k, x, p, pm, P: (1 + x) * p - (1 - P[0] ** k) * x * pm,
)
_register(
    "qHermite_h", ("q",), "[-1,1]", _init01,
    lambda k, x, p, pm, P: 2 * x * p - (1 - P[0] ** k) * pm,
    "continuous q-Hermite",
)


def _qinvh_step(k, x, p, pm, P):
    (q,) = P
    if k == 0:
        return -2 * x * p
    return -2 * q**k * x * p + q ** (k - 1) * (1 - q**k) * pm


_register("qInvHermite_b", ("q",), "R", _init01, _qinvh_step)

_register(
    "BigQHermite", ("a", "q"), "[-1,1]", _init01,
    lambda k, x, p, pm, P: (2 * x - P[0] * P[1] ** k) * p - (1 - P[1] ** k) * pm,
)


def _bigqinvh_step(k, x, p, pm, P):
    a, q = P
    if k == 0:
        return (a - 2 * x) * p
    return (a - 2 * x * q**k) * p + q ** (k - 1) * (1 - q**k) * pm


_register("BigQInvHermite", ("a", "q"), "R", _init01, _bigqinvh_step)


def _ultra_step(k, x, p, pm, P):
    beta, q = P
    top = 2 * (1 - beta * q**k) * x * p
    if k >= 1:
        top = top - (1 - beta * beta * q ** (k - 1)) * pm
    return _div(top, 1 - q ** (k + 1))


_register("Ultraspherical_C", ("beta", "q"), "[-1,1]", _init01, _ultra_step)


def _asc_sp_step(k, x, p, pm, sq):
    s, prod, q = sq
    out = (2 * x - s * q**k) * p
    if k >= 1:
        out = out - (1 - prod * q ** (k - 1)) * (1 - q**k) * pm
    return out


def _asc_step(k, x, p, pm, P):
    a, b, q = P
    return _asc_sp_step(k, x, p, pm, (a + b, a * b, q))


_register("ASC_Q", ("a", "b", "q"), "[-1,1]", _init01, _asc_step)


def _aschat_sp_step(k, x, p, pm, sq):
    s, prod, q = sq
    out = (s - 2 * x * q**k) * p
    if k >= 1:
        out = out - (1 - q**k) * (prod - q ** (k - 1)) * pm
    return out


def _aschat_step(k, x, p, pm, P):
    a, b, q = P
    return _aschat_sp_step(k, x, p, pm, (a + b, a * b, q))


_register("ASC_Qhat", ("a", "b", "q"), "R", _init01, _aschat_step)

_register(
    "CDH_psi", ("a", "b", "c", "q"), "[-1,1]", _init01,
    lambda k, x, p, pm, P: (2 * x - _cdh_e(k, *P)) * p - _cdh_f(k, *P) * pm,
)
_register("CDH_psihat", ("a", "b", "c", "q"), "R", _init01, _psihat_step)
_register(
    "AW_alpha", ("a", "b", "c", "d", "q"), "[-1,1]", _init01,
    lambda k, x, p, pm, P: (2 * x - _aw_e(k, *P)) * p - _aw_f(k, *P) * pm,
)

_register(
    "Rescaled_H", ("q",), "S(q)", _init01,
    lambda k, x, p, pm, P: x * p - q_number(k, P[0]) * pm,
    "monic q-Hermite on the rescaled support",
)


def _resc_B_step(k, x, p, pm, P):
    (q,) = P
    if k == 0:
        return -x * p
    return -(q**k) * x * p + q ** (k - 1) * q_number(k, q) * pm


_register("Rescaled_B", ("q",), "R", _init01, _resc_B_step)


def _resc_P_step(k, x, p, pm, P):
    y, rho, q = P
    out = (x - rho * y * q**k) * p
    if k >= 1:
        out = out - (1 - rho * rho * q ** (k - 1)) * q_number(k, q) * pm
    return out


_register("Rescaled_P", ("y", "rho", "q"), "S(q)", _init01, _resc_P_step)


def _resc_R_step(k, x, p, pm, P):
    beta, q = P
    out = (1 - beta * q**k) * x * p
    if k >= 1:
        out = out - (1 - beta * beta * q ** (k - 1)) * q_number(k, q) * pm
    return out


_register("Rescaled_R", ("beta", "q"), "S(q)", _init01, _resc_R_step)


def _resc_bigH_step(k, x, p, pm, P):
    a, q = P
    return (x - _div(a * q**k, 2)) * p - q_number(k, q) * pm


_register(
    "Rescaled_bigH", ("a", "q"), "S(q)", _init01, _resc_bigH_step,
    "monic big q-Hermite on the rescaled support; a = 0 recovers Rescaled_H",
)


def _resc_bigB_step(k, x, p, pm, P):
    a, q = P
    if k == 0:
        return (_div(a, 2) - x) * p
    return (_div(a, 2) - q**k * x) * p + q ** (k - 1) * q_number(k, q) * pm


_register(
    "Rescaled_bigB", ("a", "q"), "R", _init01, _resc_bigB_step,
    "base-inverted companion of Rescaled_bigH; a = 0 recovers Rescaled_B",
)


# ---------------------------------------------------------------------------
# evaluation drivers
# ---------------------------------------------------------------------------

def family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}") from None


def eval_seq(name: str, n: int, x, params=()):
    """[p_0(x), ..., p_n(x)] for the named family."""
    if name == "Rescaled_A":
        return _rescaled_A_seq(n, x, params)
    fam = family(name)
    if len(params) != len(fam.param_names):
        raise DomainError(f"{name} takes params {fam.param_names}, got {params!r}")
    pm, p = fam.init(x, params)
    out = [p]
    for k in range(n):
        pm, p = p, fam.step(k, x, p, pm, params)
        out.append(p)
    return out


def eval_poly(name: str, n: int, x, params=()):
    """p_n(x); n = -1 returns the seed value."""
    if n == -1:
        if name == "Rescaled_A":
            return 0
        return family(name).init(x, params)[0]
    if n < -1:
        raise DomainError("eval_poly needs n >= -1")
    return eval_seq(name, n, x, params)[n]


def coeffs(name: str, n: int, params=()):
    """Coefficient tuple of p_n, constant term first, padded to length n+1.

    Exact (ints and Fractions) when all parameters are rational.
    """
    p = eval_poly(name, n, Poly.x(), params)
    if not isinstance(p, Poly):
        p = Poly.const(p)
    c = list(p.c) + [0] * max(0, n + 1 - len(p.c))
    return tuple(c)


# ASC in the (y, rho) parametrization: symbol sum 2 rho y, symbol product rho^2
def asc_yr(n: int, x, y, rho, q):
    return asc_sp_seq(n, x, 2 * rho * y, rho * rho, q)[n]


def asc_yr_seq(n: int, x, y, rho, q):
    return asc_sp_seq(n, x, 2 * rho * y, rho * rho, q)


def asc_sp(n: int, x, s, prod, q):
    return asc_sp_seq(n, x, s, prod, q)[n]


def asc_sp_seq(n: int, x, s, prod, q):
    pm, p = 0, 1
    out = [p]
    for k in range(n):
        pm, p = p, _asc_sp_step(k, x, p, pm, (s, prod, q))
        out.append(p)
    return out


def aschat_sp_seq(n: int, x, s, prod, q):
    pm, p = 0, 1
    out = [p]
    for k in range(n):
        pm, p = p, _aschat_sp_step(k, x, p, pm, (s, prod, q))
        out.append(p)
    return out


def aschat_sp(n: int, x, s, prod, q):
    return aschat_sp_seq(n, x, s, prod, q)[n]


def helper_g(n: int, x, y, rho, q):
    """Degree-n polynomial in y; the inverse-parameter companion of the
    (y, rho) ASC family.  Equals the hat-ASC value at symbol sum 2 rho y and
    symbol product rho^2, and reduces to the q^{-1}-Hermite value in x at
    rho = 0."""
    return aschat_sp(n, x, 2 * rho * y, rho * rho, q)


def helper_g_seq(n: int, x, y, rho, q):
    return aschat_sp_seq(n, x, 2 * rho * y, rho * rho, q)


# ---------------------------------------------------------------------------
# conjugate-pair parameter assembly for the rescaled top family
# ---------------------------------------------------------------------------

def _conj_pair(rho, c):
    """Parameters rho e^{+-i theta} with cos theta = c (real c)."""
    c = float(c)
    disc = c * c - 1.0
    if disc <= 0:
        s = math.sqrt(-disc)
        return rho * complex(c, s), rho * complex(c, -s)
    r = math.sqrt(disc)
    return rho * (c + r), rho * (c - r)


def _rescaled_A_seq(n: int, x, params):
    y, r1, z, r2, q = params
    q = float(q)
    if not abs(q) < 1:
        raise DomainError("Rescaled_A needs |q| < 1")
    half = math.sqrt(1 - q) / 2
    a, b = _conj_pair(float(r1), float(y) * half)
    c, d = _conj_pair(float(r2), float(z) * half)
    seq = eval_seq("AW_alpha", n, float(x) * half, (a, b, c, d, q))
    out = []
    scale = 1.0
    growth = 1.0 / math.sqrt(1.0 - q)
    for v in seq:
        out.append(v.real if isinstance(v, complex) else v)
        out[-1] *= scale
        scale *= growth
    return out


# ---------------------------------------------------------------------------
# hat transform
# ---------------------------------------------------------------------------

_HAT_PAIRS = {
    "qHermite_h": "qInvHermite_b",
    "BigQHermite": "BigQInvHermite",
    "ASC_Q": "ASC_Qhat",
    "CDH_psi": "CDH_psihat",
}


def hat_transform(base: str, n: int, x, params):
    """(-1)^n q^{n(n-1)/2} p_n(x | q -> 1/q) for the four base families.

    At q = 0 the transform is taken in the closed-form sense the hat
    families use (see ``hat_eval``).
    """
    if base not in _HAT_PAIRS:
        raise DomainError(f"no hat transform for family {base!r}")
    *rest, q = params
    if q == 0:
        return _hat_q0(base, n, x, rest)
    if q == 1:
        raise DomainError("hat transform needs q != 1")
    qinv = _div(1, q) if isinstance(q, int) else (1 / q if not is_exact(q) else Fraction(1) / q)
    sign = -1 if n % 2 else 1
    return sign * q ** _comb2(n) * eval_poly(base, n, x, (*rest, qinv))


def _hat_q0(base, n, x, rest):
    if n < 0:
        return 0
    if base == "qHermite_h":
        return {0: 1, 1: -2 * x, 2: 1}.get(n, 0)
    if base == "BigQHermite":
        (a,) = rest
        if n == 0:
            return 1
        if n == 1:
            return a - 2 * x
        return a ** (n - 2) * conj_pair_factor(x, a)
    if base == "ASC_Q":
        a, b = rest

        def dpow(m):
            if m <= 0:
                return 0
            if a == b:
                return m * a ** (m - 1)
            return _div(a**m - b**m, a - b)

        return -2 * x * dpow(n) + dpow(n - 1) + dpow(n + 1)
    if base == "CDH_psi":
        a, b, c = rest
        if n > 1:
            return 0
        sign = -1 if n % 2 else 1
        return sign * eval_poly("CDH_psi", n, x, (a, b, c, 0))
    raise DomainError(base)


def hat_eval(name: str, n: int, x, params):
    """Evaluate a hat family; q = 0 goes through the printed closed forms
    where the recurrence itself cannot (the cdH hat)."""
    *rest, q = params
    if q == 0 and name == "CDH_psihat":
        return _hat_q0("CDH_psi", n, x, rest)
    return eval_poly(name, n, x, params)


# ---------------------------------------------------------------------------
# squared-norm table (printed orthogonality constants)
# ---------------------------------------------------------------------------

def norm_squared(name: str, n: int, params):
    """The printed diagonal value of the orthogonality relation."""
    if name == "Chebyshev_U":
        return 1
    if name == "qHermite_h":
        (q,) = params
        return q_pochhammer(q, q, n)
    if name == "BigQHermite":
        a, q = params
        return q_pochhammer(q, q, n)
    if name == "Ultraspherical_C":
        beta, q = params
        return _div(
            q_pochhammer(beta * beta, q, n),
            (1 - beta * q**n) * q_pochhammer(q, q, n),
        )
    if name == "ASC_Q":
        a, b, q = params
        return q_pochhammer(q, q, n) * q_pochhammer(a * b, q, n)
    if name == "CDH_psi":
        a, b, c, q = params
        out = q_pochhammer(q, q, n)
        for u in (a * b, a * c, b * c):
            out = out * q_pochhammer(u, q, n)
        return out
    if name == "AW_alpha":
        a, b, c, d, q = params
        p4 = a * b * c * d
        out = q_pochhammer(q, q, n)
        for u in (a * b, a * c, a * d, b * c, b * d, c * d):
            out = out * q_pochhammer(u, q, n)
        if n == 0:
            return out
        # equals the exact product of the recurrence f coefficients
        return _div(out, aw_monic_factor(n, a, b, c, d, q) * q_pochhammer(p4, q, 2 * n))
    if name == "Rescaled_H":
        (q,) = params
        return q_factorial(n, q)
    if name == "Rescaled_P":
        y, rho, q = params
        return q_factorial(n, q) * q_pochhammer(rho * rho, q, n)
    raise DomainError(f"no printed norm for family {name!r}")


# ---------------------------------------------------------------------------
# helper families of the three-dimensional layer
# ---------------------------------------------------------------------------

def helper_Xi(m: int, k: int, x, y, rho, q):
    """Ratio coefficient of the shifted-index self-reproducing kernel over
    the plain kernel: finite sum over s <= k of

    (-1)^s q^{s(s-1)/2} [k s]_q rho^s H_{k-s}(y) P_{m+s}(x|y,rho,q) / (rho^2)_{m+s}.
    """
    H = eval_seq("Rescaled_H", k, y, (q,))
    P = eval_seq("Rescaled_P", m + k, x, (y, rho, q))
    rr = rho * rho
    out = 0
    for s in range(k + 1):
        sign = -1 if s % 2 else 1
        num = sign * q ** _comb2(s) * q_binomial(k, s, q) * rho**s * H[k - s] * P[m + s]
        out = out + _div(num, q_pochhammer(rr, q, m + s))
    return out


def helper_Phi(k: int, m: int, x, r, q):
    """Diagonal (y = x) case of helper_Xi, the shifted self-kernel ratio."""
    return helper_Xi(m, k, x, x, r, q)


def helper_D(n: int, x, y, r1, r2, r3, q):
    """Two-frequency mixture of the shifted-kernel ratios: equals the double
    sum over k of [n k]_q r1^{n-k} r2^k helper_Xi(n-k, k, x, y, r3, q),
    computed as the pole-free single sum over s of

    [n s]_q H_{n-s}(y) P_s(x|y,r3,q) r2^{n-s} prod_{i<s}(r1 - r2 r3 q^i)
    / (r3^2)_s.

    The r1^s (r2 r3 / r1)_s factor is kept in product form so r1 = 0 is
    admissible.
    """
    H = eval_seq("Rescaled_H", n, y, (q,))
    P = eval_seq("Rescaled_P", n, x, (y, r3, q))
    out = 0
    cross = 1
    for s in range(n + 1):
        num = q_binomial(n, s, q) * H[n - s] * P[s] * r2 ** (n - s) * cross
        out = out + _div(num, q_pochhammer(r3 * r3, q, s))
        cross = cross * (r1 - r2 * r3 * q**s)
    return out


def helper_d2(n: int, x, y, q):
    """Coefficients of the cross-factor product expansion in powers of the
    product parameter; q^{-1}-Hermite pairing with explicit q powers (q != 0).
    """
    if q == 0:
        raise DomainError("helper_d2 needs q != 0")
    bx = eval_seq("qInvHermite_b", n, x, (q,))
    by = eval_seq("qInvHermite_b", n, y, (q,))
    qn = q_pochhammer(q, q, n)
    out = 0
    for j in range(n // 2 + 1):
        expo = -_comb2(n - 2 * j) - j + _comb2(j)
        sign = -1 if j % 2 else 1
        num = sign * q**expo * qn * bx[n - 2 * j] * by[n - 2 * j]
        out = out + _div(num, q_pochhammer(q, q, j) * q_pochhammer(q, q, n - 2 * j))
    return -out if n % 2 else out


def helper_f2(n: int, x, y, q):
    """Coefficients of the reciprocal cross-factor expansion; q-Hermite
    pairing, no extra q powers."""
    hx = eval_seq("qHermite_h", n, x, (q,))
    hy = eval_seq("qHermite_h", n, y, (q,))
    qn = q_pochhammer(q, q, n)
    out = 0
    for j in range(n // 2 + 1):
        num = qn * hx[n - 2 * j] * hy[n - 2 * j]
        out = out + _div(num, q_pochhammer(q, q, j) * q_pochhammer(q, q, n - 2 * j))
    return out


def helper_eval(tag: str, indices, args):
    """Uniform entry point for the helper families.

    tag is one of HELPER_TAGS; indices is (n,) or (m, k); args are the
    remaining positional arguments of the helper.
    """
    if tag == "Helper_g":
        (n,) = indices
        return helper_g(n, *args)
    if tag == "Helper_D":
        (n,) = indices
        return helper_D(n, *args)
    if tag == "Helper_Xi":
        m, k = indices
        return helper_Xi(m, k, *args)
    if tag == "Helper_Phi":
        k, m = indices
        return helper_Phi(k, m, *args)
    if tag == "Helper_d2":
        (n,) = indices
        return helper_d2(n, *args)
    if tag == "Helper_f2":
        (n,) = indices
        return helper_f2(n, *args)
    raise DomainError(f"unknown helper {tag!r}")


# conversion between the unit-leading and monic-style top-family scalings
def aw_monic_factor(n: int, a, b, c, d, q):
    """Multiplier relating the two standard top-family normalizations:
    (abcd q^{n-1}; q)_n, equal to 1 at n = 0."""
    if n == 0:
        return 1
    return q_pochhammer(a * b * c * d * q ** (n - 1), q, n)


ALL_FAMILY_NAMES = tuple(FAMILIES) + ("Rescaled_A",)

HELPER_TAGS = ("Helper_g", "Helper_D", "Helper_Xi", "Helper_Phi", "Helper_d2", "Helper_f2")
