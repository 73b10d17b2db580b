"""Orthogonalizing measures: densities, atoms, quadrature, and CDF tools.

Each measure is wrapped in a :class:`DensitySpec` carrying the support, a
vectorized pdf, any atomic part, the nominal total mass, and the associated
polynomial family together with its printed diagonal (squared norm).  The
generic checks (total mass, orthogonality defect, CDF inversion) all work
off that one structure.

Compact-support measures live on [-1, 1]; the probabilistic rescalings live
on S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)], which degenerates to the real line as
q -> 1 (handled via a 9-sigma Gaussian window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import recurrences as rec
from .qcore import (
    DomainError,
    conj_pair_factor,
    cross_pair_factor,
    double_angle_factor,
    q_factorial,
    q_pochhammer,
    q_pochhammer_inf,
)

TAIL_EPS = 1e-17
MAX_PRODUCT_TERMS = 20000
GAUSS_WINDOW = 9.0


def _tail_stop(q):
    # product terms drift from 1 by O(t/(1-|q|)); stop once that is negligible
    return TAIL_EPS * max(1e-3, 1.0 - abs(q))


def _check_q(q):
    if not -1 < q < 1:
        raise DomainError("density needs -1 < q < 1 here")


def qh_weight(x, q):
    """Continuous q-Hermite density on [-1, 1]."""
    _check_q(q)
    x = np.asarray(x, dtype=float)
    out = 2.0 * q_pochhammer_inf(q, q) / math.pi * np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    t, k, stop = q, 1, _tail_stop(q)
    while abs(t) > stop:
        out = out * double_angle_factor(x, t)
        t *= q
        k += 1
        if k > MAX_PRODUCT_TERMS:
            raise DomainError("density product did not converge")
    return out


def h_factor(x, a, q):
    """1 / prod_k (1 - 2 a q^k x + a^2 q^{2k}), the one-parameter tilt."""
    _check_q(q)
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    t, k, stop = a, 0, _tail_stop(q)
    while abs(t) > stop:
        out = out * conj_pair_factor(x, t)
        t *= q
        k += 1
        if k > MAX_PRODUCT_TERMS:
            raise DomainError("density product did not converge")
    return 1.0 / out


def pair_product_w(x, y, rho, q):
    """prod_k w(x s, y s | rho q^k) with s = sqrt(1-q)/2; the denominator of
    the conditional density on S(q)."""
    _check_q(q)
    s = math.sqrt(1.0 - q) / 2.0
    u = np.asarray(x, dtype=float) * s
    v = np.asarray(y, dtype=float) * s
    out = np.ones(np.broadcast(u, v).shape)
    t, k, stop = rho, 0, _tail_stop(q)
    while abs(t) > stop:
        out = out * cross_pair_factor(u, v, t)
        t *= q
        k += 1
        if k > MAX_PRODUCT_TERMS:
            raise DomainError("density product did not converge")
    return out


def support_halfwidth(q):
    """Half-width of S(q)."""
    if q == 1:
        return math.inf
    return 2.0 / math.sqrt(1.0 - q)


def qn_weight(x, q):
    """q-Normal density: the rescaled q-Hermite weight, Gaussian at q = 1."""
    x = np.asarray(x, dtype=float)
    if q == 1:
        return np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
    s = math.sqrt(1.0 - q) / 2.0
    out = np.zeros_like(x)
    inside = np.abs(x) < support_halfwidth(q)
    xi = np.where(inside, x, 0.0)
    out[...] = np.where(inside, s * qh_weight(xi * s, q), 0.0)
    return out


def cqn_weight(x, y, rho, q):
    """Conditional q-Normal density in x given the neighbour value y."""
    if q == 1:
        x = np.asarray(x, dtype=float)
        var = 1.0 - rho * rho
        return np.exp(-((x - rho * y) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return qn_weight(x, q) * q_pochhammer_inf(rho * rho, q) / pair_product_w(x, y, rho, q)


# ---------------------------------------------------------------------------
# atoms
# ---------------------------------------------------------------------------

def atom_points(a, q):
    """Locations (a q^k + a^{-1} q^{-k})/2 for every k with a q^k > 1."""
    pts, k = [], 0
    while a * q**k > 1:
        pts.append((a * q**k + q ** (-k) / a) / 2.0)
        k += 1
    return pts


def bigqh_atoms(a, q):
    if abs(a) <= 1:
        return ()
    if a < 0 or not 0 < q < 1:
        raise DomainError("atomic part needs a > 1 and 0 < q < 1")
    cinf = q_pochhammer_inf(a ** (-2), q)
    out = []
    for k, x in enumerate(atom_points(a, q)):
        w = (
            (1 - a * a * q ** (2 * k))
            * cinf
            * q_pochhammer(a * a, q, k)
            / ((1 - a * a) * q_pochhammer(q, q, k))
            * q ** (-(3 * k * k + k) // 2)
            * (-1.0 / a**4) ** k
        )
        out.append((x, w))
    return tuple(out)


def asc_atoms(a, b, q):
    """Atomic part of the ASC measure when a > 1 > |b| (b nonzero)."""
    if abs(a) <= 1:
        return ()
    if a < 0 or not 0 < q < 1:
        raise DomainError("atomic part needs a > 1 and 0 < q < 1")
    if b == 0:
        return bigqh_atoms(a, q)
    if abs(b) >= 1:
        raise DomainError("at most one parameter may exceed 1 in modulus")
    cinf = q_pochhammer_inf(a ** (-2), q) / q_pochhammer_inf(b / a, q)
    out = []
    for k, x in enumerate(atom_points(a, q)):
        w = (
            cinf
            * (1 - a * a * q ** (2 * k))
            * q_pochhammer(a * a, q, k)
            * q_pochhammer(a * b, q, k)
            / ((1 - a * a) * q_pochhammer(q, q, k) * q_pochhammer(a * q / b, q, k))
            * q ** (-k * k)
            * (1.0 / (a**3 * b)) ** k
        )
        out.append((x, w))
    return tuple(out)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

_GL_CACHE = {}


def gl_nodes(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def integrate(f, lo, hi, n=200):
    t, w = gl_nodes(n)
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    return half * float(w @ np.asarray(f(mid + half * t), dtype=float))


def integrate_with_error(f, lo, hi, n=200):
    """Value at 2n nodes plus the difference from the n-node value."""
    v1 = integrate(f, lo, hi, n)
    v2 = integrate(f, lo, hi, 2 * n)
    return v2, abs(v2 - v1)


def chebyshev_nodes(n):
    """Second-kind Gauss-Chebyshev rule for int_{-1}^{1} g(x) sqrt(1-x^2) dx."""
    i = np.arange(1, n + 1)
    th = i * math.pi / (n + 1)
    return np.cos(th), math.pi / (n + 1) * np.sin(th) ** 2


# ---------------------------------------------------------------------------
# the measure wrapper
# ---------------------------------------------------------------------------

@dataclass
class DensitySpec:
    """A measure: vectorized pdf on (lo, hi), optional atoms, family link."""

    name: str
    params: tuple
    support: tuple
    pdf: object
    total_mass: float = 1.0
    atoms: tuple = ()
    family: str = ""
    family_params: tuple = ()
    norm: object = None
    sqrt_endpoints: bool = True
    _cdf_cache: object = field(default=None, repr=False, compare=False)

    def quad_rule(self, n_quad=200):
        """Nodes and weights adapted to the support; a cosine substitution
        absorbs the square-root vanishing at compact endpoints."""
        lo, hi = self.support
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        t, w = gl_nodes(n_quad)
        if not self.sqrt_endpoints:
            return mid + half * t, half * w
        th = math.pi / 2.0 * (t + 1.0)
        return mid + half * np.cos(th), half * math.pi / 2.0 * np.sin(th) * w

    def poly(self, n, x):
        if not self.family:
            raise DomainError(f"{self.name} has no associated family")
        return rec.eval_poly(self.family, n, x, self.family_params)

    def poly_seq(self, n, x):
        if not self.family:
            raise DomainError(f"{self.name} has no associated family")
        return rec.eval_seq(self.family, n, x, self.family_params)

    def expect(self, g, n_quad=200):
        """Integral of g against the measure, atoms included."""
        xs, ws = self.quad_rule(n_quad)
        tot = float(ws @ (np.asarray(g(xs), float) * self.pdf(xs)))
        for x, w in self.atoms:
            tot += w * float(g(np.asarray(x)))
        return tot

    def mass_defect(self, n_quad=200):
        return abs(self.expect(lambda x: np.ones_like(np.asarray(x, float)), n_quad) - self.total_mass)

    def moment_matrix(self, nmax, n_quad=200):
        """M[i, j] = integral of p_i p_j against the measure."""
        xs, ws = self.quad_rule(n_quad)
        P = np.vstack([np.broadcast_to(np.asarray(p, float), xs.shape) for p in self.poly_seq(nmax, xs)])
        fw = ws * self.pdf(xs)
        M = (P * fw) @ P.T
        for x, wt in self.atoms:
            v = np.array([float(p) for p in self.poly_seq(nmax, x)])
            M += wt * np.outer(v, v)
        return M

    def orthogonality_defect(self, nmax, n_quad=200):
        """Largest deviation of the moment matrix from the printed diagonal,
        relative to the printed diagonal scale."""
        M = self.moment_matrix(nmax, n_quad)
        D = np.array([float(self.norm(n)) for n in range(nmax + 1)])
        scale = np.sqrt(np.abs(np.outer(D, D)))
        return float(np.max(np.abs(M - np.diag(D)) / scale))

    # -- CDF machinery (continuous probability densities only) --------------

    def _table(self):
        if self._cdf_cache is None:
            if self.atoms or abs(self.total_mass - 1.0) > 1e-9:
                raise DomainError(f"{self.name}: CDF needs an atomless probability density")
            self._cdf_cache = _CdfTable(self)
        return self._cdf_cache

    def cdf(self, x):
        return self._table().cdf(x)

    def inverse_cdf(self, u):
        return self._table().ppf(u)


class _CdfTable:
    """512-breakpoint cumulative table with local Gauss refinement; the
    inverse bisects to 1e-10."""

    N_BREAK = 512
    N_SUB = 16
    XTOL = 1e-10

    def __init__(self, spec):
        lo, hi = spec.support
        self.spec = spec
        self.xs = np.linspace(lo, hi, self.N_BREAK + 1)
        t, w = gl_nodes(self.N_SUB)
        mids = (self.xs[1:] + self.xs[:-1]) / 2.0
        halves = (self.xs[1:] - self.xs[:-1]) / 2.0
        nodes = mids[:, None] + halves[:, None] * t[None, :]
        vals = np.asarray(spec.pdf(nodes.ravel()), float).reshape(nodes.shape)
        incr = halves * (vals @ w)
        self.cum = np.concatenate([[0.0], np.cumsum(incr)])
        self.total = self.cum[-1]
        self._t, self._w = t, w

    def cdf(self, x):
        x = float(x)
        lo, hi = self.xs[0], self.xs[-1]
        if x <= lo:
            return 0.0
        if x >= hi:
            return self.total
        i = int(np.searchsorted(self.xs, x) - 1)
        a = self.xs[i]
        mid, half = (a + x) / 2.0, (x - a) / 2.0
        part = half * float(self._w @ np.asarray(self.spec.pdf(mid + half * self._t), float))
        return self.cum[i] + part

    def ppf(self, u):
        u = float(u)
        if not 0.0 < u < 1.0:
            raise DomainError("inverse CDF needs u strictly inside (0, 1)")
        target = u * self.total
        i = int(np.clip(np.searchsorted(self.cum, target) - 1, 0, self.N_BREAK - 1))
        lo, hi = self.xs[i], self.xs[i + 1]
        flo = self.cum[i]
        # bisection; the bracket is one breakpoint cell
        while hi - lo > self.XTOL:
            mid = (lo + hi) / 2.0
            if self.cdf(mid) < target:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2.0


# ---------------------------------------------------------------------------
# measure constructors
# ---------------------------------------------------------------------------

def density_qh(q):
    return DensitySpec(
        name="qHermite",
        params=(q,),
        support=(-1.0, 1.0),
        pdf=lambda x: qh_weight(x, q),
        family="qHermite_h",
        family_params=(q,),
        norm=lambda n: q_pochhammer(q, q, n),
    )


def density_bigqh(a, q):
    atoms = bigqh_atoms(a, q) if abs(a) > 1 else ()
    return DensitySpec(
        name="bigqHermite",
        params=(a, q),
        support=(-1.0, 1.0),
        pdf=lambda x: qh_weight(x, q) * h_factor(x, a, q),
        atoms=atoms,
        family="BigQHermite",
        family_params=(a, q),
        norm=lambda n: q_pochhammer(q, q, n),
    )


def density_ultra(beta, q):
    """Rogers (continuous q-ultraspherical) measure on [-1, 1].

    The printed weight integrates to 1/(1-beta), matching the printed
    diagonal at n = 0; kept that way, with total_mass recording it.
    """
    _check_q(q)
    if not abs(beta) < 1:
        raise DomainError("needs |beta| < 1")
    const = q_pochhammer_inf(beta * beta, q) / (
        (1 - beta) * q_pochhammer_inf(beta, q) * q_pochhammer_inf(beta * q, q)
    )

    def pdf(x):
        x = np.asarray(x, dtype=float)
        out = const * qh_weight(x, q)
        t, k, stop = beta, 0, _tail_stop(q)
        while abs(t) > stop:
            out = out / double_angle_factor(x, t)
            t *= q
            k += 1
            if k > MAX_PRODUCT_TERMS:
                raise DomainError("density product did not converge")
        return out

    return DensitySpec(
        name="ultraspherical",
        params=(beta, q),
        support=(-1.0, 1.0),
        pdf=pdf,
        total_mass=1.0 / (1.0 - beta),
        family="Ultraspherical_C",
        family_params=(beta, q),
        norm=lambda n: q_pochhammer(beta * beta, q, n)
        / ((1 - beta * q**n) * q_pochhammer(q, q, n)),
    )


def density_asc(a, b, q):
    if abs(a) > 1 or abs(b) > 1:
        if abs(b) > 1:
            a, b = b, a
        atoms = asc_atoms(a, b, q)
    else:
        atoms = ()
    return DensitySpec(
        name="alsalamchihara",
        params=(a, b, q),
        support=(-1.0, 1.0),
        pdf=lambda x: q_pochhammer_inf(a * b, q)
        * qh_weight(x, q)
        * h_factor(x, a, q)
        * h_factor(x, b, q),
        atoms=atoms,
        family="ASC_Q",
        family_params=(a, b, q),
        norm=lambda n: q_pochhammer(q, q, n) * q_pochhammer(a * b, q, n),
    )


def density_cdh(a, b, c, q):
    if max(abs(a), abs(b), abs(c)) >= 1:
        raise DomainError("continuous case needs all three parameters inside (-1, 1)")
    const = (
        q_pochhammer_inf(a * b, q)
        * q_pochhammer_inf(a * c, q)
        * q_pochhammer_inf(b * c, q)
    )

    def norm(n):
        out = q_pochhammer(q, q, n)
        for u in (a * b, a * c, b * c):
            out *= q_pochhammer(u, q, n)
        return out

    return DensitySpec(
        name="contdualhahn",
        params=(a, b, c, q),
        support=(-1.0, 1.0),
        pdf=lambda x: const
        * qh_weight(x, q)
        * h_factor(x, a, q)
        * h_factor(x, b, q)
        * h_factor(x, c, q),
        family="CDH_psi",
        family_params=(a, b, c, q),
        norm=norm,
    )


def density_aw(a, b, c, d, q):
    if max(abs(a), abs(b), abs(c), abs(d)) >= 1:
        raise DomainError("continuous case needs all four parameters inside (-1, 1)")
    pairs = [a * b, a * c, a * d, b * c, b * d, c * d]
    const = 1.0
    for u in pairs:
        const *= q_pochhammer_inf(u, q)
    const /= q_pochhammer_inf(a * b * c * d, q)

    def norm(n):
        return rec.norm_squared("AW_alpha", n, (a, b, c, d, q))

    return DensitySpec(
        name="askeywilson",
        params=(a, b, c, d, q),
        support=(-1.0, 1.0),
        pdf=lambda x: const
        * qh_weight(x, q)
        * h_factor(x, a, q)
        * h_factor(x, b, q)
        * h_factor(x, c, q)
        * h_factor(x, d, q),
        family="AW_alpha",
        family_params=(a, b, c, d, q),
        norm=norm,
    )


def density_qn(q):
    """q-Normal probability measure on S(q) (standard normal at q = 1)."""
    if q == 1:
        sup = (-GAUSS_WINDOW, GAUSS_WINDOW)
    else:
        _check_q(q)
        h = support_halfwidth(q)
        sup = (-h, h)
    return DensitySpec(
        name="qnormal",
        params=(q,),
        support=sup,
        pdf=lambda x: qn_weight(x, q),
        family="Rescaled_H",
        family_params=(q,),
        norm=lambda n: q_factorial(n, q),
        sqrt_endpoints=q != 1,
    )


def density_cqn(y, rho, q):
    """Conditional q-Normal in x given neighbour value y at correlation rho."""
    if not abs(rho) < 1:
        raise DomainError("needs |rho| < 1")
    if q == 1:
        sd = math.sqrt(1.0 - rho * rho)
        sup = (rho * y - GAUSS_WINDOW * sd, rho * y + GAUSS_WINDOW * sd)
    else:
        _check_q(q)
        h = support_halfwidth(q)
        if abs(y) > h:
            raise DomainError("conditioning value outside S(q)")
        sup = (-h, h)
    return DensitySpec(
        name="condqnormal",
        params=(y, rho, q),
        support=sup,
        pdf=lambda x: cqn_weight(x, y, rho, q),
        family="Rescaled_P",
        family_params=(y, rho, q),
        norm=lambda n: q_factorial(n, q) * q_pochhammer(rho * rho, q, n),
        sqrt_endpoints=q != 1,
    )


def density_rogers(beta, q):
    """Rescaled Rogers measure on S(q), normalized to a probability.

    The printed rescaling of the compact-support weight keeps its total mass
    1/(1-beta); the extra (1-beta) here makes the one-dimensional marginal of
    the three-variate construction an honest probability density.  The
    diagonal picks up the same factor.
    """
    _check_q(q)
    if not abs(beta) < 1:
        raise DomainError("needs |beta| < 1")
    base = density_ultra(beta, q)
    s = math.sqrt(1.0 - q) / 2.0
    h = support_halfwidth(q)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < h
        xi = np.where(inside, x, 0.0)
        return np.where(inside, (1.0 - beta) * s * base.pdf(xi * s), 0.0)

    def norm(n):
        return (
            (1.0 - beta)
            * q_factorial(n, q)
            * q_pochhammer(beta * beta, q, n)
            / (1.0 - beta * q**n)
        )

    return DensitySpec(
        name="rogersrescaled",
        params=(beta, q),
        support=(-h, h),
        pdf=pdf,
        family="Rescaled_R",
        family_params=(beta, q),
        norm=norm,
    )


def density_c2n(y, rho1, z, rho2, q):
    """Conditional density in x of the middle member of the chain given both
    neighbours: f_CN(y|x,rho1) f_CN(x|z,rho2) / f_CN(y|z,rho1 rho2)."""
    _check_q(q)
    if not (abs(rho1) < 1 and abs(rho2) < 1):
        raise DomainError("needs |rho1|, |rho2| < 1")
    h = support_halfwidth(q)
    if max(abs(y), abs(z)) > h:
        raise DomainError("conditioning values outside S(q)")
    const = (
        q_pochhammer_inf(rho1 * rho1, q)
        * q_pochhammer_inf(rho2 * rho2, q)
        / q_pochhammer_inf(rho1 * rho1 * rho2 * rho2, q)
    )
    wyz = pair_product_w(y, z, rho1 * rho2, q)

    def pdf(x):
        return (
            const
            * qn_weight(x, q)
            * wyz
            / (pair_product_w(x, y, rho1, q) * pair_product_w(x, z, rho2, q))
        )

    def norm(n):
        s = math.sqrt(1.0 - q) / 2.0
        aa, bb = _conj_pair_params(rho1, y * s)
        cc, dd = _conj_pair_params(rho2, z * s)
        val = rec.norm_squared("AW_alpha", n, (aa, bb, cc, dd, q))
        return float(np.real(val)) / (1.0 - q) ** n

    return DensitySpec(
        name="cond2qnormal",
        params=(y, rho1, z, rho2, q),
        support=(-h, h),
        pdf=pdf,
        family="Rescaled_A",
        family_params=(y, rho1, z, rho2, q),
        norm=norm,
    )


def _conj_pair_params(rho, c):
    d = c * c - 1.0
    if d <= 0:
        s = math.sqrt(-d)
        return rho * complex(c, s), rho * complex(c, -s)
    r = math.sqrt(d)
    return rho * (c + r), rho * (c - r)


# ---------------------------------------------------------------------------
# the three-variate construction
# ---------------------------------------------------------------------------

@dataclass
class TriDensity:
    """Joint density on S(q)^3 built from the three pairwise conditionals."""

    rho12: float
    rho13: float
    rho23: float
    q: float

    def __post_init__(self):
        for r in (self.rho12, self.rho13, self.rho23):
            if not abs(r) < 1:
                raise DomainError("needs all |rho_ij| < 1")
        _check_q(self.q)

    @property
    def r(self):
        return self.rho12 * self.rho13 * self.rho23

    def pdf(self, x, y, z):
        return (
            (1.0 - self.r)
            * cqn_weight(x, y, self.rho12, self.q)
            * cqn_weight(y, z, self.rho23, self.q)
            * cqn_weight(z, x, self.rho13, self.q)
        )

    def marginal_1d(self):
        """Each single coordinate: the rescaled Rogers measure at beta = r."""
        return density_rogers(self.r, self.q)

    def marginal_pair_yz(self):
        """The (y, z) pair after integrating x out; depends on rho23 and
        rho12*rho13 only."""
        q = self.q
        r, r2 = self.r, self.rho12 * self.rho13
        rho23 = self.rho23
        h = support_halfwidth(q)
        c = q_pochhammer_inf(rho23 * rho23, q) * q_pochhammer_inf(r2 * r2, q)

        def pdf(y, z):
            return (
                (1.0 - r)
                * qn_weight(y, q)
                * qn_weight(z, q)
                * c
                / (pair_product_w(y, z, rho23, q) * pair_product_w(y, z, r2, q))
            )

        return pdf

    def conditional_x_given_yz(self, y, z):
        return density_c2n(y, self.rho12, z, self.rho13, self.q)
