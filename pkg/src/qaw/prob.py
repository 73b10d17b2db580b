"""Markov dynamics of the stationary q-Normal law.

Three regimes share this module.  For -1 < q < 1 the chain lives on the
compact interval S(q) with the q-Normal marginal and the one-step
conditional density as transition kernel; sampling is inverse-CDF driven by
a counter-based generator so every path matrix is reproducible from its
recorded 64-bit seed.  At q = 1 everything collapses to the classical
Gaussian autoregression.  Above q = 1 the transition degenerates to a
finitely supported law handled exactly through its Jacobi matrix.

The checking half of the module compares quadrature moments of the two- and
three-variate constructions against their closed forms, and runs binned
z-score tests on the martingale structure of the rescaled chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import densities as de
from . import recurrences as rec
from .qcore import DomainError, q_binomial, q_pochhammer, q_pochhammer_inf

__all__ = [
    "ChainSpec",
    "SamplePath",
    "DiscreteConditional",
    "sample_marginal",
    "sample_chain",
    "chapman_kolmogorov_check",
    "conditional_moment_checks",
    "cond_mean_y",
    "cond_mean_y2",
    "cond_mean_x_pair",
    "cond_mean_xy",
    "cond_hermite_mean",
    "aw_conditional_defect",
    "discrete_conditional",
    "discrete_two_step_check",
    "martingale_check",
]

_SEED_MASK = (1 << 64) - 1
_BLOCK = 1 << 14
_U_EPS = 1e-13


def _check_chain_q(q):
    if not -1 < q <= 1:
        raise DomainError("continuous chain needs -1 < q <= 1")


# ---------------------------------------------------------------------------
# inverse-CDF tables
# ---------------------------------------------------------------------------

class _MarginalTable:
    """Quantile table of the stationary law with a vectorized inverse.

    A cosine-clustered abscissa grid absorbs the square-root vanishing of
    the density at the endpoints of S(q); the cumulative sums are
    renormalized so the inverse maps (0, 1) onto the open support.
    """

    NX = 8193

    def __init__(self, q):
        spec = de.density_qn(q)
        lo, hi = spec.support
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        th = np.linspace(0.0, math.pi, self.NX)
        xs = mid - half * np.cos(th)
        pdf = np.asarray(spec.pdf(xs), float)
        cum = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2.0 * np.diff(xs))])
        cum /= cum[-1]
        self.xs, self.cum = xs, cum

    def ppf(self, u):
        return np.interp(u, self.cum, self.xs)


class _CondTable:
    """Quantile surface of the one-step conditional law.

    Rows index the conditioning value on an even grid over S(q), columns a
    uniform quantile grid; draws blend bilinearly between the four nearest
    table corners.  Only used for -1 < q < 1; the q = 1 transition is an
    affine map of a standard normal draw and skips the table entirely.
    """

    NY = 513
    NX = 2049
    NU = 1025

    def __init__(self, rho, q):
        h = de.support_halfwidth(q)
        ys = np.linspace(-h, h, self.NY)
        th = np.linspace(0.0, math.pi, self.NX)
        xs = -h * np.cos(th)
        qn = np.asarray(de.qn_weight(xs, q), float)
        # shared q-Normal factor lifted out of the row loop
        pdf = qn[None, :] * (
            q_pochhammer_inf(rho * rho, q) / de.pair_product_w(xs[None, :], ys[:, None], rho, q)
        )
        incr = (pdf[:, 1:] + pdf[:, :-1]) / 2.0 * np.diff(xs)[None, :]
        cum = np.concatenate([np.zeros((self.NY, 1)), np.cumsum(incr, axis=1)], axis=1)
        cum /= cum[:, -1:]
        us = np.linspace(0.0, 1.0, self.NU)
        table = np.empty((self.NY, self.NU))
        for j in range(self.NY):
            table[j] = np.interp(us, cum[j], xs)
        self.h, self.ys, self.table = h, ys, table

    def draw(self, y, u):
        ny, nu = self.table.shape
        ty = (np.clip(y, -self.h, self.h) + self.h) / (2.0 * self.h) * (ny - 1)
        j = np.clip(ty.astype(int), 0, ny - 2)
        ly = ty - j
        tu = np.clip(u, 0.0, 1.0) * (nu - 1)
        k = np.clip(tu.astype(int), 0, nu - 2)
        lu = tu - k
        a = self.table[j, k] * (1.0 - lu) + self.table[j, k + 1] * lu
        b = self.table[j + 1, k] * (1.0 - lu) + self.table[j + 1, k + 1] * lu
        return a * (1.0 - ly) + b * ly


_MARG_CACHE: dict = {}
_COND_CACHE: dict = {}


def _marginal_table(q):
    key = round(float(q), 14)
    if key not in _MARG_CACHE:
        _MARG_CACHE[key] = _MarginalTable(q)
    return _MARG_CACHE[key]


def _cond_table(rho, q):
    key = (round(float(rho), 14), round(float(q), 14))
    if key not in _COND_CACHE:
        _COND_CACHE[key] = _CondTable(rho, q)
    return _COND_CACHE[key]


def _cond_draw(y, rho, q, u):
    if q == 1:
        return rho * y + math.sqrt(1.0 - rho * rho) * _marginal_table(1).ppf(u)
    return _cond_table(rho, q).draw(y, u)


def _block_generator(seed, block):
    # one Philox stream per path block, derived by counter jumps so the
    # assembly order never depends on how many blocks run
    return np.random.Generator(np.random.Philox(key=seed & _SEED_MASK).jumped(block))


# ---------------------------------------------------------------------------
# chain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainSpec:
    """Stationary chain description: marginal parameter, per-step
    correlations, chain length, path count, and the sampling seed."""

    q: float
    correlations: tuple
    length: int
    seed: int
    paths: int = 10000

    def __post_init__(self):
        _check_chain_q(self.q)
        if self.length < 2:
            raise DomainError("chain needs length >= 2")
        rhos = tuple(float(r) for r in np.atleast_1d(np.asarray(self.correlations, float)))
        if len(rhos) == 1:
            rhos = rhos * (self.length - 1)
        if len(rhos) != self.length - 1:
            raise DomainError(
                f"chain of length {self.length} needs {self.length - 1} correlations, got {len(rhos)}"
            )
        for r in rhos:
            if not 0 < abs(r) < 1:
                raise DomainError("step correlations must satisfy 0 < |rho| < 1")
        object.__setattr__(self, "correlations", rhos)
        if self.paths < 1:
            raise DomainError("needs paths >= 1")
        object.__setattr__(self, "seed", int(self.seed) & _SEED_MASK)


@dataclass(frozen=True)
class SamplePath:
    """Path matrix (one row per path) plus the seed that regenerates it."""

    values: np.ndarray
    seed: int
    q: float

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.ndim != 2:
            raise DomainError("path matrix must be two dimensional")
        h = de.support_halfwidth(self.q)
        if np.max(np.abs(v)) > h:
            raise DomainError("sampled values left the support")
        object.__setattr__(self, "values", v)

    @property
    def n_paths(self):
        return self.values.shape[0]

    @property
    def length(self):
        return self.values.shape[1]

    def to_csv(self, target):
        """One row per path; header names the steps, seed rides a comment."""
        lines = ["# seed=%d" % self.seed]
        lines.append(",".join("step_%d" % (k + 1) for k in range(self.length)))
        for row in self.values:
            lines.append(",".join(format(v, ".17g") for v in row))
        text = "\n".join(lines) + "\n"
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w") as fh:
                fh.write(text)
        return text


def _uniform_block(gen, shape):
    u = gen.random(shape)
    return np.clip(u, _U_EPS, 1.0 - _U_EPS)


def sample_marginal(q, n, seed):
    """n independent draws of the stationary law, as an (n, 1) path matrix."""
    _check_chain_q(q)
    if n < 1:
        raise DomainError("needs n >= 1")
    seed = int(seed) & _SEED_MASK
    table = _marginal_table(q)
    out = np.empty((n, 1))
    for block, start in enumerate(range(0, n, _BLOCK)):
        stop = min(start + _BLOCK, n)
        u = _uniform_block(_block_generator(seed, block), stop - start)
        out[start:stop, 0] = table.ppf(u)
    return SamplePath(out, seed, q)


def sample_chain(spec: ChainSpec, paths=None):
    """Sample the chain described by spec: the first column is a stationary
    draw, each later column a conditional draw at that step's correlation."""
    n = spec.paths if paths is None else int(paths)
    if n < 1:
        raise DomainError("needs paths >= 1")
    length = spec.length
    table = _marginal_table(spec.q)
    out = np.empty((n, length))
    for block, start in enumerate(range(0, n, _BLOCK)):
        stop = min(start + _BLOCK, n)
        u = _uniform_block(_block_generator(spec.seed, block), (stop - start, length))
        x = table.ppf(u[:, 0])
        out[start:stop, 0] = x
        for k, rho in enumerate(spec.correlations):
            x = _cond_draw(x, rho, spec.q, u[:, k + 1])
            out[start:stop, k + 1] = x
    return SamplePath(out, spec.seed, spec.q)


# ---------------------------------------------------------------------------
# transition composition
# ---------------------------------------------------------------------------

def chapman_kolmogorov_check(rho1, rho2, q, grid=8, n_quad=200):
    """Largest residual of the two-step transition density against the
    one-step density at the product correlation, over a grid x grid lattice
    of (start, end) points inside the support.

    The composed correlation keeps the density's conditioning orientation:
    integrating out the middle state of f(z|y, rho1) f(y|x, rho2) lands on
    f(z|x, rho1 rho2), a probability density in the end state z.
    """
    _check_chain_q(q)
    for r in (rho1, rho2):
        if not abs(r) < 1:
            raise DomainError("needs |rho| < 1")
    spec = de.density_qn(q)
    ys, ws = spec.quad_rule(n_quad)
    lo, hi = spec.support
    pts = np.linspace(0.9 * lo, 0.9 * hi, grid)
    A = de.cqn_weight(pts[:, None], ys[None, :], rho1, q)  # f(z_i | y_k)
    B = de.cqn_weight(ys[:, None], pts[None, :], rho2, q)  # f(y_k | x_j)
    composed = A @ (ws[:, None] * B)
    direct = de.cqn_weight(pts[:, None], pts[None, :], rho1 * rho2, q)
    return float(np.max(np.abs(composed - direct)))


# ---------------------------------------------------------------------------
# closed conditional moments of the three-variate construction
# ---------------------------------------------------------------------------

def _check_triple(r12, r13, r23, q):
    if not -1 < q <= 1:
        raise DomainError("needs -1 < q <= 1")
    if not (abs(r12) < 1 and abs(r13) < 1 and abs(r23) < 1):
        raise DomainError("needs |rho| < 1 throughout")
    if 1 + 2 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23 <= 0:
        raise DomainError("correlation triple is not admissible")


def cond_mean_y(z, r12, r13, r23, q=None):
    """E(Y | Z = z): linear, slope split between the direct and the
    through-X correlation routes."""
    r = r12 * r13 * r23
    return (r23 + r12 * r13) * z / (1.0 + r)


def cond_mean_y2(z, r12, r13, r23, q):
    """E(Y^2 | Z = z): quadratic in z."""
    r = r12 * r13 * r23
    s2 = r23 * r23 + r12 * r12 * r13 * r13
    a = (s2 * (1.0 - q * r) + r * (1.0 - r) * (1.0 + q)) / ((1.0 + r) * (1.0 - q * r * r))
    b = (1.0 + r * r - s2) / (1.0 - q * r * r)
    return a * z * z + b


def cond_mean_x_pair(y, z, r12, r13, r23=None, q=None):
    """E(X | Y = y, Z = z): weighted average of the two conditioning values."""
    den = 1.0 - r12 * r12 * r13 * r13
    return (y * r12 * (1.0 - r13 * r13) + z * r13 * (1.0 - r12 * r12)) / den


def cond_mean_xy(z, r12, r13, r23, q):
    """E(XY | Z = z): quadratic in z."""
    r = r12 * r13 * r23
    num = r12 * (r13 * r13 + r23 * r23) * (1.0 - q * r) + (1.0 - r) * (r13 * r23 + q * r * r12)
    a = num / ((1.0 + r) * (1.0 - q * r * r))
    b = r12 * (1.0 - r13 * r13) * (1.0 - r23 * r23) / (1.0 - q * r * r)
    return a * z * z + b


def cond_hermite_mean(n, z, r12, r13, r23, q):
    """E(H_n(Y|q) | Z = z) as a finite sum of shifted-kernel ratios,

    sum_s [n s]_q r23^{n-s} (r12 r13)^s Phi_{s, n-s}(z | r, q).

    Each route correlation carries its own power; collecting the s and
    n - s terms by the symmetry of Phi gives the paired form with the
    r^min(s, n-s) factor made explicit.
    """
    r = r12 * r13 * r23
    out = 0.0
    for s in range(n + 1):
        out += (
            q_binomial(n, s, q)
            * r23 ** (n - s)
            * (r12 * r13) ** s
            * rec.helper_Phi(s, n - s, z, r, q)
        )
    return out


def _pair_density_yz(ys, z, r12, r13, r23, q):
    # joint of the (Y, Z) pair after integrating out X; the through-X route
    # contributes at the product correlation
    r = r12 * r13 * r23
    return (
        (1.0 - r)
        * de.cqn_weight(ys, z, r23, q)
        * de.cqn_weight(z, ys, r12 * r13, q)
    )


def conditional_moment_checks(r12, r13, r23, q, n_quad=160, tol=1e-6):
    """Quadrature-vs-closed-form audit of the three-variate construction.

    Four groups: (a) the one-dimensional marginal against the rescaled
    Rogers density, (b) the printed first and second conditional moments,
    (c) proportionality of conditional expectations of the two-parameter
    family across a correlation product, (d) conditional expectations of
    the q-Hermite family against their finite shifted-kernel expansions.
    Every entry reports a worst absolute gap; `passed` applies tol to all.
    """
    _check_triple(r12, r13, r23, q)
    if q == 1:
        raise DomainError("moment audit needs -1 < q < 1")
    r = r12 * r13 * r23
    spec = de.density_qn(q)
    xs, ws = spec.quad_rule(n_quad)
    lo, hi = spec.support
    zs = np.linspace(0.9 * lo, 0.9 * hi, 11)

    # f(x_i | y_j) matrix shared by every z on the grid
    A = de.cqn_weight(xs[:, None], xs[None, :], r12, q)
    rogers = de.density_rogers(r, q)

    f_gap = cyz_gap = cy2z_gap = cconv_gap = 0.0
    for z in zs:
        b = de.cqn_weight(xs, float(z), r23, q)  # f(y | z)
        c = de.cqn_weight(float(z), xs, r13, q)  # f(z | x)
        F = (1.0 - r) * A * b[None, :] * c[:, None]
        den = float(ws @ F @ ws)
        f_gap = max(f_gap, abs(den - float(rogers.pdf(np.array([z]))[0])))
        ey = float(ws @ F @ (ws * xs)) / den
        ey2 = float(ws @ F @ (ws * xs * xs)) / den
        exy = float((ws * xs) @ F @ (ws * xs)) / den
        cyz_gap = max(cyz_gap, abs(ey - cond_mean_y(z, r12, r13, r23)))
        cy2z_gap = max(cy2z_gap, abs(ey2 - cond_mean_y2(z, r12, r13, r23, q)))
        cconv_gap = max(cconv_gap, abs(exy - cond_mean_xy(z, r12, r13, r23, q)))

    # doubly conditioned mean and family projections, three (y, z) pairs
    ex_gap = proj_gap = 0.0
    for fy, fz in ((-0.35, 0.55), (0.15, -0.25), (0.45, 0.3)):
        y, z = fy * hi, fz * hi
        cspec = de.density_c2n(y, r12, z, r13, q)
        mass = cspec.expect(lambda x: np.ones_like(x), n_quad)
        ex = cspec.expect(lambda x: x, n_quad) / mass
        ex_gap = max(ex_gap, abs(ex - cond_mean_x_pair(y, z, r12, r13)))
        for n in range(1, 5):
            num = cspec.expect(
                lambda x, n=n: np.asarray(rec.eval_seq("Rescaled_P", n, x, (y, r12, q))[n], float),
                n_quad,
            ) / mass
            pred = (
                r13**n
                * q_pochhammer(r12 * r12, q, n)
                / q_pochhammer(r12 * r12 * r13 * r13, q, n)
                * rec.eval_poly("Rescaled_P", n, z, (y, r12 * r13, q))
            )
            proj_gap = max(proj_gap, abs(num - pred))

    # q-Hermite conditional means against the finite expansion
    herm_gap = 0.0
    for z in zs[::2]:
        w = _pair_density_yz(xs, float(z), r12, r13, r23, q)
        den = float(ws @ w)
        H = rec.eval_seq("Rescaled_H", 4, xs, (q,))
        for n in range(1, 5):
            lhs = float(ws @ (np.asarray(H[n], float) * w)) / den
            herm_gap = max(herm_gap, abs(lhs - cond_hermite_mean(n, float(z), r12, r13, r23, q)))

    gaps = {
        "marginal_gap": f_gap,
        "cond_mean_gap": cyz_gap,
        "cond_square_gap": cy2z_gap,
        "cond_product_gap": cconv_gap,
        "pair_mean_gap": ex_gap,
        "projection_gap": proj_gap,
        "hermite_expansion_gap": herm_gap,
    }
    return {
        "params": {"rho12": r12, "rho13": r13, "rho23": r23, "q": q},
        "tol": tol,
        **{k: float(v) for k, v in gaps.items()},
        "max_gap": float(max(gaps.values())),
        "passed": bool(max(gaps.values()) < tol),
    }


def aw_conditional_defect(y, rho1, z, rho2, q, nmax=5, n_quad=200):
    """Largest conditional mean of the doubly conditioned orthogonal family
    through degree nmax; zero in exact arithmetic for every degree >= 1."""
    cspec = de.density_c2n(y, rho1, z, rho2, q)
    xs, ws = cspec.quad_rule(n_quad)
    fw = ws * np.asarray(cspec.pdf(xs), float)
    mass = float(fw.sum())
    vals = np.array(
        [rec.eval_seq("Rescaled_A", nmax, float(x), (y, rho1, z, rho2, q)) for x in xs]
    )
    means = fw @ vals / mass
    return float(np.max(np.abs(means[1:])))


# ---------------------------------------------------------------------------
# the discrete regime above q = 1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteConditional:
    """Finitely supported one-step conditional law: m atoms at the zeros of
    the degree-m member of the conditional family, with masses solving the
    moment annihilation system."""

    m: int
    y: float
    rho: float
    q: float
    support: tuple
    masses: tuple
    solve_residual: float = 0.0
    quadrature_gap: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("needs m >= 1")
        if len(self.support) != self.m or len(self.masses) != self.m:
            raise DomainError("support and masses must both have m entries")
        s = math.fsum(self.masses)
        if abs(s - 1.0) > 1e-12:
            raise DomainError(f"masses sum to {s!r}, not 1")
        if min(self.masses) < -1e-10:
            raise DomainError("negative mass in discrete conditional law")

    def annihilation_defect(self):
        """max_k |sum_j mass_j P_k(x_j)| over 1 <= k < m."""
        if self.m == 1:
            return 0.0
        chi = np.asarray(self.support)
        lam = np.asarray(self.masses)
        rows = rec.eval_seq("Rescaled_P", self.m - 1, chi, (self.y, self.rho, self.q))
        return float(
            max(abs(float(np.asarray(r, float) @ lam)) for r in rows[1:])
        )

    def mean(self):
        return float(np.asarray(self.support) @ np.asarray(self.masses))


def discrete_conditional(m, y, q, sign=1):
    """One-step conditional law at correlation sign * q^((1-m)/2) for q > 1.

    Atom locations come from the symmetric Jacobi matrix of the conditional
    family (real, simple zeros); masses from the m x m annihilation system,
    cross-checked against the squared first eigenvector components.
    """
    if q <= 1:
        raise DomainError("discrete conditional law needs q > 1")
    m = int(m)
    if m < 1:
        raise DomainError("needs m >= 1")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    rho = sign * q ** ((1.0 - m) / 2.0)
    ks = np.arange(m)
    diag = rho * y * q**ks
    if m > 1:
        k = np.arange(1, m)
        # 1 - rho^2 q^{k-1} = 1 - q^{k-m} > 0 below the diagonal cutoff
        off2 = (1.0 - rho * rho * q ** (k - 1)) * (q**k - 1.0) / (q - 1.0)
        J = np.diag(diag) + np.diag(np.sqrt(off2), 1) + np.diag(np.sqrt(off2), -1)
    else:
        J = np.diag(diag)
    evals, evecs = np.linalg.eigh(J)
    gw = evecs[0] ** 2
    rows = rec.eval_seq("Rescaled_P", m - 1, evals, (y, rho, q))
    P = np.vstack([np.broadcast_to(np.asarray(r, float), evals.shape) for r in rows])
    e0 = np.zeros(m)
    e0[0] = 1.0
    try:
        lam = np.linalg.solve(P, e0)
    except np.linalg.LinAlgError as exc:  # simple zeros make this unreachable
        raise RuntimeError(f"degenerate annihilation system at m={m}, y={y}, q={q}") from exc
    residual = float(np.max(np.abs(P @ lam - e0)))
    if residual > 1e-10:
        raise RuntimeError(f"annihilation system solved poorly: residual {residual:g}")
    return DiscreteConditional(
        m=m,
        y=float(y),
        rho=float(rho),
        q=float(q),
        support=tuple(float(v) for v in evals),
        masses=tuple(float(v) for v in lam),
        solve_residual=residual,
        quadrature_gap=float(np.max(np.abs(lam - gw))),
    )


def discrete_two_step_check(m1, m2, y, q, sign=1):
    """Compose two discrete transitions and compare the atom cloud with the
    direct law at the product correlation (degree m1 + m2 - 1).

    Returns a report with the largest location mismatch after nearest-atom
    merging and the largest merged-mass gap.
    """
    first = discrete_conditional(m1, y, q, sign)
    m3 = m1 + m2 - 1
    direct = discrete_conditional(m3, y, q, sign)
    chi_d = np.asarray(direct.support)
    merged = np.zeros(m3)
    loc_gap = 0.0
    for chi, lam in zip(first.support, first.masses):
        second = discrete_conditional(m2, chi, q, sign)
        for c2, l2 in zip(second.support, second.masses):
            j = int(np.argmin(np.abs(chi_d - c2)))
            loc_gap = max(loc_gap, abs(chi_d[j] - c2))
            merged[j] += lam * l2
    mass_gap = float(np.max(np.abs(merged - np.asarray(direct.masses))))
    return {
        "m1": m1,
        "m2": m2,
        "m_direct": m3,
        "q": q,
        "y": y,
        "max_location_gap": float(loc_gap),
        "max_mass_gap": mass_gap,
        "passed": bool(loc_gap < 1e-8 and mass_gap < 1e-8),
    }


# ---------------------------------------------------------------------------
# martingale structure of the time-rescaled chain
# ---------------------------------------------------------------------------

def _binned_z_scores(cond, diff, bins):
    order = np.argsort(cond, kind="stable")
    edges = np.linspace(0, cond.size, bins + 1).astype(int)
    zs = []
    for b in range(bins):
        sel = order[edges[b] : edges[b + 1]]
        if sel.size < 2:
            continue
        d = diff[sel]
        sd = float(d.std(ddof=1))
        if sd == 0.0:
            zs.append(0.0)
        else:
            zs.append(float(d.mean() / (sd / math.sqrt(d.size))))
    return zs


def martingale_check(q, s, t, nmax=4, paths=100000, seed=11, bins=12):
    """Binned z-score audit of the martingale families of the rescaled
    chain observed at times s < t.

    The pair (X_s, X_t) is sampled through X_s = sqrt(s) M with M a
    stationary draw and X_t = sqrt(t) C with C a conditional draw at
    correlation sqrt(s/t).  Forward checks regress
    t^{n/2} H_n(X_t / sqrt(t)) - s^{n/2} H_n(X_s / sqrt(s)) on bins of X_s;
    reversed checks swap the roles and the sign of the exponent.  Every bin
    mean should sit within a few standard errors of zero.
    """
    _check_chain_q(q)
    if not 0 < s < t:
        raise DomainError("needs 0 < s < t")
    if nmax < 1:
        raise DomainError("needs nmax >= 1")
    seed = int(seed) & _SEED_MASK
    rho = math.sqrt(s / t)
    table = _marginal_table(q)
    M = np.empty(paths)
    C = np.empty(paths)
    for block, start in enumerate(range(0, paths, _BLOCK)):
        stop = min(start + _BLOCK, paths)
        u = _uniform_block(_block_generator(seed, block), (stop - start, 2))
        m = table.ppf(u[:, 0])
        M[start:stop] = m
        C[start:stop] = _cond_draw(m, rho, q, u[:, 1])
    Xs = math.sqrt(s) * M
    Xt = math.sqrt(t) * C
    Hm = [np.asarray(h, float) for h in rec.eval_seq("Rescaled_H", nmax, M, (q,))]
    Hc = [np.asarray(h, float) for h in rec.eval_seq("Rescaled_H", nmax, C, (q,))]
    forward = {}
    reversed_ = {}
    worst = 0.0
    for n in range(1, nmax + 1):
        fwd = t ** (n / 2.0) * Hc[n] - s ** (n / 2.0) * Hm[n]
        rev = s ** (-n / 2.0) * Hm[n] - t ** (-n / 2.0) * Hc[n]
        zf = _binned_z_scores(Xs, fwd, bins)
        zr = _binned_z_scores(Xt, rev, bins)
        forward[n] = zf
        reversed_[n] = zr
        worst = max(worst, max(abs(z) for z in zf), max(abs(z) for z in zr))
    return {
        "q": q,
        "s": s,
        "t": t,
        "paths": paths,
        "seed": seed,
        "bins": bins,
        "forward_z": forward,
        "reversed_z": reversed_,
        "max_abs_z": float(worst),
        "passed": bool(worst <= 4.0),
    }
