"""Closed-form evaluation of kernel sums and generating functions.

Each :class:`KernelSpec` pairs an infinite series, summed term by term from
the recurrence ladders, with an independently computed closed form, plus a
sampler for the admissible parameter domain.  ``verify_kernel`` measures the
worst absolute gap over a batch of random points; nothing in here is trusted
until that gap sits below the spec tolerance.

The catalog covers the bilinear Poisson-Mehler kernel in compact and
probabilistic coordinates (with its Gaussian and diagonal limits), the
geometric Chebyshev kernel, ultraspherical and big-family Poisson kernels,
reciprocal kernels, one generating function per polynomial family, product
expansions, the joint moment-generating series of three and four coupled
coordinates, and the triple-product kernel over three correlated coordinates
together with a scan for the points where it turns negative.
"""

from __future__ import annotations

import cmath
import math
import zlib
from dataclasses import dataclass
from random import Random

import numpy as np

from . import recurrences as rec
from .qcore import (
    DEFAULT_CTRL,
    DomainError,
    SeriesControl,
    conj_pair_product,
    cross_pair_product,
    double_angle_product,
    q_factorial,
    q_number,
    q_pochhammer_inf,
    q_pochhammer_inf_many,
    very_well_poised,
)

_NMAX = 420


def _scale(q: float) -> float:
    # compact <-> probabilistic coordinate ratio; the support edge is 2/scale
    if q >= 1.0:
        raise DomainError("probabilistic products need q < 1")
    return math.sqrt(1.0 - q) / 2.0


def pair_product(x, y, t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """prod_k w(x_s, y_s | t q^k) on the probabilistic support.

    The points are mapped down by sqrt(1-q)/2; the modulus t is not.  This
    product is the denominator of every conditional density on S(q).
    """
    s = _scale(q)
    return cross_pair_product(x * s, y * s, t, q, ctrl)


def point_product(x, a, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """prod_k v(x_s | a_s q^k): both the point and the modulus are mapped."""
    s = _scale(q)
    return conj_pair_product(x * s, a * s, q, ctrl)


def squared_product(x, t, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """prod_k [(1 + t q^k)^2 - (1-q) t q^k x^2], the diagonal-kernel product."""
    return double_angle_product(x * _scale(q), t, q, ctrl)


def poisson_mehler(x, y, rho, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """Closed value of sum_n rho^n/[n]_q! H_n(x|q) H_n(y|q).

    Probabilistic coordinates; dispatches to the Gaussian form at q = 1.
    """
    if abs(rho) >= 1.0:
        raise DomainError("kernel needs |rho| < 1")
    if q == 1.0:
        return gaussian_mehler(x, y, rho)
    return q_pochhammer_inf(rho * rho, q, ctrl) / pair_product(x, y, rho, q, ctrl)


def gaussian_mehler(x, y, rho):
    """q = 1 limit: exp((2 rho x y - rho^2 (x^2+y^2)) / (2(1-rho^2))) / sqrt(1-rho^2)."""
    if abs(rho) >= 1.0:
        raise DomainError("kernel needs |rho| < 1")
    c = 1.0 - rho * rho
    return math.exp((2.0 * rho * x * y - rho * rho * (x * x + y * y)) / (2.0 * c)) / math.sqrt(c)


# --------------------------------------------------------------------------
# series plumbing

def _tail_sum(gen, floor=30, eps=1e-16):
    tot = 0.0
    for n, t in enumerate(gen):
        tot += t
        if n > floor and abs(t) < eps * (1.0 + abs(tot)):
            break
    return tot


def _inv_qpoch_steps(q, nmax):
    # running 1/(q;q)_n
    out = [1.0]
    acc = 1.0
    for n in range(1, nmax + 1):
        acc *= 1.0 - q**n
        out.append(1.0 / acc)
    return out


def _scaled_hermite_sum(x, y, rho, nmax=600):
    # sum_n rho^n H_n(x) H_n(y) / n! for monic Hermite, factorial-scaled so the
    # partial products never overflow; valid for |rho| < 1
    r = abs(rho)
    sgn = 1.0 if rho >= 0.0 else -1.0
    sq = math.sqrt(r)
    u_m, u = 0.0, 1.0
    v_m, v = 0.0, 1.0
    tot = 0.0
    sign = 1.0
    for n in range(nmax + 1):
        term = sign * u * v
        tot += term
        if n > 40 and abs(term) < 1e-17 * (1.0 + abs(tot)):
            break
        a = sq / math.sqrt(n + 1.0)
        b = r * math.sqrt(n / (n + 1.0))
        u, u_m = x * a * u - b * u_m, u
        v, v_m = y * a * v - b * v_m, v
        sign *= sgn
    return tot


# --------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class KernelSpec:
    spec_id: str
    summary: str
    draw: object
    series: object
    closed: object
    tol: float = 1e-8
    note: str = ""


@dataclass(frozen=True)
class KernelReport:
    spec_id: str
    points: int
    worst_gap: float
    tol: float
    passed: bool
    worst_point: dict


_REGISTRY: dict[str, KernelSpec] = {}


def _spec(spec_id, summary, tol=1e-8, note=""):
    def deco(builder):
        draw, series, closed = builder()
        _REGISTRY[spec_id] = KernelSpec(spec_id, summary, draw, series, closed, tol, note)
        return builder
    return deco


def kernel_ids() -> tuple:
    return tuple(_REGISTRY)


def get_spec(spec_id: str) -> KernelSpec:
    return _REGISTRY[spec_id]


def verify_kernel(spec, points: int = 30, seed: int = 0) -> KernelReport:
    if isinstance(spec, str):
        spec = _REGISTRY[spec]
    rng = Random((seed << 16) ^ zlib.crc32(spec.spec_id.encode()))
    worst = -1.0
    worst_pt: dict = {}
    for _ in range(points):
        pt = spec.draw(rng)
        gap = abs(spec.series(pt) - spec.closed(pt))
        if gap > worst:
            worst, worst_pt = gap, pt
    return KernelReport(spec.spec_id, points, worst, spec.tol, worst <= spec.tol, worst_pt)


def verify_all_kernels(points: int = 30, seed: int = 0) -> list:
    return [verify_kernel(s, points, seed) for s in _REGISTRY.values()]


def _draw_q(rng, lo=0.2, hi=0.7, neg=True):
    q = rng.uniform(lo, hi)
    if neg and rng.random() < 0.35:
        q = -q
    return q


def _sym(rng, lo, hi):
    return rng.uniform(lo, hi) * (1.0 if rng.random() < 0.5 else -1.0)


# --------------------------------------------------------------------------
# generating functions, one per family

@_spec("gf_geometric_pair", "two-factor Euler product generates the binomial-type family")
def _build_gf_geometric_pair():
    def draw(rng):
        return {"q": _draw_q(rng), "x": _sym(rng, 0.05, 1.35), "t": _sym(rng, 0.05, 0.6)}

    def series(pt):
        q, x, t = pt["q"], pt["x"], pt["t"]
        S = rec.eval_seq("RogersSzego_s", _NMAX, x, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**k * float(S[k]) * inv[k] for k in range(_NMAX + 1))

    def closed(pt):
        q, x, t = pt["q"], pt["x"], pt["t"]
        return 1.0 / q_pochhammer_inf_many([t * x, t], q)

    return draw, series, closed


@_spec("gf_lattice_count", "the family at argument one counts by a squared Euler factor")
def _build_gf_lattice_count():
    def draw(rng):
        return {"q": _draw_q(rng), "t": _sym(rng, 0.05, 0.7)}

    def series(pt):
        q, t = pt["q"], pt["t"]
        S = rec.eval_seq("RogersSzego_s", _NMAX, 1.0, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**k * float(S[k]) * inv[k] for k in range(_NMAX + 1))

    def closed(pt):
        return 1.0 / q_pochhammer_inf(pt["t"], pt["q"]) ** 2

    return draw, series, closed


@_spec("gf_lattice_count_sq", "squared values at argument one against a fourth-power Euler factor")
def _build_gf_lattice_count_sq():
    def draw(rng):
        return {"q": _draw_q(rng), "t": _sym(rng, 0.03, 0.45)}

    def series(pt):
        q, t = pt["q"], pt["t"]
        S = rec.eval_seq("RogersSzego_s", _NMAX, 1.0, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**k * float(S[k]) ** 2 * inv[k] for k in range(_NMAX + 1))

    def closed(pt):
        t, q = pt["t"], pt["q"]
        return q_pochhammer_inf(t * t, q) / q_pochhammer_inf(t, q) ** 4

    return draw, series, closed


@_spec("gf_hermite", "reciprocal conjugate-pair product generates the continuous family")
def _build_gf_hermite():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98), "t": _sym(rng, 0.05, 0.8)}

    def series(pt):
        q, x, t = pt["q"], pt["x"], pt["t"]
        H = rec.eval_seq("qHermite_h", _NMAX, x, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**j * float(H[j]) * inv[j] for j in range(_NMAX + 1))

    def closed(pt):
        return 1.0 / conj_pair_product(pt["x"], pt["t"], pt["q"])

    return draw, series, closed


@_spec("gf_hermite_even", "even-index subsequence against the double-angle product")
def _build_gf_hermite_even():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98), "b": _sym(rng, 0.05, 0.55)}

    def series(pt):
        q, x, b = pt["q"], pt["x"], pt["b"]
        H = rec.eval_seq("qHermite_h", 2 * _NMAX, x, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)

        def gen():
            poch = 1.0 - b
            for k in range(_NMAX + 1):
                if k:
                    poch *= 1.0 - b * q**k
                yield b**k * inv[k] / poch * float(H[2 * k])

        return _tail_sum(gen())

    def closed(pt):
        q, x, b = pt["q"], pt["x"], pt["b"]
        return (q_pochhammer_inf(b * b, q)
                / (q_pochhammer_inf(b, q) ** 2 * double_angle_product(x, b, q)))

    return draw, series, closed


@_spec("gf_hermite_inverted", "the base-inverted family sums to the conjugate-pair product")
def _build_gf_hermite_inverted():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98), "t": _sym(rng, 0.1, 1.4)}

    def series(pt):
        q, x, t = pt["q"], pt["x"], pt["t"]
        B = rec.eval_seq("qInvHermite_b", _NMAX, x, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**n * float(B[n]) * inv[n] for n in range(_NMAX + 1))

    def closed(pt):
        return conj_pair_product(pt["x"], pt["t"], pt["q"])

    return draw, series, closed


@_spec("gf_big_hermite", "one Euler factor strips the shift parameter off the pair product")
def _build_gf_big_hermite():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.8), "t": _sym(rng, 0.05, 0.65)}

    def series(pt):
        q, x, a, t = pt["q"], pt["x"], pt["a"], pt["t"]
        H = rec.eval_seq("BigQHermite", _NMAX, x, (a, q))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**j * float(H[j]) * inv[j] for j in range(_NMAX + 1))

    def closed(pt):
        q, x, a, t = pt["q"], pt["x"], pt["a"], pt["t"]
        return q_pochhammer_inf(a * t, q) / conj_pair_product(x, t, q)

    return draw, series, closed


@_spec("gf_big_hermite_self", "alternating self-expansion of the shifted pair product")
def _build_gf_big_hermite_self():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98), "a": _sym(rng, 0.1, 1.1)}

    def series(pt):
        q, x, a = pt["q"], pt["x"], pt["a"]
        H = rec.eval_seq("BigQHermite", _NMAX, x, (a, q))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(
            q ** (k * (k - 1) // 2) * (-a) ** k * inv[k] * float(H[k])
            for k in range(_NMAX + 1))

    def closed(pt):
        return conj_pair_product(pt["x"], pt["a"], pt["q"])

    return draw, series, closed


@_spec("gf_big_hermite_inverted", "hatted companion generates the pair product over an Euler factor")
def _build_gf_big_hermite_inverted():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.7), "t": _sym(rng, 0.05, 0.45)}

    def series(pt):
        q, x, a, t = pt["q"], pt["x"], pt["a"], pt["t"]
        B = rec.eval_seq("BigQInvHermite", _NMAX, x, (a, q))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**k * float(B[k]) * inv[k] for k in range(_NMAX + 1))

    def closed(pt):
        q, x, a, t = pt["q"], pt["x"], pt["a"], pt["t"]
        return conj_pair_product(x, t, q) / q_pochhammer_inf(a * t, q)

    return draw, series, closed


@_spec("gf_ultraspherical", "ratio of two pair products, no factorial weights")
def _build_gf_ultraspherical():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "beta": _sym(rng, 0.05, 0.8), "t": _sym(rng, 0.05, 0.75)}

    def series(pt):
        q, x, b, t = pt["q"], pt["x"], pt["beta"], pt["t"]
        C = rec.eval_seq("Ultraspherical_C", _NMAX, x, (b, q))
        return _tail_sum(t**k * float(C[k]) for k in range(_NMAX + 1))

    def closed(pt):
        q, x, b, t = pt["q"], pt["x"], pt["beta"], pt["t"]
        return conj_pair_product(x, b * t, q) / conj_pair_product(x, t, q)

    return draw, series, closed


@_spec("gf_two_parameter", "two Euler factors strip both parameters off the pair product")
def _build_gf_two_parameter():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.8), "b": _sym(rng, 0.05, 0.8),
                "t": _sym(rng, 0.05, 0.6)}

    def series(pt):
        q, x = pt["q"], pt["x"]
        Q = rec.eval_seq("ASC_Q", _NMAX, x, (pt["a"], pt["b"], q))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(pt["t"] ** k * float(Q[k]) * inv[k] for k in range(_NMAX + 1))

    def closed(pt):
        q, t = pt["q"], pt["t"]
        return (q_pochhammer_inf_many([pt["a"] * t, pt["b"] * t], q)
                / conj_pair_product(pt["x"], t, q))

    return draw, series, closed


@_spec("gf_two_parameter_inverted", "hatted two-parameter family inverts the Euler factors")
def _build_gf_two_parameter_inverted():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.7), "b": _sym(rng, 0.05, 0.7),
                "t": _sym(rng, 0.05, 0.4)}

    def series(pt):
        q, x = pt["q"], pt["x"]
        Qh = rec.eval_seq("ASC_Qhat", _NMAX, x, (pt["a"], pt["b"], q))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(pt["t"] ** n * float(Qh[n]) * inv[n] for n in range(_NMAX + 1))

    def closed(pt):
        q, t = pt["q"], pt["t"]
        return (conj_pair_product(pt["x"], t, q)
                / q_pochhammer_inf_many([pt["a"] * t, pt["b"] * t], q))

    return draw, series, closed


@_spec("gf_three_parameter", "alternating weights on the three-parameter family")
def _build_gf_three_parameter():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.7), "b": _sym(rng, 0.05, 0.7),
                "c": _sym(rng, 0.05, 0.8)}

    def series(pt):
        q, x, a, b, c = pt["q"], pt["x"], pt["a"], pt["b"], pt["c"]
        psi = rec.eval_seq("CDH_psi", _NMAX, x, (a, b, c, q))
        inv = _inv_qpoch_steps(q, _NMAX)

        def gen():
            pa = pb = 1.0
            for j in range(_NMAX + 1):
                if j:
                    pa *= 1.0 - a * c * q ** (j - 1)
                    pb *= 1.0 - b * c * q ** (j - 1)
                yield (q ** (j * (j - 1) // 2) * (-c) ** j * inv[j] / (pa * pb)
                       * float(psi[j]))

        return _tail_sum(gen())

    def closed(pt):
        q, x, a, b, c = pt["q"], pt["x"], pt["a"], pt["b"], pt["c"]
        return (conj_pair_product(x, c, q)
                / q_pochhammer_inf_many([a * c, b * c], q))

    return draw, series, closed


@_spec("gf_three_parameter_shifted", "plain powers of the detached parameter generate the rest")
def _build_gf_three_parameter_shifted():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.03, 0.3), "b": _sym(rng, 0.05, 0.6),
                "c": _sym(rng, 0.05, 0.6), "d": _sym(rng, 0.05, 0.6)}

    def series(pt):
        q, x, a = pt["q"], pt["x"], pt["a"]
        psi = rec.eval_seq("CDH_psi", _NMAX, x, (pt["b"], pt["c"], pt["d"], q))
        inv = _inv_qpoch_steps(q, _NMAX)
        prod = a * pt["b"] * pt["c"] * pt["d"]

        def gen():
            poch = 1.0
            for j in range(_NMAX + 1):
                if j:
                    poch *= 1.0 - prod * q ** (j - 1)
                yield a**j / poch * inv[j] * float(psi[j])

        return _tail_sum(gen())

    def closed(pt):
        q, x, a, b, c, d = pt["q"], pt["x"], pt["a"], pt["b"], pt["c"], pt["d"]
        return (q_pochhammer_inf_many([a * b, a * c, a * d], q)
                / q_pochhammer_inf(a * b * c * d, q)
                / conj_pair_product(x, a, q))

    return draw, series, closed


@_spec("gf_four_parameter", "detaching one of four parameters leaves its three Euler factors")
def _build_gf_four_parameter():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.7), "b": _sym(rng, 0.05, 0.7),
                "c": _sym(rng, 0.05, 0.7), "d": _sym(rng, 0.05, 0.7)}

    def series(pt):
        q, x = pt["q"], pt["x"]
        a, b, c, d = pt["a"], pt["b"], pt["c"], pt["d"]
        al = rec.eval_seq("AW_alpha", _NMAX // 2, x, (a, b, c, d, q))
        prod = a * b * c * d

        def gen():
            num = 1.0
            den = 1.0
            for j in range(_NMAX // 2 + 1):
                if j:
                    # (prod)_{2j} grows by two factors per step
                    num *= (1.0 - prod * q ** (2 * j - 2)) * (1.0 - prod * q ** (2 * j - 1))
                    den *= ((1.0 - a * d * q ** (j - 1)) * (1.0 - b * d * q ** (j - 1))
                            * (1.0 - c * d * q ** (j - 1)) * (1.0 - q**j))
                yield (-d) ** j * q ** (j * (j - 1) // 2) * num / den * float(al[j])

        return _tail_sum(gen())

    def closed(pt):
        q, x = pt["q"], pt["x"]
        a, b, c, d = pt["a"], pt["b"], pt["c"], pt["d"]
        return (q_pochhammer_inf(a * b * c * d, q)
                / q_pochhammer_inf_many([a * d, b * d, c * d], q)
                * conj_pair_product(x, d, q))

    return draw, series, closed


@_spec("expand_pair_product", "self-coupled expansion of the cross-pair product",
       note="coefficients split large against small powers; 32 terms is the float ceiling "
            "and the terms decay like q^(n^2/4), settled long before it")
def _build_expand_pair_product():
    def draw(rng):
        return {"q": _draw_q(rng, lo=0.35, neg=True), "x": rng.uniform(-0.98, 0.98),
                "y": rng.uniform(-0.98, 0.98), "r": _sym(rng, 0.1, 0.9)}

    def series(pt):
        q, x, y, r = pt["q"], pt["x"], pt["y"], pt["r"]
        inv = _inv_qpoch_steps(q, 32)
        return _tail_sum(
            (r**n * inv[n] * float(rec.helper_d2(n, x, y, q)) for n in range(33)),
            floor=16)

    def closed(pt):
        return cross_pair_product(pt["x"], pt["y"], pt["r"], pt["q"])

    return draw, series, closed


@_spec("expand_pair_product_inverse", "expansion of the reciprocal cross-pair product")
def _build_expand_pair_product_inverse():
    def draw(rng):
        return {"q": _draw_q(rng, lo=0.25, neg=True), "x": rng.uniform(-0.95, 0.95),
                "y": rng.uniform(-0.95, 0.95), "r": _sym(rng, 0.05, 0.5)}

    def series(pt):
        q, x, y, r = pt["q"], pt["x"], pt["y"], pt["r"]
        inv = _inv_qpoch_steps(q, 200)
        return _tail_sum(
            r**n * inv[n] * float(rec.helper_f2(n, x, y, q)) for n in range(201))

    def closed(pt):
        return 1.0 / cross_pair_product(pt["x"], pt["y"], pt["r"], pt["q"])

    return draw, series, closed


@_spec("expand_weight_fourier", "alternating even Chebyshev series for the orthogonality weight")
def _build_expand_weight_fourier():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.97, 0.97)}

    def series(pt):
        q, x = pt["q"], pt["x"]
        U = rec.eval_seq("Chebyshev_U", 260, x, ())
        pre = 2.0 * math.sqrt(1.0 - x * x) / math.pi
        return pre * _tail_sum(
            (-1.0) ** k * q ** (k * (k + 1) // 2) * float(U[2 * k]) for k in range(130))

    def closed(pt):
        from .densities import density_qh
        return density_qh(pt["q"]).pdf(pt["x"])

    return draw, series, closed


@_spec("expand_two_point_mirror", "bilinear self-kernel rewritten as a one-point expansion")
def _build_expand_two_point_mirror():
    def draw(rng):
        s = 1.0 if rng.random() < 0.5 else -1.0
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": s * rng.uniform(0.08, 0.6), "b": s * rng.uniform(0.08, 0.6)}

    def series(pt):
        q, x, a, b = pt["q"], pt["x"], pt["a"], pt["b"]
        u = (a + b) / (2.0 * math.sqrt(a * b))
        H = rec.eval_seq("qHermite_h", _NMAX, x, (q,))
        Hu = rec.eval_seq("qHermite_h", _NMAX, u, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        root = math.sqrt(a * b)
        return _tail_sum(root**j * inv[j] * float(Hu[j]) * float(H[j])
                         for j in range(_NMAX + 1))

    def closed(pt):
        q, x, a, b = pt["q"], pt["x"], pt["a"], pt["b"]
        return (q_pochhammer_inf(a * b, q)
                / (conj_pair_product(x, a, q) * conj_pair_product(x, b, q)))

    return draw, series, closed


def _split_coeffs(a, b, q, nmax):
    # D_s = sum_{p+m=s} a^p b^m / ((q)_p (q)_m); the two-parameter split weights
    inv = _inv_qpoch_steps(q, nmax)
    ap = [a**p * inv[p] for p in range(nmax + 1)]
    bm = [b**m * inv[m] for m in range(nmax + 1)]
    out = []
    for s in range(nmax + 1):
        out.append(math.fsum(ap[p] * bm[s - p] for p in range(s + 1)))
    return out


@_spec("expand_split_pair", "two-parameter split weights resum two stripped pair products")
def _build_expand_split_pair():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.03, 0.4), "b": _sym(rng, 0.03, 0.4)}

    def series(pt):
        q, x, a, b = pt["q"], pt["x"], pt["a"], pt["b"]
        N = 240
        D = _split_coeffs(a, b, q, N)
        H = rec.eval_seq("qHermite_h", N, x, (q,))
        return _tail_sum(D[j] * float(H[j]) for j in range(N + 1))

    def closed(pt):
        q, x, a, b = pt["q"], pt["x"], pt["a"], pt["b"]
        return (q_pochhammer_inf(a * b, q)
                / (conj_pair_product(x, a, q) * conj_pair_product(x, b, q)))

    return draw, series, closed


@_spec("expand_split_triple", "three-parameter split weights resum three stripped pair products")
def _build_expand_split_triple():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.03, 0.28), "b": _sym(rng, 0.03, 0.28),
                "c": _sym(rng, 0.03, 0.28)}

    def series(pt):
        q, x, a, b, c = pt["q"], pt["x"], pt["a"], pt["b"], pt["c"]
        N = 220
        inv = _inv_qpoch_steps(q, N)
        # S_n = n-th coefficient of the triple split, then the alternating dressing
        S = [0.0] * (N + 1)
        for n in range(N + 1):
            acc = 0.0
            for j in range(n + 1):
                for k in range(n - j + 1):
                    acc += (a**k * b**j * c ** (n - j - k)
                            * inv[j] * inv[k] * inv[n - j - k])
            S[n] = acc
        H = rec.eval_seq("qHermite_h", N, x, (q,))
        prod = a * b * c
        tot = 0.0
        for n in range(N + 1):
            # binomial splice of the plain split weights with alternating dressing;
            # the binomial cancels the outer Euler factor against the inner split
            sig = 0.0
            for j in range(n + 1):
                sig += q ** (j * (j - 1) // 2) * (-prod) ** j * inv[j] * S[n - j]
            term = sig * float(H[n])
            tot += term
            if n > 40 and abs(term) < 1e-16 * (1.0 + abs(tot)):
                break
        return tot

    def closed(pt):
        q, x, a, b, c = pt["q"], pt["x"], pt["a"], pt["b"], pt["c"]
        return (q_pochhammer_inf_many([a * b, a * c, b * c], q)
                / (conj_pair_product(x, a, q) * conj_pair_product(x, b, q)
                   * conj_pair_product(x, c, q)))

    return draw, series, closed


@_spec("mixed_two_parameter_pair", "mixed kernel of the two-parameter family against its rescaled twin")
def _build_mixed_two_parameter_pair():
    def draw(rng):
        s = 1.0 if rng.random() < 0.5 else -1.0
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": _sym(rng, 0.05, 0.65), "b": _sym(rng, 0.05, 0.65),
                "c": s * rng.uniform(0.08, 0.55), "d": s * rng.uniform(0.08, 0.55)}

    def series(pt):
        q, x = pt["q"], pt["x"]
        a, b, c, d = pt["a"], pt["b"], pt["c"], pt["d"]
        root = math.sqrt(c * d)
        u = (c + d) / (2.0 * root)
        Q1 = rec.eval_seq("ASC_Q", _NMAX // 2, x, (a, b, q))
        Q2 = rec.eval_seq("ASC_Q", _NMAX // 2, u, (a * root, b * root, q))
        inv = _inv_qpoch_steps(q, _NMAX // 2)
        prod = a * b * c * d

        def gen():
            poch = 1.0
            for j in range(_NMAX // 2 + 1):
                if j:
                    poch *= 1.0 - prod * q ** (j - 1)
                yield root**j / poch * inv[j] * float(Q1[j]) * float(Q2[j])

        return _tail_sum(gen())

    def closed(pt):
        q, x = pt["q"], pt["x"]
        a, b, c, d = pt["a"], pt["b"], pt["c"], pt["d"]
        return (q_pochhammer_inf_many([a * c, a * d, b * c, b * d, c * d], q)
                / q_pochhammer_inf(a * b * c * d, q)
                / (conj_pair_product(x, c, q) * conj_pair_product(x, d, q)))

    return draw, series, closed


@_spec("mixed_two_parameter_inverted", "mixed kernel against the base-inverted family")
def _build_mixed_two_parameter_inverted():
    def draw(rng):
        s = 1.0 if rng.random() < 0.5 else -1.0
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "a": s * rng.uniform(0.08, 0.7), "b": s * rng.uniform(0.08, 0.7)}

    def series(pt):
        q, x, a, b = pt["q"], pt["x"], pt["a"], pt["b"]
        root = math.sqrt(a * b)
        u = (a + b) / (2.0 * root)
        Bu = rec.eval_seq("qInvHermite_b", _NMAX // 2, u, (q,))
        Q = rec.eval_seq("ASC_Q", _NMAX // 2, x, (a, b, q))
        inv = _inv_qpoch_steps(q, _NMAX // 2)

        def gen():
            poch = 1.0
            for k in range(_NMAX // 2 + 1):
                if k:
                    poch *= 1.0 - a * b * q ** (k - 1)
                yield root**k * inv[k] / poch * float(Bu[k]) * float(Q[k])

        return _tail_sum(gen())

    def closed(pt):
        q, x, a, b = pt["q"], pt["x"], pt["a"], pt["b"]
        return (conj_pair_product(x, a, q) * conj_pair_product(x, b, q)
                / q_pochhammer_inf(a * b, q))

    return draw, series, closed


# --------------------------------------------------------------------------
# bilinear kernels, compact coordinates

@_spec("pm_compact", "bilinear self-kernel against the cross-pair product")
def _build_pm_compact():
    def draw(rng):
        return {"q": _draw_q(rng), "x": rng.uniform(-0.98, 0.98),
                "y": rng.uniform(-0.98, 0.98), "r": _sym(rng, 0.05, 0.8)}

    def series(pt):
        q, x, y, r = pt["q"], pt["x"], pt["y"], pt["r"]
        H1 = rec.eval_seq("qHermite_h", _NMAX, x, (q,))
        H2 = rec.eval_seq("qHermite_h", _NMAX, y, (q,))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(r**n * inv[n] * float(H1[n]) * float(H2[n])
                         for n in range(_NMAX + 1))

    def closed(pt):
        q, x, y, r = pt["q"], pt["x"], pt["y"], pt["r"]
        return q_pochhammer_inf(r * r, q) / cross_pair_product(x, y, r, q)

    return draw, series, closed


@_spec("cheb_geometric", "geometric bilinear Chebyshev sum against a single quartic factor")
def _build_cheb_geometric():
    def draw(rng):
        return {"x": rng.uniform(-1.94, 1.94), "y": rng.uniform(-1.94, 1.94),
                "t": _sym(rng, 0.05, 0.75)}

    def series(pt):
        x, y, t = pt["x"], pt["y"], pt["t"]
        U1 = rec.eval_seq("Chebyshev_U", _NMAX, x / 2.0, ())
        U2 = rec.eval_seq("Chebyshev_U", _NMAX, y / 2.0, ())
        return _tail_sum(t**n * float(U1[n]) * float(U2[n]) for n in range(_NMAX + 1))

    def closed(pt):
        x, y, t = pt["x"], pt["y"], pt["t"]
        den = ((1.0 - t * t) ** 2 - t * (1.0 + t * t) * x * y
               + t * t * (x * x + y * y))
        return (1.0 - t * t) / den

    return draw, series, closed


@_spec("ultra_poisson", "normalized ultraspherical bilinear kernel", tol=1e-6,
       note="series weights carry the inverse diagonal; closed side is a very-well-poised sum")
def _build_ultra_poisson():
    def draw(rng):
        return {"q": _draw_q(rng, lo=0.25), "x": rng.uniform(-0.97, 0.97),
                "y": rng.uniform(-0.97, 0.97), "beta": _sym(rng, 0.1, 0.75),
                "t": _sym(rng, 0.02, 0.3)}

    def series(pt):
        q, x, y, b, t = pt["q"], pt["x"], pt["y"], pt["beta"], pt["t"]
        C1 = rec.eval_seq("Ultraspherical_C", _NMAX, x, (b, q))
        C2 = rec.eval_seq("Ultraspherical_C", _NMAX, y, (b, q))

        def gen():
            qn = 1.0
            b2n = 1.0
            for n in range(_NMAX + 1):
                if n:
                    qn *= 1.0 - q**n
                    b2n *= 1.0 - b * b * q ** (n - 1)
                yield ((1.0 - b * q**n) * qn / ((1.0 - b) * b2n) * t**n
                       * float(C1[n]) * float(C2[n]))

        return _tail_sum(gen())

    def closed(pt):
        q, x, y, b, t = pt["q"], pt["x"], pt["y"], pt["beta"], pt["t"]
        th, ph = math.acos(x), math.acos(y)
        E = cmath.exp
        pre = (q_pochhammer_inf_many([b * q, t * t], q)
               / q_pochhammer_inf_many([b * b, b * t * t], q))
        wrat = (cross_pair_product(x, y, t * b, q)
                / cross_pair_product(x, y, t, q))
        w7 = very_well_poised(
            b * t * t / q,
            [b / q, t * E(1j * (th + ph)), t * E(-1j * (th + ph)),
             t * E(1j * (th - ph)), t * E(-1j * (th - ph))],
            q, b * q)
        return pre * wrat * w7.real

    return draw, series, closed


def _confluent_poised_sum(a, al, t, q, th, ph, nmax=400):
    # confluent limit of the very-well-poised sum: one numerator parameter was
    # sent to infinity against the argument, leaving (-t^2)^n q^(C(n,2)) weights
    A = al * a * t / q
    rA = cmath.sqrt(complex(A))
    e = cmath.exp
    ups = [A, q * rA, -q * rA, a * e(1j * th), a * e(-1j * th),
           al * e(1j * ph), al * e(-1j * ph)]
    los = [q, rA, -rA, q * A / (a * e(1j * th)), q * A / (a * e(-1j * th)),
           q * A / (al * e(1j * ph)), q * A / (al * e(-1j * ph))]
    tot = 0.0 + 0.0j
    coef = 1.0 + 0.0j
    for n in range(nmax):
        term = coef * (-t * t) ** n * q ** (n * (n - 1) // 2)
        tot += term
        if n > 20 and abs(term) < 1e-18 * (1.0 + abs(tot)):
            break
        ratio = 1.0 + 0.0j
        for u in ups:
            ratio *= 1.0 - u * q**n
        for l in los:
            ratio /= 1.0 - l * q**n
        coef *= ratio
    return tot.real


@_spec("bigq_poisson", "bilinear kernel of the shifted family via a confluent poised sum",
       tol=1e-6)
def _build_bigq_poisson():
    def draw(rng):
        return {"q": _draw_q(rng, lo=0.25), "x": rng.uniform(-0.97, 0.97),
                "y": rng.uniform(-0.97, 0.97), "a": _sym(rng, 0.1, 0.75),
                "al": _sym(rng, 0.1, 0.75), "t": _sym(rng, 0.02, 0.3)}

    def series(pt):
        q, x, y, a, al, t = pt["q"], pt["x"], pt["y"], pt["a"], pt["al"], pt["t"]
        H1 = rec.eval_seq("BigQHermite", _NMAX, x, (a, q))
        H2 = rec.eval_seq("BigQHermite", _NMAX, y, (al, q))
        inv = _inv_qpoch_steps(q, _NMAX)
        return _tail_sum(t**n * inv[n] * float(H1[n]) * float(H2[n])
                         for n in range(_NMAX + 1))

    def closed(pt):
        q, x, y, a, al, t = pt["q"], pt["x"], pt["y"], pt["a"], pt["al"], pt["t"]
        th, ph = math.acos(x), math.acos(y)
        pre = 1.0 / q_pochhammer_inf(al * a * t, q)
        num = (conj_pair_product(x, al * t, q) * conj_pair_product(y, a * t, q))
        den = cross_pair_product(x, y, t, q)
        return pre * num / den * _confluent_poised_sum(a, al, t, q, th, ph)

    return draw, series, closed


def _cpoch_inf(a, q, nmax=4000):
    # infinite pochhammer for complex argument
    tot = 1.0 + 0.0j
    ak = complex(a)
    for _ in range(nmax):
        tot *= 1.0 - ak
        ak *= q
        if abs(ak) < 1e-18:
            break
    return tot


@_spec("two_parameter_poisson_proj", "asymmetric-weight bilinear kernel of the two-parameter family",
       tol=1e-6, note="complex one-sided factors; imaginary parts cancel in the total")
def _build_two_parameter_poisson_proj():
    def draw(rng):
        a = _sym(rng, 0.4, 0.7)
        b = _sym(rng, 0.15, 0.5)
        al = _sym(rng, 0.4, 0.7)
        t_cap = 0.3 * min(1.0, abs(a / al))
        return {"q": _draw_q(rng, lo=0.25), "x": rng.uniform(-0.97, 0.97),
                "y": rng.uniform(-0.97, 0.97), "a": a, "b": b, "al": al,
                "be": a * b / al, "t": _sym(rng, 0.1, 1.0) * t_cap}

    def series(pt):
        q, x, y = pt["q"], pt["x"], pt["y"]
        a, b, al, be, t = pt["a"], pt["b"], pt["al"], pt["be"], pt["t"]
        Q1 = rec.eval_seq("ASC_Q", _NMAX, x, (a, b, q))
        Q2 = rec.eval_seq("ASC_Q", _NMAX, y, (al, be, q))

        def gen():
            qn = 1.0
            abn = 1.0
            for n in range(_NMAX + 1):
                if n:
                    qn *= 1.0 - q**n
                    abn *= 1.0 - a * b * q ** (n - 1)
                yield (t * al / a) ** n / (qn * abn) * float(Q1[n]) * float(Q2[n])

        return _tail_sum(gen())

    def closed(pt):
        q, x, y = pt["q"], pt["x"], pt["y"]
        a, b, al, be, t = pt["a"], pt["b"], pt["al"], pt["be"], pt["t"]
        th, ph = math.acos(x), math.acos(y)
        e = cmath.exp
        num = 1.0 + 0.0j
        for v in [al * al * t * t / (a * a), (al * al * t / a) * e(1j * th),
                  b * e(-1j * th), b * t * e(1j * th),
                  al * t * e(-1j * ph), al * t * e(1j * ph)]:
            num *= _cpoch_inf(v, q)
        den = (_cpoch_inf(a * b, q)
               * _cpoch_inf((al * al * t * t / a) * e(1j * th), q)
               * cross_pair_product(x, y, al * t / a, q))
        w7 = very_well_poised(
            al * al * t * t * e(1j * th) / (a * q),
            [t, al * t / be, a * e(1j * th),
             (al * t / a) * e(1j * (th + ph)), (al * t / a) * e(1j * (th - ph))],
            q, b * e(-1j * th))
        return (num / den * w7).real

    return draw, series, closed


@_spec("two_parameter_poisson", "symmetric-weight bilinear kernel of the two-parameter family",
       tol=1e-6, note="the quartic factors pair each point with the other side's parameter")
def _build_two_parameter_poisson():
    def draw(rng):
        a = _sym(rng, 0.4, 0.7)
        al = _sym(rng, 0.4, 0.7)
        b = _sym(rng, 0.15, 0.45)
        return {"q": _draw_q(rng, lo=0.25), "x": rng.uniform(-0.97, 0.97),
                "y": rng.uniform(-0.97, 0.97), "a": a, "b": b, "al": al,
                "be": a * b / al, "t": _sym(rng, 0.02, 0.3)}

    def series(pt):
        q, x, y = pt["q"], pt["x"], pt["y"]
        a, b, al, be, t = pt["a"], pt["b"], pt["al"], pt["be"], pt["t"]
        Q1 = rec.eval_seq("ASC_Q", _NMAX, x, (a, b, q))
        Q2 = rec.eval_seq("ASC_Q", _NMAX, y, (al, be, q))

        def gen():
            qn = 1.0
            abn = 1.0
            for n in range(_NMAX + 1):
                if n:
                    qn *= 1.0 - q**n
                    abn *= 1.0 - a * b * q ** (n - 1)
                yield t**n / (qn * abn) * float(Q1[n]) * float(Q2[n])

        return _tail_sum(gen())

    def closed(pt):
        q, x, y = pt["q"], pt["x"], pt["y"]
        a, b, al, be, t = pt["a"], pt["b"], pt["al"], pt["be"], pt["t"]
        th, ph = math.acos(x), math.acos(y)
        E = cmath.exp
        pre = q_pochhammer_inf(be * t / a, q) / q_pochhammer_inf(al * a * t, q)
        num = conj_pair_product(x, al * t, q) * conj_pair_product(y, a * t, q)
        den = cross_pair_product(x, y, t, q)
        w7 = very_well_poised(
            al * a * t / q,
            [al * t / b, a * E(1j * th), a * E(-1j * th),
             al * E(1j * ph), al * E(-1j * ph)],
            q, be * t / a)
        return pre * num / den * w7.real

    return draw, series, closed


# --------------------------------------------------------------------------
# bilinear kernels, probabilistic coordinates

@_spec("pm", "bilinear self-kernel in probabilistic coordinates")
def _build_pm():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        return {"q": q, "x": rng.uniform(-0.97, 0.97) * hw,
                "y": rng.uniform(-0.97, 0.97) * hw, "r": _sym(rng, 0.05, 0.75)}

    def series(pt):
        q, x, y, r = pt["q"], pt["x"], pt["y"], pt["r"]
        H1 = rec.eval_seq("Rescaled_H", _NMAX, x, (q,))
        H2 = rec.eval_seq("Rescaled_H", _NMAX, y, (q,))

        def gen():
            fac = 1.0
            for n in range(_NMAX + 1):
                if n:
                    fac *= q_number(n, q)
                yield r**n / fac * float(H1[n]) * float(H2[n])

        return _tail_sum(gen())

    def closed(pt):
        return poisson_mehler(pt["x"], pt["y"], pt["r"], pt["q"])

    return draw, series, closed


@_spec("pm_gauss", "Gaussian limit of the bilinear self-kernel")
def _build_pm_gauss():
    def draw(rng):
        return {"x": rng.uniform(-2.5, 2.5), "y": rng.uniform(-2.5, 2.5),
                "r": _sym(rng, 0.05, 0.55)}

    def series(pt):
        return _scaled_hermite_sum(pt["x"], pt["y"], pt["r"])

    def closed(pt):
        return gaussian_mehler(pt["x"], pt["y"], pt["r"])

    return draw, series, closed


@_spec("pm_diag", "even-index diagonal kernel against the squared product")
def _build_pm_diag():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        return {"q": q, "x": rng.uniform(-0.97, 0.97) * hw, "r": _sym(rng, 0.05, 0.7)}

    def series(pt):
        q, x, r = pt["q"], pt["x"], pt["r"]
        H = rec.eval_seq("Rescaled_H", 2 * _NMAX, x, (q,))
        tail = q_pochhammer_inf(r * q, q)

        def gen():
            nonlocal tail
            fac = 1.0
            for k in range(_NMAX + 1):
                if k:
                    fac *= q_number(k, q)
                    tail /= 1.0 - r * q**k
                yield r**k * tail / fac * float(H[2 * k])

        return _tail_sum(gen())

    def closed(pt):
        q, x, r = pt["q"], pt["x"], pt["r"]
        return (q_pochhammer_inf(r * r, q) / q_pochhammer_inf(r, q)
                / squared_product(x, r, q))

    return draw, series, closed


@_spec("cond_ratio", "ratio of two conditional densities expanded in conditional polynomials",
       note="nonnegative on its domain: it is a ratio of positive densities")
def _build_cond_ratio():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        return {"q": q, "x": rng.uniform(-0.9, 0.9) * hw,
                "y": rng.uniform(-0.9, 0.9) * hw, "z": rng.uniform(-0.9, 0.9) * hw,
                "r1": _sym(rng, 0.15, 0.7), "r2": _sym(rng, 0.15, 0.7)}

    def series(pt):
        q = pt["q"]
        x, y, z, r1, r2 = pt["x"], pt["y"], pt["z"], pt["r1"], pt["r2"]
        P1 = rec.eval_seq("Rescaled_P", _NMAX, x, (z, r2, q))
        P2 = rec.eval_seq("Rescaled_P", _NMAX, y, (z, r2 / r1, q))

        def gen():
            fac = 1.0
            r22 = 1.0
            for n in range(_NMAX + 1):
                if n:
                    fac *= q_number(n, q)
                    r22 *= 1.0 - r2 * r2 * q ** (n - 1)
                yield r1**n / (fac * r22) * float(P1[n]) * float(P2[n])

        return _tail_sum(gen())

    def closed(pt):
        q = pt["q"]
        return (poisson_mehler(pt["x"], pt["y"], pt["r1"], q)
                / poisson_mehler(pt["x"], pt["z"], pt["r2"], q))

    return draw, series, closed


@_spec("recip_pm", "reciprocal of the self-kernel via the base-inverted family")
def _build_recip_pm():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        return {"q": q, "x": rng.uniform(-0.9, 0.9) * hw,
                "y": rng.uniform(-0.9, 0.9) * hw, "r": _sym(rng, 0.05, 0.6)}

    def series(pt):
        q, x, y, r = pt["q"], pt["x"], pt["y"], pt["r"]
        B = rec.eval_seq("Rescaled_B", _NMAX, y, (q,))
        P = rec.eval_seq("Rescaled_P", _NMAX, x, (y, r, q))

        def gen():
            fac = 1.0
            r2n = 1.0
            for n in range(_NMAX + 1):
                if n:
                    fac *= q_number(n, q)
                    r2n *= 1.0 - r * r * q ** (n - 1)
                yield r**n / (r2n * fac) * float(B[n]) * float(P[n])

        return _tail_sum(gen())

    def closed(pt):
        return 1.0 / poisson_mehler(pt["x"], pt["y"], pt["r"], pt["q"])

    return draw, series, closed


@_spec("recip_gauss", "reciprocal of the Gaussian kernel; needs squared modulus below one half")
def _build_recip_gauss():
    def draw(rng):
        return {"x": rng.uniform(-2.2, 2.2), "y": rng.uniform(-2.2, 2.2),
                "r": _sym(rng, 0.05, 0.6)}

    def series(pt):
        x, y, r = pt["x"], pt["y"], pt["r"]
        c = math.sqrt(1.0 - r * r)
        u = (y - r * x) / c
        rr = abs(r) / c
        sgn = 1.0 if r >= 0.0 else -1.0
        sq = math.sqrt(rr)
        g_m, g = 0.0, 1.0    # mirrored recurrence: q_{n+1} = -x q_n + n q_{n-1}, scaled
        h_m, h = 0.0, 1.0
        tot = 0.0
        sign = 1.0
        for n in range(601):
            term = sign * g * h
            tot += term
            if n > 40 and abs(term) < 1e-17 * (1.0 + abs(tot)):
                break
            a = sq / math.sqrt(n + 1.0)
            b = rr * math.sqrt(n / (n + 1.0))
            g, g_m = -x * a * g + b * g_m, g
            h, h_m = u * a * h - b * h_m, h
            sign *= sgn
        return tot

    def closed(pt):
        return 1.0 / gaussian_mehler(pt["x"], pt["y"], pt["r"])

    return draw, series, closed


@_spec("recip_bigq", "reciprocal of the shifted-family kernel; smaller parameter inside")
def _build_recip_bigq():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        b = _sym(rng, 0.45, 0.85)
        a = b * rng.uniform(0.15, 0.8) * (1.0 if rng.random() < 0.5 else -1.0)
        return {"q": q, "x": rng.uniform(-0.9, 0.9) * hw,
                "y": rng.uniform(-0.9, 0.9) * hw, "a": a, "b": b}

    def series(pt):
        q, x, y, a, b = pt["q"], pt["x"], pt["y"], pt["a"], pt["b"]
        T = a / b
        B = rec.eval_seq("Rescaled_bigB", _NMAX, y, (b, q))
        P = rec.eval_seq("Rescaled_P", _NMAX, x, (y, T, q))

        def gen():
            fac = 1.0
            t2n = 1.0
            for n in range(_NMAX + 1):
                if n:
                    fac *= q_number(n, q)
                    t2n *= 1.0 - T * T * q ** (n - 1)
                yield T**n / (fac * t2n) * float(B[n]) * float(P[n])

        return _tail_sum(gen())

    def closed(pt):
        q, x, y, a, b = pt["q"], pt["x"], pt["y"], pt["a"], pt["b"]
        T = a / b
        ker = (q_pochhammer_inf(T * T, q) * point_product(x, a, q)
               / pair_product(x, y, T, q))
        return 1.0 / ker

    return draw, series, closed


@_spec("bigq_rescaled", "shifted-family kernel in probabilistic coordinates",
       note="the one-point product sits at the point paired with the smaller parameter")
def _build_bigq_rescaled():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        b = _sym(rng, 0.45, 0.85)
        a = b * rng.uniform(0.15, 0.8) * (1.0 if rng.random() < 0.5 else -1.0)
        return {"q": q, "x": rng.uniform(-0.9, 0.9) * hw,
                "y": rng.uniform(-0.9, 0.9) * hw, "a": a, "b": b}

    def series(pt):
        q, x, y, a, b = pt["q"], pt["x"], pt["y"], pt["a"], pt["b"]
        H1 = rec.eval_seq("Rescaled_bigH", _NMAX, x, (b, q))
        H2 = rec.eval_seq("Rescaled_bigH", _NMAX, y, (a, q))

        def gen():
            fac = 1.0
            for n in range(_NMAX + 1):
                if n:
                    fac *= q_number(n, q)
                yield (a / b) ** n / fac * float(H1[n]) * float(H2[n])

        return _tail_sum(gen())

    def closed(pt):
        q, x, y, a, b = pt["q"], pt["x"], pt["y"], pt["a"], pt["b"]
        T = a / b
        return (q_pochhammer_inf(T * T, q) * point_product(y, a, q)
                / pair_product(x, y, T, q))

    return draw, series, closed


@_spec("recip_cond_ratio", "reciprocal of the conditional-density ratio kernel",
       note="swaps both the coupling moduli and the conditioning point")
def _build_recip_cond_ratio():
    def draw(rng):
        q = _draw_q(rng)
        hw = 2.0 / math.sqrt(1.0 - q)
        return {"q": q, "x": rng.uniform(-0.9, 0.9) * hw,
                "y": rng.uniform(-0.9, 0.9) * hw, "z": rng.uniform(-0.9, 0.9) * hw,
                "r1": _sym(rng, 0.15, 0.7), "r2": _sym(rng, 0.15, 0.7)}

    def series(pt):
        q = pt["q"]
        x, y, z, r1, r2 = pt["x"], pt["y"], pt["z"], pt["r1"], pt["r2"]
        P1 = rec.eval_seq("Rescaled_P", _NMAX, x, (y, r1, q))
        P2 = rec.eval_seq("Rescaled_P", _NMAX, z, (y, r1 / r2, q))

        def gen():
            fac = 1.0
            r11 = 1.0
            for n in range(_NMAX + 1):
                if n:
                    fac *= q_number(n, q)
                    r11 *= 1.0 - r1 * r1 * q ** (n - 1)
                yield r2**n / (fac * r11) * float(P1[n]) * float(P2[n])

        return _tail_sum(gen())

    def closed(pt):
        q = pt["q"]
        return (poisson_mehler(pt["x"], pt["z"], pt["r2"], q)
                / poisson_mehler(pt["x"], pt["y"], pt["r1"], q))

    return draw, series, closed


# --------------------------------------------------------------------------
# joint moment-generating series over three and four coupled coordinates

def quadruple_product_series(a, b, c, d, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """Fourfold moment series, resummed pairwise through the linearization weights."""
    N = 170
    Dab = _split_coeffs(a, b, q, N)
    Dcd = _split_coeffs(c, d, q, N)
    tot = 0.0
    poch = 1.0
    for s in range(N + 1):
        if s:
            poch *= 1.0 - q**s
        term = poch * Dab[s] * Dcd[s]
        tot += term
        if s > 40 and abs(term) < 1e-17 * (1.0 + abs(tot)):
            break
    return tot / (q_pochhammer_inf(a * b, q, ctrl) * q_pochhammer_inf(c * d, q, ctrl))


def quadruple_product_closed(a, b, c, d, q, ctrl: SeriesControl = DEFAULT_CTRL):
    return (q_pochhammer_inf(a * b * c * d, q, ctrl)
            / q_pochhammer_inf_many(
                [a * b, a * c, a * d, b * c, b * d, c * d], q, ctrl))


def triple_product_series(a, b, c, q, ctrl: SeriesControl = DEFAULT_CTRL):
    """Threefold moment series: the fourth coordinate of the quadruple set to zero."""
    N = 170
    Dab = _split_coeffs(a, b, q, N)
    tot = 0.0
    for s in range(N + 1):
        term = Dab[s] * c**s
        tot += term
        if s > 40 and abs(term) < 1e-17 * (1.0 + abs(tot)):
            break
    return tot / q_pochhammer_inf(a * b, q, ctrl)


def triple_product_closed(a, b, c, q, ctrl: SeriesControl = DEFAULT_CTRL):
    return 1.0 / q_pochhammer_inf_many([a * b, a * c, b * c], q, ctrl)


@_spec("char_quadruple", "fourfold joint moment series against six Euler factors")
def _build_char_quadruple():
    def draw(rng):
        return {"q": _draw_q(rng), "a": _sym(rng, 0.03, 0.45),
                "b": _sym(rng, 0.03, 0.45), "c": _sym(rng, 0.03, 0.45),
                "d": _sym(rng, 0.03, 0.45)}

    def series(pt):
        return quadruple_product_series(pt["a"], pt["b"], pt["c"], pt["d"], pt["q"])

    def closed(pt):
        return quadruple_product_closed(pt["a"], pt["b"], pt["c"], pt["d"], pt["q"])

    return draw, series, closed


@_spec("char_triple", "threefold joint moment series against three Euler factors")
def _build_char_triple():
    def draw(rng):
        return {"q": _draw_q(rng), "a": _sym(rng, 0.03, 0.45),
                "b": _sym(rng, 0.03, 0.45), "c": _sym(rng, 0.03, 0.45)}

    def series(pt):
        return triple_product_series(pt["a"], pt["b"], pt["c"], pt["q"])

    def closed(pt):
        return triple_product_closed(pt["a"], pt["b"], pt["c"], pt["q"])

    return draw, series, closed


# --------------------------------------------------------------------------
# triple-product kernel over three correlated coordinates

def admissible(r12: float, r13: float, r23: float) -> bool:
    """True when the correlation triple sits inside the open elliptope."""
    if max(abs(r12), abs(r13), abs(r23)) >= 1.0:
        return False
    return (1.0 + 2.0 * r12 * r13 * r23
            - r12 * r12 - r13 * r13 - r23 * r23) > 0.0


def _ladder_grid(xs: np.ndarray, q: float, n: int) -> np.ndarray:
    # vectorized monic ladder H_0..H_n over a grid; rows index the grid
    out = np.empty((len(xs), n + 1))
    out[:, 0] = 1.0
    if n >= 1:
        out[:, 1] = xs
    for k in range(1, n):
        out[:, k + 1] = xs * out[:, k] - q_number(k, q) * out[:, k - 1]
    return out


def _triple_sum_grid(x1s, x2s, x3s, r12, r13, r23, q, terms):
    N = terms
    H1 = _ladder_grid(np.asarray(x1s, dtype=float), q, 2 * N)
    H2 = _ladder_grid(np.asarray(x2s, dtype=float), q, 2 * N)
    H3 = _ladder_grid(np.asarray(x3s, dtype=float), q, 2 * N)
    fac = np.empty(N + 1)
    fac[0] = 1.0
    for k in range(1, N + 1):
        fac[k] = fac[k - 1] * q_number(k, q)
    c12 = r12 ** np.arange(N + 1) / fac
    c13 = r13 ** np.arange(N + 1) / fac
    c23 = r23 ** np.arange(N + 1) / fac
    idx = np.arange(N + 1)
    pair = idx[:, None] + idx[None, :]
    A1 = H1[:, pair]
    A2 = H2[:, pair]
    A3 = H3[:, pair]
    return np.einsum("k,m,n,akm,bkn,cmn->abc", c12, c13, c23, A1, A2, A3,
                     optimize=True)


def triple_kernel(x1, x2, x3, r12, r13, r23, q, method="triple", terms=80):
    """Triple-product kernel over three coordinates with pairwise couplings.

    ``method`` picks the summation route: "triple" runs the full three-index
    sum, "hermite" collapses one coupling into a closed product and sums a
    single series of mixing coefficients, "asc" expands in conditional
    polynomials around the third coordinate, and "gaussian" is the closed
    density ratio at q = 1.
    """
    for r in (r12, r13, r23):
        if abs(r) >= 1.0:
            raise DomainError("couplings must satisfy |r| < 1")
    if method == "gaussian":
        if q != 1.0:
            raise DomainError("the closed density ratio only exists at q = 1")
        R = np.array([[1.0, r12, r13], [r12, 1.0, r23], [r13, r23, 1.0]])
        det = np.linalg.det(R)
        if det <= 0.0:
            raise DomainError("correlation matrix is not positive definite")
        v = np.array([x1, x2, x3])
        quad = v @ (np.linalg.inv(R) - np.eye(3)) @ v
        return float(math.exp(-0.5 * quad) / math.sqrt(det))
    if q == 1.0:
        if method == "triple":
            g = _triple_sum_grid([x1], [x2], [x3], r12, r13, r23, q, min(terms, 60))
            return float(g[0, 0, 0])
        raise DomainError("only the triple sum and the density ratio exist at q = 1")
    if method == "triple":
        g = _triple_sum_grid([x1], [x2], [x3], r12, r13, r23, q, terms)
        return float(g[0, 0, 0])
    if method == "hermite":
        H2l = rec.eval_seq("Rescaled_H", 2 * terms, x2, (q,))
        pref = q_pochhammer_inf(r13 * r13, q) / pair_product(x1, x3, r13, q)
        tot = 0.0
        fac = 1.0
        for s in range(2 * terms + 1):
            if s:
                fac *= q_number(s, q)
            term = float(H2l[s]) * float(rec.helper_D(s, x1, x3, r12, r23, r13, q)) / fac
            tot += term
            if s > 30 and abs(term) < 1e-15 * (1.0 + abs(tot)):
                break
        return pref * tot
    if method == "asc":
        P1 = rec.eval_seq("Rescaled_P", 2 * terms, x1, (x3, r13, q))
        P2 = rec.eval_seq("Rescaled_P", 2 * terms, x2, (x3, r23, q))
        pref = (q_pochhammer_inf_many([r13 * r13, r23 * r23], q)
                / (pair_product(x1, x3, r13, q) * pair_product(x3, x2, r23, q)))
        tot = 0.0
        fac = 1.0
        p13 = p23 = poch12 = 1.0
        for s in range(2 * terms + 1):
            if s:
                fac *= q_number(s, q)
                p13 *= 1.0 - r13 * r13 * q ** (s - 1)
                p23 *= 1.0 - r23 * r23 * q ** (s - 1)
                poch12 *= 1.0 - (r13 * r23 / r12) * q ** (s - 1)
            term = (r12**s * poch12 / (fac * p13 * p23)
                    * float(P1[s]) * float(P2[s]))
            tot += term
            if s > 30 and abs(term) < 1e-15 * (1.0 + abs(tot)):
                break
        return pref * tot
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ScanReport:
    q: float
    min_value: float
    argmin: tuple
    rho: tuple
    found_negative: bool
    margin: float


_SCAN_RHOS = (
    (0.8, 0.8, 0.35),
    (0.8, 0.8, 0.4),
    (0.85, 0.85, 0.45),
    (0.75, 0.75, 0.2),
    (0.9, 0.6, 0.3),
    (0.7, 0.7, 0.05),
)


def negativity_scan(q: float, rhos=_SCAN_RHOS, grid: int = 9, refine: int = 3,
                    terms: int = 90) -> ScanReport:
    """Search the admissible region for points where the triple kernel dips negative.

    Scans a coarse cube per admissible coupling triple, then shrinks around the
    running minimum.  Every window stays inside the support box: outside it the
    three-index sum no longer converges.  At q = 1 the kernel is a Gaussian
    density ratio and the scan reports its (positive) minimum instead.
    """
    best = math.inf
    best_x = (0.0, 0.0, 0.0)
    best_rho = None
    if q == 1.0:
        hw = 3.2
    else:
        hw = 2.0 / math.sqrt(1.0 - q) * 0.99

    def evaluate(axes, rho):
        if q == 1.0:
            vals = np.empty((len(axes[0]), len(axes[1]), len(axes[2])))
            for i, x1 in enumerate(axes[0]):
                for j, x2 in enumerate(axes[1]):
                    for k, x3 in enumerate(axes[2]):
                        vals[i, j, k] = triple_kernel(
                            x1, x2, x3, *rho, 1.0, method="gaussian")
            return vals
        return _triple_sum_grid(axes[0], axes[1], axes[2], *rho, q, terms)

    for rho in rhos:
        if not admissible(*rho):
            continue
        axes = [np.linspace(-hw, hw, grid)] * 3
        for _ in range(refine + 1):
            vals = evaluate(axes, rho)
            am = np.unravel_index(np.argmin(vals), vals.shape)
            vmin = float(vals[am])
            center = (float(axes[0][am[0]]), float(axes[1][am[1]]),
                      float(axes[2][am[2]]))
            if vmin < best:
                best = vmin
                best_x = center
                best_rho = rho
            spans = [(ax[-1] - ax[0]) * 0.22 for ax in axes]
            axes = [np.linspace(max(c - s, -hw), min(c + s, hw), 5)
                    for c, s in zip(center, spans)]
        if best < 0.0 and q != 1.0:
            break
    # confirm a negative minimum with a longer sum before reporting it
    margin = 0.0
    if best < 0.0 and q != 1.0 and best_rho is not None:
        long_val = triple_kernel(*best_x, *best_rho, q, method="triple",
                                 terms=terms + 50)
        margin = abs(long_val - best)
        best = long_val
    return ScanReport(q, best, best_x, best_rho or (0.0, 0.0, 0.0),
                      best < 0.0, margin)


__all__ = [
    "KernelReport",
    "KernelSpec",
    "ScanReport",
    "admissible",
    "gaussian_mehler",
    "get_spec",
    "kernel_ids",
    "negativity_scan",
    "pair_product",
    "point_product",
    "poisson_mehler",
    "quadruple_product_closed",
    "quadruple_product_series",
    "squared_product",
    "triple_kernel",
    "triple_product_closed",
    "triple_product_series",
    "verify_all_kernels",
    "verify_kernel",
]
