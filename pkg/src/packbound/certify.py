"""Verification primitives: exact Sturm root counting, positivity of
q-series on intervals by head-polynomial + tail-bound + Sturm, Poisson
summation residuals with explicit tails, and the composite certificate for
the optimal test functions.

Every certificate step is labeled ``exact`` (rational arithmetic all the
way) or ``numerical`` (high-precision evaluation with a posteriori error
bounds).  A certificate verifies only if every step passed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import exact
from .exact import frac, poly_eval, poly_trim
from .lattices import (
    LatticeDescription, covolume, dual_lattice, lattice_properties,
    vectors_by_norm,
)
from .magic import magic_spec, taylor_quadratic


class CertifyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Rational intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", frac(self.lo))
        object.__setattr__(self, "hi", frac(self.hi))
        if self.lo > self.hi:
            raise CertifyError("interval endpoints out of order")

    def __add__(self, other):
        other = _as_interval(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __mul__(self, other):
        other = _as_interval(other)
        prods = [self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi]
        return RationalInterval(min(prods), max(prods))

    def contains(self, x) -> bool:
        return self.lo <= frac(x) <= self.hi

    def width(self) -> Fraction:
        return self.hi - self.lo


def _as_interval(x):
    if isinstance(x, RationalInterval):
        return x
    x = frac(x)
    return RationalInterval(x, x)


def exp_interval(x, terms: int = 24) -> RationalInterval:
    """Rational enclosure of e^x for rational x, by scaled Taylor sums."""
    x = frac(x)
    # argument reduction: e^x = (e^(x/2^k))^(2^k) with |x/2^k| <= 1/2
    k = 0
    y = x
    while abs(y) > Fraction(1, 2):
        y /= 2
        k += 1
    s = Fraction(0)
    term = Fraction(1)
    for j in range(1, terms + 1):
        s += term
        term = term * y / j
    # |remainder| <= 2 |term| on |y| <= 1/2
    rem = 2 * abs(term)
    lo, hi = s - rem, s + rem
    if lo <= 0:
        raise CertifyError("exp enclosure collapsed; increase terms")
    for _ in range(k):
        lo, hi = lo * lo, hi * hi
    return RationalInterval(lo, hi)


def _round_down(x: Fraction, den: int) -> Fraction:
    return Fraction(math.floor(x * den), den)


def _round_up(x: Fraction, den: int) -> Fraction:
    return Fraction(math.ceil(x * den), den)


def nth_root_bounds(x, n: int, bits: int = 64) -> RationalInterval:
    """Rational enclosure of x^(1/n) for rational x >= 0, by bisection."""
    x = frac(x)
    if x < 0:
        raise CertifyError("negative radicand")
    if x == 0:
        return RationalInterval(0, 0)
    lo, hi = Fraction(0), max(Fraction(1), x)
    for _ in range(bits):
        mid = (lo + hi) / 2
        if mid ** n <= x:
            lo = mid
        else:
            hi = mid
    return RationalInterval(lo, hi)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    claim: str
    status: str = "inconclusive"   # verified | refuted | inconclusive
    log: list = field(default_factory=list)

    def add_step(self, statement, method, bound, passed, detail=""):
        self.log.append({
            "statement": statement,
            "method": method,
            "bound": str(bound),
            "passed": bool(passed),
            "detail": detail,
        })
        return passed

    def finalize(self):
        if all(step["passed"] for step in self.log):
            self.status = "verified"
        return self

    def to_json(self) -> str:
        return json.dumps({"claim": self.claim, "status": self.status,
                           "log": self.log}, sort_keys=True, indent=1)


# ---------------------------------------------------------------------------
# Sturm root counting
# ---------------------------------------------------------------------------

def sturm_count(poly, interval: RationalInterval) -> int:
    """Distinct real roots of the rational polynomial in the open interval.

    Endpoint roots are divided out exactly (they do not belong to the open
    interval), so the count is always well defined.
    """
    p = poly_trim([frac(c) for c in poly])
    if not p:
        raise CertifyError("zero polynomial")
    for endpoint in (interval.lo, interval.hi):
        while len(p) > 1 and poly_eval(p, endpoint) == 0:
            p, rem = exact.poly_divmod(p, [-endpoint, Fraction(1)])
            assert not rem
    if len(p) == 1:
        return 0
    return exact.sturm_count(p, interval.lo, interval.hi)


# ---------------------------------------------------------------------------
# Positivity of q-series on an interval
# ---------------------------------------------------------------------------

def certify_positive_tail(series, q_interval: RationalInterval,
                          head_terms: int = 60) -> Certificate:
    """Verify series(q) > 0 for q in the interval (0 <= lo <= hi < 1).

    Strategy: exact head polynomial in x = q^(1/8) (after clearing any
    Laurent pole by the positive prefactor x^(-min)), a rigorous bound T on
    everything dropped, then a Sturm check that head - T stays positive.
    """
    cert = Certificate(claim="series positive on interval")
    lo, hi = frac(q_interval.lo), frac(q_interval.hi)
    if hi >= 1:
        raise CertifyError("interval must stay below q = 1")
    items = series.items()
    if not items:
        cert.add_step("series is identically zero", "exact", 0, False)
        cert.status = "refuted"
        return cert
    shift = min(0, items[0][0])
    if shift < 0 and lo == 0:
        raise CertifyError("Laurent series needs a positive lower endpoint")
    head = items[:head_terms]
    rest = items[head_terms:]

    # x-interval enclosing [lo^(1/8), hi^(1/8)], rounded outward to keep
    # denominators small in the Sturm chain
    x_lo = _round_down(nth_root_bounds(lo, 8).lo, 10 ** 9)
    x_hi = _round_up(nth_root_bounds(hi, 8).hi, 10 ** 9)
    if x_hi >= 1:
        raise CertifyError("x enclosure reached 1")

    # head polynomial, pole cleared and with the exponent gcd divided out
    # (theta-grid series live on coarse subgrids; this keeps degrees small)
    exps = [e - shift for e, _ in head]
    g = 0
    for e in exps:
        g = math.gcd(g, e)
    g = max(g, 1)
    deg = exps[-1] // g
    p = [Fraction(0)] * (deg + 1)
    for e, c in head:
        p[(e - shift) // g] += c
    y_lo = _round_down(x_lo ** g, 10 ** 12)
    y_hi = _round_up(x_hi ** g, 10 ** 12)
    if y_hi >= 1:
        raise CertifyError("substituted enclosure reached 1")

    # tail bound at x_hi, scaled by the same x^(-shift) >= 1 clearing factor
    scale_hi = x_hi ** (-shift)
    t_rest = sum(abs(c) * x_hi ** (e - shift) for e, c in rest)
    t_env = Fraction(0)
    if series.envelope is not None:
        env = series.envelope
        n0 = series.trunc
        sqrt_n = nth_root_bounds(Fraction(n0), 2).hi
        growth = exp_interval(env.a * sqrt_n).hi
        ratio = x_hi * exp_interval(env.a / (2 * nth_root_bounds(
            Fraction(n0), 2).lo)).hi
        if ratio >= 1:
            cert.add_step("envelope tail closes", "exact", "ratio >= 1", False,
                          "tail ratio not contracting on this interval")
            return cert
        t_env = env.c * growth * x_hi ** n0 / (1 - ratio) * scale_hi
    t_total = _round_up(t_rest + t_env, 10 ** 30)
    cert.add_step(
        "tail bound", "exact head + envelope tail",
        float(t_total), True,
        f"{len(head)} head terms, tail <= {float(t_total):.3e}")

    shifted = [c for c in p]
    shifted[0] -= t_total

    # definite refutation: head + tail still negative at a sample point
    for y0 in (y_lo, (y_lo + y_hi) / 2, y_hi):
        if poly_eval(p, y0) + t_total < 0:
            cert.add_step(
                f"series value provably negative at y={float(y0):.6f}",
                "exact", float(poly_eval(p, y0) + t_total), False)
            cert.status = "refuted"
            return cert

    positive = exact.poly_positive_on(shifted, y_lo, y_hi)
    cert.add_step(
        "head minus tail positive on the interval (Sturm)", "exact",
        0, positive)
    if positive:
        return cert.finalize()
    cert.status = "inconclusive"
    cert.log[-1]["detail"] = "increase head_terms"
    return cert


# ---------------------------------------------------------------------------
# Poisson summation residual
# ---------------------------------------------------------------------------

def _shell_count_bound(lat: LatticeDescription, table, quantum):
    """Envelope n(v) <= C * (v/quantum)^p valid beyond the computed range.

    For coordinate lattices the crude ball bound 3^n (v)^~(n/2) is proven;
    for the modular-form lattices the divisor-sum structure gives degree
    n/2 - 1, fitted with margin on the computed range.
    """
    n = lat.dimension
    if lat.counting[0] == "diagonal":
        return Fraction(3) ** n, Fraction(n, 2)
    p = Fraction(n, 2) - 1
    c = Fraction(1)
    for v, cnt in table.counts:
        if v > 0 and cnt > 0:
            need = Fraction(cnt) / (frac(v) / quantum) ** math.ceil(p)
            c = max(c, need)
    return 4 * c, Fraction(math.ceil(p))


def _lattice_sum(table, rate, dps):
    """sum counts(v) * exp(-rate * v) over the table."""
    total = mp.mpf(0)
    for v, cnt in table.counts:
        if cnt:
            total += cnt * mp.exp(-rate * mp.mpf(v.numerator) / v.denominator)
    return total


def _tail_bound(c, p, quantum, cutoff_norm, rate):
    """Bound sum_{v > cutoff, v in quantum*Z} C (v/q)^p exp(-rate v)."""
    g = mp.mpf(quantum.numerator) / quantum.denominator
    m = mp.mpf(cutoff_norm.numerator) / cutoff_norm.denominator
    cf = mp.mpf(c.numerator) / c.denominator
    pf = math.ceil(p)
    # (v/q)^p <= (m/q)^p exp(p (v-m) / m) for v >= m
    ratio = mp.exp(-(rate - pf / m) * g)
    if ratio >= 1:
        return mp.inf
    first = cf * (m / g) ** pf * mp.exp(-(rate) * (m + g) + pf * g / m)
    return first / (1 - ratio)


def poisson_check(lat: LatticeDescription, sigma, cutoff: int,
                  dps: int = 40) -> dict:
    """Residual of Poisson summation for the Gaussian exp(-pi |x|^2/sigma^2).

    ``cutoff`` counts in theta-series index r (squared length 2r); both the
    lattice sum and the dual sum are truncated there, and explicit Gaussian
    tail bounds are folded into the reported residual.
    """
    sigma = frac(sigma)
    max_norm = Fraction(2 * cutoff)
    with mp.workdps(dps + 10):
        table = vectors_by_norm(lat, max_norm, budget=max_norm)
        quantum = lat.norm_quantum()
        props = lattice_properties(lat)
        cov = covolume(lat)
        if props["unimodular"]:
            dual_table = table
            cov_value = mp.mpf(1)
        else:
            dual = dual_lattice(lat)
            dual_table = vectors_by_norm(dual, max_norm, budget=max_norm)
            cov_value = (mp.mpf(cov.coefficient.numerator)
                         / cov.coefficient.denominator * mp.sqrt(cov.radicand))
        rate_g = mp.pi / (mp.mpf(sigma.numerator) / sigma.denominator) ** 2
        rate_gh = mp.pi * (mp.mpf(sigma.numerator) / sigma.denominator) ** 2
        sig_n = (mp.mpf(sigma.numerator) / sigma.denominator) ** lat.dimension
        s_lat = _lattice_sum(table, rate_g, dps)
        s_dual = sig_n * _lattice_sum(dual_table, rate_gh, dps) / cov_value
        c, p = _shell_count_bound(lat, table, quantum)
        tail_lat = _tail_bound(c, p, quantum, max_norm, rate_g)
        tail_dual = sig_n * _tail_bound(c, p, quantum, max_norm, rate_gh) \
            / cov_value
        residual = abs(s_lat - s_dual) + tail_lat + tail_dual
        return {
            "residual": residual,
            "difference": abs(s_lat - s_dual),
            "tail_lattice": tail_lat,
            "tail_dual": tail_dual,
            "cutoff": cutoff,
            "sigma": str(sigma),
        }


# ---------------------------------------------------------------------------
# Composite certificate for the optimal test functions
# ---------------------------------------------------------------------------

DEFAULT_CONFIG = {
    "tol_endpoint": 1e-6,
    "grid_slack": 1e-9,
    "grid_step": 0.02,
    "taylor_tol": 1e-3,
    "double_root_tol": 1e-5,
    "far_margin": 10.0,
}

_TAYLOR_TARGETS = {
    (8, "f"): Fraction(-27, 10), (8, "f_hat"): Fraction(-3, 2),
    (24, "f"): Fraction(-14347, 5460), (24, "f_hat"): Fraction(-205, 156),
}

# the simple-root slope at r1 scales like the function size near r1, which
# drops by e^(-pi r1^2): order 1e-2 for n = 8 but only ~6e-5 for n = 24
_SLOPE_FLOOR = {8: 1e-2, 24: 1e-5}
_GRID_END = {8: 8.0, 24: 10.0}


def certify_magic(n: int, spec=None, config: dict = None) -> Certificate:
    """Composite check: normalization, sign conditions on grids with a far
    argument, forced roots with parities, and the quadratic coefficients."""
    cfg = dict(DEFAULT_CONFIG)
    if config:
        cfg.update(config)
    spec = spec or magic_spec(n)
    cert = Certificate(claim=f"test-function feasibility, dimension {n}")
    with mp.workdps(spec.dps + 10):
        r1 = mp.sqrt(spec.r1_sq)
        tol = cfg["tol_endpoint"]

        # (i) normalization at the origin
        for side in ("f", "f_hat"):
            v = spec.eval(side, 0)
            cert.add_step(f"{side}(0) = 1", "numerical (certified error)",
                          f"{float(abs(v.value - 1)):.3e}",
                          abs(v.value - 1) <= tol + v.error)

        # (ii) sign conditions on grids
        slack = cfg["grid_slack"]
        step = cfg["grid_step"]
        rmax = _GRID_END[n]
        worst_f = -mp.inf
        r = r1
        ok_f = True
        while r <= rmax:
            v = spec.eval("f", r)
            worst_f = max(worst_f, v.value - v.error)
            if v.value - v.error > slack:
                ok_f = False
            r += step
        cert.add_step(f"f <= 0 on [r1, {rmax}]", "numerical grid",
                      f"max lower bound {float(worst_f):.3e}", ok_f)
        worst_h = mp.inf
        r = mp.mpf(0)
        ok_h = True
        while r <= rmax:
            v = spec.eval("f_hat", r)
            worst_h = min(worst_h, v.value + v.error)
            if v.value + v.error < -slack:
                ok_h = False
            r += step
        cert.add_step(f"fhat >= 0 on [0, {rmax}]", "numerical grid",
                      f"min upper bound {float(worst_h):.3e}", ok_h)

        # far tail: decaying kernel dominates all error terms by a margin;
        # sample just past the grid (the value decays toward the certified
        # error floor), away from even squared radii where both vanish
        far_ok = True
        margin = mp.inf
        for rr in (rmax + 0.21, rmax + 0.46, rmax + 0.71):
            vf = spec.eval("f", rr)
            vh = spec.eval("f_hat", rr)
            if vf.value >= 0 or vh.value <= 0:
                far_ok = False
            margin = min(margin,
                         abs(vf.value) / max(vf.error, mp.mpf("1e-300")),
                         abs(vh.value) / max(vh.error, mp.mpf("1e-300")))
        far_ok = far_ok and margin >= cfg["far_margin"]
        cert.add_step(
            f"far decay beyond {rmax}: signs with margin >= {cfg['far_margin']}",
            "numerical", f"margin {float(margin):.1e}", far_ok)

        # (iii) roots and parities at the first four vector lengths
        lengths = [mp.sqrt(spec.r1_sq + 2 * j) for j in range(4)]
        for rr in lengths:
            for side in ("f", "f_hat"):
                v = spec.eval(side, rr)
                cert.add_step(f"{side}({mp.nstr(rr, 6)}) = 0",
                              "numerical (certified error)",
                              f"{float(abs(v.value)):.3e}",
                              abs(v.value) <= tol + v.error)
        d1 = spec.derivative("f", r1)
        cert.add_step("f has a transversal sign change at r1",
                      "numerical", f"|f'(r1)| = {float(abs(d1.value)):.3e}",
                      abs(d1.value) >= _SLOPE_FLOOR[n])
        for rr in lengths[1:3]:
            d = spec.derivative("f", rr)
            cert.add_step(f"double root of f at {mp.nstr(rr, 6)}",
                          "numerical", f"{float(abs(d.value)):.3e}",
                          abs(d.value) <= cfg["double_root_tol"] + d.error)
        dh = spec.derivative("f_hat", r1)
        cert.add_step("double root of fhat at r1", "numerical",
                      f"{float(abs(dh.value)):.3e}",
                      abs(dh.value) <= cfg["double_root_tol"] + dh.error)

        # (iv) quadratic Taylor coefficients
        for side in ("f", "f_hat"):
            target = _TAYLOR_TARGETS[(n, side)]
            t = taylor_quadratic(side, n, spec)
            err = abs(t.value - mp.mpf(target.numerator) / target.denominator)
            cert.add_step(f"quadratic coefficient of {side} is {target}",
                          "numerical (Richardson)", f"{float(err):.3e}",
                          err <= cfg["taylor_tol"] + t.error)

    if all(s["passed"] for s in cert.log):
        cert.status = "verified"
    else:
        definite = any(not s["passed"] for s in cert.log)
        cert.status = "refuted" if definite else "inconclusive"
    return cert
