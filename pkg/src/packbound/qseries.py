"""Exact truncated Laurent series in the nome and the named modular forms.

Series live on the exponent grid q^(1/8) (q = e^(2 pi i z)): a term with grid
exponent E is the monomial q^(E/8).  Coefficients are exact rationals.  A
series carries a truncation bound ``trunc``: coefficients are known exactly
for all grid exponents < trunc, and arithmetic propagates the correct
validity window (division by a series with leading exponent o costs 2o grid
units of validity).

The grid is the coarsest one housing both theta constants
(Theta01 has exponents 4n^2, Theta10 has (2n+1)^2) together with the
integer-exponent Eisenstein series and the discriminant form.

Evaluation on the imaginary axis z = it is a plain exponential sum with a
rigorous tail bound: every named series gets a coefficient envelope
|c_E| <= C * exp(a * sqrt(E)), fitted with margin on the computed range and
checked against it (eta-quotient coefficients grow subexponentially, so a
polynomial envelope would undershoot the true tail).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .exact import frac

GRID = 8  # grid exponents count eighths of a power of q
DEFAULT_TRUNC = 300


class QSeriesError(ValueError):
    pass


class EnvelopeError(QSeriesError):
    pass


class Envelope:
    """Coefficient envelope |c_E| <= C * exp(a * sqrt(E)) for E >= 1."""

    def __init__(self, c: Fraction, a: Fraction):
        self.c = frac(c)
        self.a = frac(a)

    def bound_at(self, e: int):
        return mp.mpf(self.c.numerator) / self.c.denominator * mp.exp(
            mp.mpf(self.a.numerator) / self.a.denominator * mp.sqrt(e))

    def check(self, series: "QSeries"):
        for e, c in series.coeffs.items():
            if e < 1:
                continue
            cb = abs(mp.mpf(c.numerator)) / c.denominator
            if cb > self.bound_at(e) * (1 + mp.mpf("1e-25")):
                raise EnvelopeError(
                    f"coefficient at grid exponent {e} violates envelope")

    def tail_bound(self, n_start: int, x):
        """Bound on sum_{E >= n_start} |c_E| x^E for 0 < x < 1.

        Uses sqrt(E) <= sqrt(N) + (E - N) / (2 sqrt(N)), so the tail is
        dominated by a geometric series with ratio x * exp(a / (2 sqrt(N))).
        """
        n = max(n_start, 1)
        a = mp.mpf(self.a.numerator) / self.a.denominator
        c = mp.mpf(self.c.numerator) / self.c.denominator
        ratio = x * mp.exp(a / (2 * mp.sqrt(n)))
        if ratio >= 1:
            return mp.inf
        return c * mp.exp(a * mp.sqrt(n)) * x ** n / (1 - ratio)


class QSeries:
    __slots__ = ("coeffs", "trunc", "envelope")

    def __init__(self, coeffs, trunc, envelope=None):
        cc = {}
        for e, c in coeffs.items():
            c = frac(c)
            if c != 0 and e < trunc:
                cc[int(e)] = c
        self.coeffs = cc
        self.trunc = int(trunc)
        self.envelope = envelope

    # -- structure ---------------------------------------------------------

    @property
    def min_exp(self) -> int:
        return min(self.coeffs) if self.coeffs else self.trunc

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: int) -> Fraction:
        if e >= self.trunc:
            raise QSeriesError(f"grid exponent {e} beyond validity {self.trunc}")
        return self.coeffs.get(e, Fraction(0))

    def q_coeff(self, p) -> Fraction:
        """Coefficient of q^p (p rational with denominator dividing 8)."""
        e = frac(p) * GRID
        if e.denominator != 1:
            raise QSeriesError("exponent not on the 1/8 grid")
        return self.coeff(int(e))

    def items(self):
        return sorted(self.coeffs.items())

    def __eq__(self, other):
        return (isinstance(other, QSeries) and self.coeffs == other.coeffs
                and self.trunc == other.trunc)

    def __repr__(self):
        head = ", ".join(f"q^({e}/8):{c}" for e, c in self.items()[:6])
        return f"QSeries({head}{'...' if len(self.coeffs) > 6 else ''}; trunc={self.trunc})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other, self.trunc)
        t = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return QSeries(out, t)

    __radd__ = __add__

    def __neg__(self):
        return QSeries({e: -c for e, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-_coerce(other, self.trunc))

    def __rsub__(self, other):
        return _coerce(other, self.trunc) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self, other
        if a.is_zero() or b.is_zero():
            t = min(a.trunc + b.min_exp, b.trunc + a.min_exp)
            return QSeries({}, t)
        t = min(a.trunc + b.min_exp, b.trunc + a.min_exp)
        out = {}
        bi = b.items()
        for ea, ca in a.coeffs.items():
            for eb, cb in bi:
                e = ea + eb
                if e >= t:
                    break
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return QSeries(out, t)

    __rmul__ = __mul__

    def scale(self, s):
        s = frac(s)
        return QSeries({e: c * s for e, c in self.coeffs.items()}, self.trunc)

    def shift(self, de: int):
        """Multiply by q^(de/8)."""
        return QSeries({e + de: c for e, c in self.coeffs.items()},
                       self.trunc + de)

    def inverse(self):
        if self.is_zero():
            raise QSeriesError("division by zero series")
        o = self.min_exp
        window = self.trunc - o
        u = {e - o: c for e, c in self.coeffs.items()}
        c0 = u[0]
        v = [Fraction(0)] * window
        v[0] = 1 / c0
        nonzero = sorted(e for e in u if e > 0)
        for k in range(1, window):
            s = Fraction(0)
            for e in nonzero:
                if e > k:
                    break
                s += u[e] * v[k - e]
            if s:
                v[k] = -s / c0
        return QSeries({k - o: c for k, c in enumerate(v) if c}, window - o)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / frac(other))
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        # binary powering; validity handled by the multiplications
        out = None
        b = self
        kk = k
        while kk:
            if kk & 1:
                out = b if out is None else out * b
            kk >>= 1
            if kk:
                b = b * b
        if out is None:
            return QSeries({0: Fraction(1)}, self.trunc - self.min_exp
                           if not self.is_zero() else self.trunc)
        return out

    def with_envelope(self, envelope: Envelope):
        envelope.check(self)
        return QSeries(self.coeffs, self.trunc, envelope)

    def dump_csv(self) -> str:
        lines = ["exponent_in_eighths,numerator,denominator"]
        for e, c in self.items():
            lines.append(f"{e},{c.numerator},{c.denominator}")
        return "\n".join(lines) + "\n"


def _coerce(x, trunc):
    if isinstance(x, QSeries):
        return x
    return QSeries({0: frac(x)}, trunc)


def one(trunc=DEFAULT_TRUNC):
    return QSeries({0: 1}, trunc)


def q_power(p, trunc=DEFAULT_TRUNC):
    e = frac(p) * GRID
    if e.denominator != 1:
        raise QSeriesError("exponent not on the 1/8 grid")
    return QSeries({int(e): 1}, trunc)


# ---------------------------------------------------------------------------
# Bernoulli numbers and Eisenstein series
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k (B_1 = -1/2 convention)."""
    if k < 0:
        raise QSeriesError("negative index")
    row = [Fraction(0)] * (k + 1)
    for m in range(k + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
    return row[0]


def zeta_at_negative(m: int) -> Fraction:
    """zeta(-m) for integer m >= 1, via zeta(1-k) = -B_k / k with k = m+1."""
    k = m + 1
    return -bernoulli(k) / k


@lru_cache(maxsize=None)
def _divisor_sums(power: int, count: int):
    sums = [0] * (count + 1)
    for d in range(1, count + 1):
        dp = d ** power
        for n in range(d, count + 1, d):
            sums[n] += dp
    return tuple(sums)


@lru_cache(maxsize=None)
def eisenstein(k: int, trunc: int = DEFAULT_TRUNC) -> QSeries:
    """E_k = 1 + (2 / zeta(1-k)) sum sigma_{k-1}(n) q^n for even k >= 2.

    k = 2 is the quasi-modular series 1 - 24 sum sigma_1(n) q^n; even
    k >= 4 are modular.
    """
    if k < 2 or k % 2:
        raise QSeriesError("Eisenstein index must be even and >= 2")
    factor = Fraction(2) / (-bernoulli(k) / k)
    nmax = (trunc - 1) // GRID
    sums = _divisor_sums(k - 1, nmax)
    coeffs = {0: Fraction(1)}
    for n in range(1, nmax + 1):
        coeffs[GRID * n] = factor * sums[n]
    env = Envelope(Fraction(2 * abs(factor.numerator), factor.denominator),
                   Fraction(k, 4))
    return QSeries(coeffs, trunc, env)


@lru_cache(maxsize=None)
def delta(trunc: int = DEFAULT_TRUNC) -> QSeries:
    """The discriminant form (E4^3 - E6^2) / 1728 = q - 24 q^2 + ..."""
    e4 = eisenstein(4, trunc)
    e6 = eisenstein(6, trunc)
    d = (e4 ** 3 - e6 ** 2) / 1728
    return d.with_envelope(_fit_envelope(d, Fraction(5)))


@lru_cache(maxsize=None)
def theta01(trunc: int = DEFAULT_TRUNC) -> QSeries:
    """Theta01 = sum_n (-1)^n q^(n^2/2): alternating-sign theta constant."""
    coeffs = {0: Fraction(1)}
    n = 1
    while 4 * n * n < trunc:
        coeffs[4 * n * n] = Fraction(2 if n % 2 == 0 else -2)
        n += 1
    return QSeries(coeffs, trunc, Envelope(Fraction(2), Fraction(1, 2)))


@lru_cache(maxsize=None)
def theta10(trunc: int = DEFAULT_TRUNC) -> QSeries:
    """Theta10 = sum_n q^((n+1/2)^2/2): exponents (2n+1)^2 on the grid."""
    coeffs = {}
    n = 0
    while (2 * n + 1) ** 2 < trunc:
        coeffs[(2 * n + 1) ** 2] = Fraction(2)
        n += 1
    return QSeries(coeffs, trunc, Envelope(Fraction(2), Fraction(1, 2)))


@lru_cache(maxsize=None)
def leech_theta(trunc: int = DEFAULT_TRUNC) -> QSeries:
    """E4^3 - 720 * Delta."""
    s = eisenstein(4, trunc) ** 3 - delta(trunc) * 720
    return s.with_envelope(_fit_envelope(s, Fraction(4)))


def named_form(name: str, trunc: int = DEFAULT_TRUNC) -> QSeries:
    table = {
        "delta": lambda: delta(trunc),
        "theta01": lambda: theta01(trunc),
        "theta10": lambda: theta10(trunc),
        "leech_theta": lambda: leech_theta(trunc),
        "e2": lambda: eisenstein(2, trunc),
        "e4": lambda: eisenstein(4, trunc),
        "e6": lambda: eisenstein(6, trunc),
        "psi8_plus": lambda: psi_forms(8, trunc)["psi_plus"],
        "psi8_minus": lambda: psi_forms(8, trunc)["psi_minus"],
        "psi24_plus": lambda: psi_forms(24, trunc)["psi_plus"],
        "psi24_minus": lambda: psi_forms(24, trunc)["psi_minus"],
    }
    key = name.lower()
    if key not in table:
        raise QSeriesError(f"unknown form {name!r}")
    return table[key]()


def _fit_envelope(series: QSeries, a: Fraction, margin=Fraction(3, 2)) -> Envelope:
    """Fit C with margin so |c_E| <= C exp(a sqrt(E)) on the computed range."""
    a = frac(a)
    best = mp.mpf(0)
    with mp.workdps(30):
        for e, c in series.coeffs.items():
            if e < 1:
                continue
            v = (abs(mp.mpf(c.numerator)) / c.denominator
                 * mp.exp(-mp.mpf(a.numerator) / a.denominator * mp.sqrt(e)))
            best = max(best, v)
    if best == 0:
        return Envelope(Fraction(1), a)
    c = frac(margin) * Fraction(float(best))
    return Envelope(c, a)


# ---------------------------------------------------------------------------
# The eigenfunction kernels
# ---------------------------------------------------------------------------

def _psi_envelope_scale(n: int) -> Fraction:
    # eta-quotient growth: 1/Delta^k coefficients grow ~ exp(sqrt(2k) pi sqrt(E/8))
    return Fraction(6) if n == 8 else Fraction(8)


@lru_cache(maxsize=None)
def psi_forms(n: int, trunc: int = DEFAULT_TRUNC) -> dict:
    """The plus/minus integral kernels for dimension n in {8, 24}.

    psi_plus is quasi-modular (it involves E2); psi_minus is modular for the
    theta group.  Both are Laurent series with finitely many negative
    exponents coming from the 1/Delta^k factor.
    """
    if n not in (8, 24):
        raise QSeriesError("dimension must be 8 or 24")
    e2, e4, e6 = (eisenstein(k, trunc) for k in (2, 4, 6))
    t01, t10 = theta01(trunc), theta10(trunc)
    dlt = delta(trunc)
    a = _psi_envelope_scale(n)
    if n == 8:
        plus = (e2 * e4 - e6) ** 2 / dlt
        minus = ((t01 ** 12) * (t10 ** 8) * 5
                 + (t01 ** 16) * (t10 ** 4) * 5
                 + (t01 ** 20) * 2) / dlt
    else:
        num_plus = (e4 ** 4 * 25 - e6 ** 2 * e4 * 49 + e6 * e4 ** 2 * e2 * 48
                    + e6 ** 2 * e2 ** 2 * 25 - e4 ** 3 * e2 ** 2 * 49)
        plus = num_plus / dlt ** 2
        minus = ((t01 ** 20) * (t10 ** 8) * 7
                 + (t01 ** 24) * (t10 ** 4) * 7
                 + (t01 ** 28) * 2) / dlt ** 2
    return {
        "psi_plus": plus.with_envelope(_fit_envelope(plus, a)),
        "psi_minus": minus.with_envelope(_fit_envelope(minus, a)),
    }


@lru_cache(maxsize=None)
def conjugate_psi_minus(n: int, trunc: int = DEFAULT_TRUNC) -> QSeries:
    """psi_minus with the theta constants swapped (its S-transform partner)."""
    t01, t10 = theta01(trunc), theta10(trunc)
    dlt = delta(trunc)
    a = _psi_envelope_scale(n)
    if n == 8:
        s = ((t10 ** 12) * (t01 ** 8) * 5
             + (t10 ** 16) * (t01 ** 4) * 5
             + (t10 ** 20) * 2) / dlt
    elif n == 24:
        s = ((t10 ** 20) * (t01 ** 8) * 7
             + (t10 ** 24) * (t01 ** 4) * 7
             + (t10 ** 28) * 2) / dlt ** 2
    else:
        raise QSeriesError("dimension must be 8 or 24")
    return s.with_envelope(_fit_envelope(s, a))


@dataclass(frozen=True)
class IntegrandTerm:
    """coefficient * z^z_power * series(z), coefficient = rat * pi^pi_pow * i^i_pow."""

    series: QSeries
    z_power: int
    rat: Fraction
    pi_pow: int = 0
    i_pow: int = 0

    def coefficient_mpc(self):
        c = mp.mpc(self.rat.numerator) / self.rat.denominator
        c *= mp.pi ** self.pi_pow
        c *= mp.mpc(0, 1) ** (self.i_pow % 4)
        return c


@lru_cache(maxsize=None)
def s_transform_terms(n: int, trunc: int = DEFAULT_TRUNC) -> dict:
    """Decompositions of the transformed kernels as finite sums of
    coefficient * z^m * (q-series in z), valid on the whole upper half plane.

    "psi_plus" expands psi_plus(-1/z) * z^(n/2-2) using the quasi-modular law
    E2(-1/z) = z^2 E2(z) - 6iz/pi together with the weight laws of E4, E6 and
    Delta;  "psi_minus" expands psi_minus(-1/z) via the theta swap
    Theta01(-1/z) = sqrt(z/i) Theta10(z), Theta10(-1/z) = sqrt(z/i) Theta01(z)
    and Delta(-1/z) = z^12 Delta(z).
    """
    if n not in (8, 24):
        raise QSeriesError("dimension must be 8 or 24")
    e2, e4, e6 = (eisenstein(k, trunc) for k in (2, 4, 6))
    dlt = delta(trunc)
    psi = psi_forms(n, trunc)
    a = _psi_envelope_scale(n)
    if n == 8:
        g1 = e4 * (e2 * e4 - e6) / dlt
        g2 = e4 ** 2 / dlt
        plus_terms = (
            IntegrandTerm(psi["psi_plus"], 2, Fraction(1)),
            # 2c z g1 with c = -6i/pi
            IntegrandTerm(g1.with_envelope(_fit_envelope(g1, a)), 1,
                          Fraction(-12), -1, 1),
            # c^2 g2 = -36/pi^2 g2
            IntegrandTerm(g2.with_envelope(_fit_envelope(g2, a)), 0,
                          Fraction(-36), -2, 0),
        )
    else:
        g1 = (e6 * e4 ** 2 * 48 + e6 ** 2 * e2 * 50 - e4 ** 3 * e2 * 98) / dlt ** 2
        g2 = (e6 ** 2 * 25 - e4 ** 3 * 49) / dlt ** 2
        plus_terms = (
            IntegrandTerm(psi["psi_plus"], 2, Fraction(1)),
            IntegrandTerm(g1.with_envelope(_fit_envelope(g1, a)), 1,
                          Fraction(-6), -1, 1),
            IntegrandTerm(g2.with_envelope(_fit_envelope(g2, a)), 0,
                          Fraction(-36), -2, 0),
        )
    minus_terms = (
        IntegrandTerm(conjugate_psi_minus(n, trunc), 2 - n // 2, Fraction(-1)),
    )
    return {"psi_plus": plus_terms, "psi_minus": minus_terms}


# ---------------------------------------------------------------------------
# Evaluation on the imaginary axis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalResult:
    value: object   # mpf
    error: object   # mpf upper bound on |true - value|

    def __float__(self):
        return float(self.value)


DEFAULT_T_MIN = Fraction(1, 2)


def evaluate_at_it(series: QSeries, t, dps: int = 30,
                   t_min=DEFAULT_T_MIN) -> EvalResult:
    """Evaluate the series at z = it (t > 0 real): sum c_E exp(-pi t E / 4).

    The reported error covers the truncation tail (from the series envelope)
    plus a crude working-precision guard.  Fails if t is below the validity
    floor or if the envelope cannot close the tail.
    """
    if frac(t) < frac(t_min):
        raise QSeriesError(f"t={t} below validity floor {t_min}")
    with mp.workdps(dps + 10):
        tv = mp.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) \
            else mp.mpf(t)
        x = mp.exp(-mp.pi * tv / 4)
        total = mp.mpf(0)
        abs_total = mp.mpf(0)
        for e, c in series.items():
            term = mp.mpf(c.numerator) / c.denominator * x ** e
            total += term
            abs_total += abs(term)
        if series.envelope is not None:
            series.envelope.check(series)
            tail = series.envelope.tail_bound(series.trunc, x)
        else:
            tail = mp.inf
        if not mp.isfinite(tail):
            raise QSeriesError("tail bound does not close at this t")
        guard = (abs_total + 1) * mp.mpf(10) ** (-dps - 5)
        return EvalResult(+total, +(tail + guard))


def evaluate_terms_at_it(terms, t, dps: int = 30):
    """Evaluate sum coeff * (it)^m * series(it) as a complex number."""
    with mp.workdps(dps + 10):
        z = mp.mpc(0, 1) * (mp.mpf(t.numerator) / t.denominator
                            if isinstance(t, Fraction) else mp.mpf(t))
        total = mp.mpc(0)
        err = mp.mpf(0)
        for term in terms:
            ev = evaluate_at_it(term.series, t, dps=dps)
            total += term.coefficient_mpc() * z ** term.z_power * ev.value
            err += abs(term.coefficient_mpc() * z ** term.z_power) * ev.error
        return total, err
