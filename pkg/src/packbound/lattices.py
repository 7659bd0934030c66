"""Exact lattice constructions: Z^n, the Construction-A lifts of the Hamming
and Golay codes (E8 and L24), and the Leech lattice, together with
covolume/density bookkeeping and exact vector counts by squared length.

Conventions
-----------
A lattice is stored as an integer matrix ``scaled_basis`` whose rows, scaled
by ``2**(-scale_exp/2)``, form a basis of the true lattice.  The Gram matrix
of the true basis is therefore the exact rational matrix
``scaled_basis @ scaled_basis.T / 2**scale_exp``.  All lattices built here
live in a dyadic frame, so duals stay representable.

Vector counting never lists vectors: counts by squared length are extracted
from per-coordinate generating polynomials, with cosets of Construction-A
lattices grouped by codeword weight (the per-coordinate factors depend only
on the codeword bit).  The Leech count additionally tracks the coordinate sum
mod 8, which encodes the two glue conditions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .codes import BinaryCode, golay24, hamming8, weight_enumerator
from .exact import (
    frac, hermite_row_basis, mat_det, mat_identity, mat_inverse,
    mat_is_integral, mat_mul, mat_transpose, sqrt_decompose,
)


class LatticeError(ValueError):
    pass


class EnumerationBudgetError(LatticeError):
    pass


# ---------------------------------------------------------------------------
# Symbolic volumes: rational * sqrt(radicand) * pi^(p/2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicVolume:
    """Exact constant of the form coefficient * sqrt(radicand) * pi^pi_power.

    ``radicand`` is a squarefree positive integer, ``pi_power`` a half-integer
    stored as a Fraction.
    """

    coefficient: Fraction
    pi_power: Fraction = Fraction(0)
    radicand: int = 1

    @staticmethod
    def of(value) -> "SymbolicVolume":
        return SymbolicVolume(frac(value))

    @staticmethod
    def from_sqrt(value) -> "SymbolicVolume":
        c, r = sqrt_decompose(frac(value))
        return SymbolicVolume(c, Fraction(0), r)

    def __mul__(self, other):
        if not isinstance(other, SymbolicVolume):
            other = SymbolicVolume.of(other)
        c = self.coefficient * other.coefficient
        rad = self.radicand * other.radicand
        extra, rad2 = sqrt_decompose(Fraction(rad))
        return SymbolicVolume(c * extra, self.pi_power + other.pi_power, rad2)

    def __truediv__(self, other):
        if not isinstance(other, SymbolicVolume):
            other = SymbolicVolume.of(other)
        if other.coefficient == 0:
            raise ZeroDivisionError
        inv = SymbolicVolume(
            1 / (other.coefficient * other.radicand),
            -other.pi_power, other.radicand)
        return self * inv

    def is_rational(self) -> bool:
        return self.pi_power == 0 and self.radicand == 1

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise LatticeError(f"{self} is not rational")
        return self.coefficient

    def to_float(self) -> float:
        return (float(self.coefficient) * math.sqrt(self.radicand)
                * math.pi ** float(self.pi_power))

    def __str__(self):
        parts = []
        c = self.coefficient
        if self.radicand != 1:
            parts.append(f"sqrt({self.radicand})")
        if self.pi_power != 0:
            p = self.pi_power
            parts.append("pi" if p == 1 else f"pi^{p}")
        if not parts:
            return str(c)
        body = "*".join(parts)
        if c == 1:
            return body
        if c.denominator == 1:
            return f"{c.numerator}*{body}"
        if c.numerator == 1:
            return f"{body}/{c.denominator}"
        return f"{c.numerator}*{body}/{c.denominator}"


def gamma_int_or_half(two_x: int) -> SymbolicVolume:
    """Gamma(two_x / 2) by the recurrence from Gamma(1)=1, Gamma(1/2)=sqrt(pi)."""
    if two_x <= 0:
        raise LatticeError("Gamma argument must be positive")
    if two_x % 2 == 0:
        k = two_x // 2
        return SymbolicVolume.of(math.factorial(k - 1))
    # Gamma(m + 1/2) = (2m-1)!! / 2^m * sqrt(pi)
    m = (two_x - 1) // 2
    dd = 1
    for j in range(1, 2 * m, 2):
        dd *= j
    return SymbolicVolume(Fraction(dd, 2 ** m), Fraction(1, 2))


def ball_volume(n: int, sq_radius) -> SymbolicVolume:
    """Exact volume of the n-ball with squared radius sq_radius."""
    if n < 1:
        raise LatticeError("dimension must be >= 1")
    sq_radius = frac(sq_radius)
    radius_pow = SymbolicVolume.from_sqrt(sq_radius ** n)
    pi_pow = SymbolicVolume(Fraction(1), Fraction(n, 2))
    return radius_pow * pi_pow / gamma_int_or_half(n + 2)


# ---------------------------------------------------------------------------
# Lattice descriptions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeDescription:
    dimension: int
    scale_exp: int
    scaled_basis: tuple  # rows of ints; true basis = rows * 2^(-scale_exp/2)
    gram: tuple          # rows of Fractions
    name: str = ""
    counting: tuple = ("generic",)
    metadata: dict = field(default_factory=dict, compare=False)

    def true_gram_det(self) -> Fraction:
        return mat_det([list(r) for r in self.gram])

    def norm_quantum(self) -> Fraction:
        """Rational g with every squared vector length in g*Z."""
        vals = []
        for i in range(self.dimension):
            vals.append(self.gram[i][i])
            for j in range(i + 1, self.dimension):
                vals.append(2 * self.gram[i][j])
        # rational gcd: gcd(a/b, c/d) = gcd(a*d, c*b)/(b*d), kept reduced
        g = Fraction(0)
        for v in vals:
            v = abs(frac(v))
            if v == 0:
                continue
            if g == 0:
                g = v
            else:
                g = Fraction(math.gcd(g.numerator * v.denominator,
                                      v.numerator * g.denominator),
                             g.denominator * v.denominator)
        return g if g else Fraction(1)

    def to_json(self) -> str:
        return json.dumps({
            "dimension": self.dimension,
            "scale_exponent": self.scale_exp,
            "scaled_basis": [list(r) for r in self.scaled_basis],
            "gram": [[str(x) for x in row] for row in self.gram],
        }, sort_keys=True)


def _make_lattice(rows, scale_exp, name="", counting=("generic",), metadata=None):
    n = len(rows)
    rows = tuple(tuple(int(x) for x in r) for r in rows)
    two_s = 2 ** scale_exp
    gram = tuple(
        tuple(Fraction(sum(rows[i][k] * rows[j][k] for k in range(n)), two_s)
              for j in range(n))
        for i in range(n))
    det = mat_det([list(r) for r in gram])
    if det <= 0:
        raise LatticeError("degenerate basis")
    return LatticeDescription(n, scale_exp, rows, gram, name=name,
                              counting=counting, metadata=metadata or {})


@dataclass(frozen=True)
class NormCountTable:
    counts: tuple  # sorted tuple of (Fraction sq_norm, int count)
    max_norm: Fraction

    def as_dict(self):
        return dict(self.counts)

    def count(self, sq_norm) -> int:
        return self.as_dict().get(frac(sq_norm), 0)

    def to_csv(self) -> str:
        lines = ["sq_norm,count"]
        for v, c in self.counts:
            lines.append(f"{v},{c}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def construction_a(code: BinaryCode, name="") -> LatticeDescription:
    """Lift a binary code: {x / sqrt(2) : x in Z^n, x mod 2 in code}."""
    n = code.length
    if n > 24:
        raise LatticeError("construction A limited to n <= 24 here")
    gens = []
    for row in code.generator:
        gens.append([(row >> i) & 1 for i in range(n)])
    for i in range(n):
        gens.append([2 * int(i == j) for j in range(n)])
    basis = hermite_row_basis(gens)
    if len(basis) != n:
        raise LatticeError("degenerate generator")
    return _make_lattice(basis, 1, name=name, counting=("construction_a", code))


def _leech_candidate_shift(s_shift: int):
    """Shift vector (1,...,1) * 2^(-s_shift/2) expressed in the w-frame
    (w = 2*sqrt(2) * true coordinates); None if not integral there."""
    # w-coordinates of the shift are 2^((3 - s_shift)/2) * (1,...,1)
    e = 3 - s_shift
    if e < 0 or e % 2 == 1:
        return None
    return 2 ** (e // 2)


def _build_leech_from_shift(shift_scale: int) -> LatticeDescription:
    """Z-span of the even-sum sublattice of L24 and the glued vector
    u = shift_scale*(1,...,1) + 4*e1, in the w = 2*sqrt(2)*x frame.

    The span is the even part {w = 2c mod 4, sum(w) = 0 mod 8} glued with
    u (index 2: 2u lands back in the even part for every integer scale).
    """
    code = golay24()
    n = 24
    gens = []
    for row in code.generator:
        gens.append([2 * ((row >> i) & 1) for i in range(n)])
    for j in range(1, n):
        g = [0] * n
        g[0], g[j] = 4, -4
        gens.append(g)
    g = [0] * n
    g[0] = 8
    gens.append(g)
    u = [shift_scale] * n
    u[0] += 4
    gens.append(u)
    basis = hermite_row_basis(gens)
    if len(basis) != n:
        raise LatticeError("Leech candidate basis degenerate")
    return _make_lattice(basis, 3, name="leech",
                         counting=("leech_glue", shift_scale),
                         metadata={"shift_scale_exp": None})


def _validate_leech(lat: LatticeDescription):
    props = lattice_properties(lat)
    failures = []
    if not props["even"]:
        failures.append("not even")
    if not props["unimodular"]:
        failures.append("not unimodular")
    if props["min_sq_norm"] != 2 * 2:
        failures.append(f"min squared length {props['min_sq_norm']} != 4")
    if props["kissing"] != 196560:
        failures.append(f"kissing {props['kissing']} != 196560")
    return failures


_LATTICE_CACHE = {}


def standard_lattice(name: str, n: int = None) -> LatticeDescription:
    """Named lattices: zn(n), e8, l24, leech."""
    key = (name, n)
    if key in _LATTICE_CACHE:
        return _LATTICE_CACHE[key]
    if name == "zn":
        if not n or n < 1:
            raise LatticeError("zn requires a dimension")
        lat = _make_lattice(mat_identity(n), 0, name=f"z{n}",
                            counting=("diagonal",))
    elif name == "e8":
        lat = construction_a(hamming8(), name="e8")
    elif name == "l24":
        lat = construction_a(golay24(), name="l24")
    elif name == "leech":
        # The glue vector (1,...,1) has no canonical scale; accept the unique
        # candidate 2^(-s/2) producing an even unimodular lattice with
        # minimum 4 and kissing number 196560.
        accepted = None
        report = {}
        for s_shift in (0, 1, 2, 3):
            scale = _leech_candidate_shift(s_shift)
            if scale is None:
                report[s_shift] = ["shift not in the dyadic frame"]
                continue
            cand = _build_leech_from_shift(scale)
            failures = _validate_leech(cand)
            report[s_shift] = failures
            if not failures:
                if accepted is not None:
                    raise LatticeError("multiple Leech scalings validate")
                accepted = (s_shift, cand)
        if accepted is None:
            raise LatticeError(f"no Leech scaling validates: {report}")
        s_shift, lat = accepted
        lat.metadata["shift_scale_exp"] = s_shift
        lat.metadata["scaling_report"] = {k: v for k, v in report.items()}
    else:
        raise LatticeError(f"unknown lattice {name!r}")
    _LATTICE_CACHE[key] = lat
    return lat


# ---------------------------------------------------------------------------
# Covolume, dual, density
# ---------------------------------------------------------------------------

def covolume(lat: LatticeDescription) -> SymbolicVolume:
    """sqrt(det(gram)), exact (rational times a square root)."""
    return SymbolicVolume.from_sqrt(lat.true_gram_det())


def dual_lattice(lat: LatticeDescription) -> LatticeDescription:
    """Inverse-transpose basis; covolume(dual) * covolume(lat) = 1."""
    s = lat.scale_exp
    inv_t = mat_transpose(mat_inverse([list(r) for r in lat.scaled_basis]))
    # dual true basis = inv_t * 2^(s/2); find minimal s' >= 0 of the same
    # parity with inv_t * 2^((s+s')/2) integral
    for s_dual in range(s % 2, s % 2 + 65, 2):
        scale = 2 ** ((s + s_dual) // 2)
        scaled = [[x * scale for x in row] for row in inv_t]
        if mat_is_integral(scaled):
            rows = [[int(x) for x in row] for row in scaled]
            return _make_lattice(rows, s_dual, name=f"{lat.name}*" if lat.name else "")
    raise LatticeError("dual not representable in a dyadic frame")


def density(lat: LatticeDescription) -> SymbolicVolume:
    """Ball of radius r1/2 over the covolume."""
    props = lattice_properties(lat)
    r1_sq = props["min_sq_norm"]
    return ball_volume(lat.dimension, frac(r1_sq) / 4) / covolume(lat)


# ---------------------------------------------------------------------------
# Vector counting
# ---------------------------------------------------------------------------

def _poly_mul_trunc(a, b, limit):
    out = [0] * limit
    for i, x in enumerate(a):
        if x == 0:
            continue
        jmax = limit - i
        for j, y in enumerate(b[:jmax]):
            if y != 0:
                out[i + j] += x * y
    return out


def _coordinate_poly(residue: int, modulus: int, sq_limit: int):
    """Generating polynomial of {m in residue + modulus*Z}: sum y^(m^2)."""
    out = [0] * (sq_limit + 1)
    m = residue
    while m * m <= sq_limit:
        out[m * m] += 1
        m += modulus
    m = residue - modulus
    while m * m <= sq_limit:
        out[m * m] += 1
        m -= modulus
    return out


def _count_construction_a(code: BinaryCode, max_norm: Fraction):
    """Counts by squared length for the Construction-A lift of ``code``.

    Vectors are x/sqrt(2), so squared length x.x/2; cosets are grouped by
    codeword weight since the per-coordinate factor depends only on the bit.
    """
    n = code.length
    x_limit = int(2 * max_norm)  # x.x <= 2 * max_norm
    even = _coordinate_poly(0, 2, x_limit)
    odd = _coordinate_poly(1, 2, x_limit)
    weights = weight_enumerator(code).as_dict()
    total = [0] * (x_limit + 1)
    for w, mult in weights.items():
        acc = [1] + [0] * x_limit
        for _ in range(w):
            acc = _poly_mul_trunc(acc, odd, x_limit + 1)
        for _ in range(n - w):
            acc = _poly_mul_trunc(acc, even, x_limit + 1)
        for e, cval in enumerate(acc):
            total[e] += mult * cval
    counts = {}
    for e, cval in enumerate(total):
        counts[Fraction(e, 2)] = counts.get(Fraction(e, 2), 0) + cval
    return counts


def _leech_coordinate_factor(residue4: int, sq_limit: int):
    """(m^2, m mod 8) multiset for m in residue4 + 4Z, m^2 <= sq_limit."""
    out = {}
    m = residue4
    while m * m <= sq_limit:
        key = (m * m, m % 8)
        out[key] = out.get(key, 0) + 1
        m += 4
    m = residue4 - 4
    while m * m <= sq_limit:
        key = (m * m, m % 8)
        out[key] = out.get(key, 0) + 1
        m -= 4
    return out


def _count_leech_glue(shift_scale: int, max_norm: Fraction):
    """Counts by squared length for the glued lattice built by
    ``_build_leech_from_shift`` in the w-frame (squared length = w.w / 8).

    Part one is the even-sum part {w = 2c mod 4, sum(w) = 0 mod 8}; part two
    is its glue coset {w = shift*(1,..,1) + 2c mod 4,
    sum(w) = 24*shift + 4 mod 8}.  ``shift_scale`` = 1 gives the Leech
    lattice; 2 gives back the plain Golay lift.
    """
    w_limit = int(8 * max_norm)
    weights = weight_enumerator(golay24()).as_dict()
    counts = {}

    def run_part(res_bit0, res_bit1, target_mod8):
        f0 = _leech_coordinate_factor(res_bit0 % 4, w_limit)
        f1 = _leech_coordinate_factor(res_bit1 % 4, w_limit)
        for w, mult in weights.items():
            state = {(0, 0): 1}
            for _ in range(w):
                state = _apply_leech_factor(state, f1, w_limit)
            for _ in range(24 - w):
                state = _apply_leech_factor(state, f0, w_limit)
            for (e, s8), cval in state.items():
                if s8 == target_mod8:
                    key = Fraction(e, 8)
                    counts[key] = counts.get(key, 0) + mult * cval

    run_part(0, 2, 0)
    run_part(shift_scale, shift_scale + 2, (24 * shift_scale + 4) % 8)
    return counts


def _apply_leech_factor(state, factor, w_limit):
    out = {}
    for (e, s8), cval in state.items():
        for (de, dm), fcnt in factor.items():
            e2 = e + de
            if e2 > w_limit:
                continue
            key = (e2, (s8 + dm) % 8)
            out[key] = out.get(key, 0) + cval * fcnt
    return out


def _count_diagonal(lat: LatticeDescription, max_norm: Fraction):
    """Counts for a lattice with diagonal Gram matrix."""
    n = lat.dimension
    diag = [frac(lat.gram[i][i]) for i in range(n)]
    den = 1
    for d in diag:
        den = den * d.denominator // math.gcd(den, d.denominator)
    limit = int(max_norm * den)
    total = [1] + [0] * limit
    for d in diag:
        step = int(d * den)
        poly = [0] * (limit + 1)
        m = 0
        while m * m * step <= limit:
            poly[m * m * step] += 1 if m == 0 else 2
            m += 1
        total = _poly_mul_trunc(total, poly, limit + 1)
    return {Fraction(e, den): cval for e, cval in enumerate(total)}


def _count_generic(lat: LatticeDescription, max_norm: Fraction):
    """Recursive enumeration with exact norm checks (small dimensions)."""
    n = lat.dimension
    if n > 8:
        raise EnumerationBudgetError("generic enumeration limited to dim <= 8")
    gram = [[frac(x) for x in row] for row in lat.gram]
    # exact LDL^T: gram = L D L^T with unit lower-triangular L
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = gram[i][i] - sum(mu[i][k] ** 2 * d[k] for k in range(i))
        if d[i] <= 0:
            raise LatticeError("gram not positive definite")
        mu[i][i] = Fraction(1)
        for j in range(i + 1, n):
            mu[j][i] = (gram[j][i] - sum(mu[j][k] * mu[i][k] * d[k]
                                         for k in range(i))) / d[i]
    counts = {}

    def rec(level, remaining, shift_terms, coords):
        if level < 0:
            norm = max_norm - remaining
            counts[norm] = counts.get(norm, 0) + 1
            return
        shift = sum(mu[j][level] * coords[j] for j in range(level + 1, n))
        bound = remaining / d[level]
        fb = math.isqrt(int(bound)) + 2
        lo = int(math.floor(-float(shift))) - fb
        hi = int(math.ceil(-float(shift))) + fb
        for c in range(lo, hi + 1):
            contrib = d[level] * (c + shift) ** 2
            if contrib <= remaining:
                coords[level] = c
                rec(level - 1, remaining - contrib, None, coords)
        coords[level] = 0

    rec(n - 1, frac(max_norm), None, [0] * n)
    return counts


def vectors_by_norm(lat: LatticeDescription, max_sq_norm,
                    budget=Fraction(64)) -> NormCountTable:
    """Exact counts of lattice vectors with squared length <= max_sq_norm.

    The table carries a row for every multiple of the norm quantum up to the
    cutoff, including zero counts.
    """
    max_norm = frac(max_sq_norm)
    if max_norm > budget:
        raise EnumerationBudgetError(
            f"cutoff {max_norm} exceeds enumeration budget {budget}")
    if lat.dimension > 24:
        raise EnumerationBudgetError("dimension too large")
    scheme = lat.counting[0]
    if scheme == "construction_a":
        raw = _count_construction_a(lat.counting[1], max_norm)
    elif scheme == "leech_glue":
        raw = _count_leech_glue(lat.counting[1], max_norm)
    elif scheme == "diagonal":
        raw = _count_diagonal(lat, max_norm)
    else:
        raw = _count_generic(lat, max_norm)
    quantum = lat.norm_quantum()
    counts = []
    v = Fraction(0)
    while v <= max_norm:
        counts.append((v, raw.get(v, 0)))
        v += quantum
    extra = {k: c for k, c in raw.items() if c and k % quantum != 0}
    if extra:
        raise LatticeError(f"counts off the norm grid: {extra}")
    return NormCountTable(tuple(counts), max_norm)


def lattice_properties(lat: LatticeDescription) -> dict:
    """even / unimodular flags plus minimum squared norm and kissing number."""
    n = lat.dimension
    even = (mat_is_integral(lat.gram)
            and all(frac(lat.gram[i][i]) % 2 == 0 for i in range(n)))
    unimodular = False
    if lat.true_gram_det() == 1:
        dual = dual_lattice(lat)
        if (dual.scale_exp - lat.scale_exp) % 2 == 0:
            shift = (lat.scale_exp - dual.scale_exp) // 2
            m = mat_mul([list(r) for r in dual.scaled_basis],
                        mat_inverse([list(r) for r in lat.scaled_basis]))
            m = [[x * Fraction(2 ** max(shift, 0), 2 ** max(-shift, 0))
                  for x in row] for row in m]
            unimodular = mat_is_integral(m) and abs(mat_det(m)) == 1
    # some basis vector realizes the smallest diagonal entry, so the minimum
    # is found within that cutoff
    cutoff = min(frac(lat.gram[i][i]) for i in range(n))
    table = vectors_by_norm(lat, cutoff)
    nonzero = [(v, c) for v, c in table.counts if v > 0 and c > 0]
    min_norm, kissing = nonzero[0]
    return {"even": even, "unimodular": unimodular,
            "min_sq_norm": min_norm, "kissing": kissing}


def theta_coefficients(lat: LatticeDescription, max_index: int, budget=Fraction(64)):
    """Counts n(r) of vectors with x.x = 2r for r = 0..max_index."""
    table = vectors_by_norm(lat, 2 * max_index, budget=budget)
    return [table.count(Fraction(2 * r)) for r in range(max_index + 1)]
