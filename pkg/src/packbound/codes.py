"""Binary linear codes: the length-8 Hamming code, the extended binary Golay
code, weight enumeration, duality.

Codewords are stored as machine integers (bit i = coordinate i, i < length),
so full enumeration of a dimension-k code walks 2^k XOR combinations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

MAX_ENUM_DIMENSION = 24


class CodeError(ValueError):
    pass


def _bits_from_string(s: str) -> int:
    word = 0
    for i, ch in enumerate(s):
        if ch == "1":
            word |= 1 << i
        elif ch != "0":
            raise CodeError(f"bad bit {ch!r}")
    return word


def _string_from_bits(word: int, n: int) -> str:
    return "".join("1" if word >> i & 1 else "0" for i in range(n))


def _f2_rank(rows, n):
    basis = {}
    for row in rows:
        cur = row
        while cur:
            top = cur.bit_length() - 1
            if top in basis:
                cur ^= basis[top]
            else:
                basis[top] = cur
                break
    return len(basis)


@dataclass(frozen=True)
class BinaryCode:
    """A binary linear [n, k] code given by k independent generator rows."""

    length: int
    dimension: int
    generator: tuple

    def __post_init__(self):
        if not (1 <= self.length <= 64):
            raise CodeError("length out of range")
        if not (0 <= self.dimension <= self.length):
            raise CodeError("dimension out of range")
        if len(self.generator) != self.dimension:
            raise CodeError("generator row count != dimension")
        mask = (1 << self.length) - 1
        for row in self.generator:
            if row & ~mask:
                raise CodeError("generator row exceeds length")
        if _f2_rank(self.generator, self.length) != self.dimension:
            raise CodeError("generator rows not independent over F2")

    def codewords(self):
        """Yield all 2^k codewords (dimension capped for enumeration)."""
        if self.dimension > MAX_ENUM_DIMENSION:
            raise CodeError("dimension too large to enumerate")
        k = self.dimension
        for m in range(1 << k):
            w = 0
            mm = m
            i = 0
            while mm:
                if mm & 1:
                    w ^= self.generator[i]
                mm >>= 1
                i += 1
            yield w

    def contains(self, word: int) -> bool:
        # echelon basis keyed by highest set bit, then reduce the word
        basis = {}
        for row in self.generator:
            cur = row
            while cur:
                top = cur.bit_length() - 1
                if top in basis:
                    cur ^= basis[top]
                else:
                    basis[top] = cur
                    break
        cur = word
        while cur:
            top = cur.bit_length() - 1
            if top not in basis:
                return False
            cur ^= basis[top]
        return True

    def generator_strings(self):
        return [_string_from_bits(row, self.length) for row in self.generator]

    def to_json(self) -> str:
        return json.dumps(
            {"length": self.length, "dimension": self.dimension,
             "generator": self.generator_strings()},
            sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "BinaryCode":
        obj = json.loads(text)
        rows = tuple(_bits_from_string(s) for s in obj["generator"])
        return BinaryCode(obj["length"], obj["dimension"], rows)


@dataclass(frozen=True)
class WeightEnumerator:
    counts: tuple  # sorted tuple of (weight, count)

    def as_dict(self):
        return dict(self.counts)

    def total(self):
        return sum(c for _, c in self.counts)


# Generator matrices in (I | A) block form.  The right blocks come from the
# vertex adjacency of the tetrahedron (Hamming) and the complemented
# adjacency J - A of the icosahedron (Golay).

_HAMMING8_ROWS = [
    "1000" "0111",
    "0100" "1011",
    "0010" "1101",
    "0001" "1110",
]

_GOLAY24_ROWS = [
    "100000000000" "100000111111",
    "010000000000" "010110001111",
    "001000000000" "001011100111",
    "000100000000" "010101110011",
    "000010000000" "011010111001",
    "000001000000" "001101011101",
    "000000100000" "101110101100",
    "000000010000" "100111010110",
    "000000001000" "110011101010",
    "000000000100" "111001110100",
    "000000000010" "111100011010",
    "000000000001" "111111000001",
]


def hamming8() -> BinaryCode:
    rows = tuple(_bits_from_string(s) for s in _HAMMING8_ROWS)
    return BinaryCode(8, 4, rows)


def golay24() -> BinaryCode:
    rows = tuple(_bits_from_string(s) for s in _GOLAY24_ROWS)
    return BinaryCode(24, 12, rows)


def zero_code(n: int) -> BinaryCode:
    """The trivial code {0} of length n."""
    return BinaryCode(n, 0, ())


def weight_enumerator(code: BinaryCode) -> WeightEnumerator:
    """Exact weight census by full enumeration of the 2^k codewords."""
    counts = {}
    for w in code.codewords():
        wt = bin(w).count("1")
        counts[wt] = counts.get(wt, 0) + 1
    return WeightEnumerator(tuple(sorted(counts.items())))


def dual_code(code: BinaryCode) -> BinaryCode:
    """Generator of {y : x.y = 0 mod 2 for all codewords x}; dimension n-k."""
    n = code.length
    # nullspace of the generator matrix over F2, computed by eliminating
    # the k x n system row-reduced to pivot/free columns
    rows = list(code.generator)
    pivots = []
    reduced = []
    for row in rows:
        cur = row
        for p, r in zip(pivots, reduced):
            if cur >> p & 1:
                cur ^= r
        if cur == 0:
            continue
        p = min(i for i in range(n) if cur >> i & 1)
        for j, (pj, rj) in enumerate(zip(pivots, reduced)):
            if rj >> p & 1:
                reduced[j] = rj ^ cur
        pivots.append(p)
        reduced.append(cur)
    free_cols = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free_cols:
        y = 1 << f
        for p, r in zip(pivots, reduced):
            # parity of row r restricted to free column f plus pivot solve
            if r >> f & 1:
                y |= 1 << p
        basis.append(y)
    return BinaryCode(n, n - code.dimension, tuple(basis))


def same_code(a: BinaryCode, b: BinaryCode) -> bool:
    """Equality of codeword sets."""
    if a.length != b.length or a.dimension != b.dimension:
        return False
    return all(b.contains(row) for row in a.generator)


def code_properties(code: BinaryCode) -> dict:
    """self_dual: equals its dual as a set; doubly_even: 4 | every weight."""
    wts = weight_enumerator(code).as_dict()
    doubly_even = all(w % 4 == 0 for w in wts)
    self_dual = same_code(code, dual_code(code))
    return {"self_dual": self_dual, "doubly_even": doubly_even}
