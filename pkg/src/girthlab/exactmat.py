"""Exact integer matrices and reduced words.

Everything here is arbitrary precision: the top-left entry of an
alternating product grows like (ab+1)^k and blows through 64 bits after a
handful of syllables, so no operation is allowed a fixed-width fast path.
All values are immutable and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterable, Optional, Sequence, Tuple


class ParameterError(ValueError):
    """A constructor argument is outside its documented domain."""


class ShapeError(ValueError):
    """Matrix shape unsupported by the requested operation."""


def binom_general(k: int, r: int) -> int:
    """Binomial coefficient C(k, r) for any integer k and r >= 0.

    Uses the falling-factorial definition k(k-1)...(k-r+1)/r!, which is the
    correct extension for negative k (e.g. C(-1, r) = (-1)^r) and reproduces
    the usual convention C(k, r) = 0 for 0 <= k < r.
    """
    if r < 0:
        raise ParameterError(f"lower index must be nonnegative, got {r}")
    num = 1
    for i in range(r):
        num *= k - i
    return num // factorial(r)


@dataclass(frozen=True)
class ExactMatrix:
    """Square matrix over the integers, stored as a tuple of row tuples."""

    n: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1 or len(self.entries) != self.n:
            raise ShapeError(f"expected {self.n} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != self.n:
                raise ShapeError("ragged rows in matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "ExactMatrix":
        return cls(len(rows), tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.n != other.n:
            raise ShapeError(f"dimension mismatch: {self.n} vs {other.n}")
        n = self.n
        a, b = self.entries, other.entries
        rows = tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return ExactMatrix(n, rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.n, tuple(zip(*self.entries)))

    def is_identity(self) -> bool:
        return all(
            self.entries[i][j] == (1 if i == j else 0)
            for i in range(self.n)
            for j in range(self.n)
        )

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        n = self.n
        m = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for r in range(k + 1, n):
                    if m[r][k] != 0:
                        m[k], m[r] = m[r], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def inverse(self) -> "ExactMatrix":
        """Inverse of a determinant +-1 integer matrix, via the adjugate."""
        d = self.det()
        if d not in (1, -1):
            raise ShapeError(f"matrix not invertible over Z (det={d})")
        n = self.n
        cof = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = ExactMatrix(
                    n - 1,
                    tuple(
                        tuple(self.entries[r][c] for c in range(n) if c != j)
                        for r in range(n)
                        if r != i
                    ),
                ) if n > 1 else None
                md = minor.det() if minor is not None else 1
                cof[j][i] = (-1) ** (i + j) * md * d
        return ExactMatrix.from_rows(cof)

    def magic_profile(self) -> Optional[Tuple[str, int]]:
        """("upper", a) or ("lower", b) if this is a magic matrix, else None.

        A magic matrix is unitriangular with one constant off-diagonal band
        right next to the diagonal and zeros everywhere else.
        """
        n = self.n
        if n < 2:
            return None
        for side in ("upper", "lower"):
            band = (
                self.entries[0][1] if side == "upper" else self.entries[1][0]
            )
            ok = True
            for i in range(n):
                for j in range(n):
                    d = j - i if side == "upper" else i - j
                    want = 1 if d == 0 else (band if d == 1 else 0)
                    if self.entries[i][j] != want:
                        ok = False
                        break
                if not ok:
                    break
            if ok and band != 0:
                return (side, band)
        return None


_LETTERS = ("X", "Y")


@dataclass(frozen=True)
class Word:
    """Reduced word over a two-letter alphabet with signed integer exponents.

    Stored in syllable form: ``(("X", 2), ("Y", -3))`` means X^2 Y^-3.
    Adjacent syllables always carry distinct letters and no exponent is zero,
    so a power like X^(10^6) costs one syllable, which is what keeps long
    powers cheap in the girth machinery.
    """

    syllables: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        prev = None
        for letter, exp in self.syllables:
            if letter not in _LETTERS:
                raise ParameterError(f"unknown letter {letter!r}")
            if exp == 0:
                raise ParameterError("zero exponent in reduced word")
            if letter == prev:
                raise ParameterError("adjacent syllables share a letter; use Word.of")
            prev = letter

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, int]]) -> "Word":
        """Build a Word, merging adjacent same-letter syllables and dropping zeros."""
        out: list = []
        for letter, exp in pairs:
            exp = int(exp)
            if exp == 0:
                continue
            if out and out[-1][0] == letter:
                merged = out[-1][1] + exp
                out.pop()
                if merged != 0:
                    out.append((letter, merged))
            else:
                out.append((letter, exp))
        return cls(tuple(out))

    @property
    def length(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def inverse(self) -> "Word":
        return Word(tuple((letter, -exp) for letter, exp in reversed(self.syllables)))

    def __mul__(self, other: "Word") -> "Word":
        return Word.of(self.syllables + other.syllables)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        parts = []
        for letter, exp in self.syllables:
            parts.append(letter if exp == 1 else f"{letter}^{exp}")
        return " ".join(parts)


def magic_pair(n: int, a: int, b: int, *, allow_small: bool = False) -> Tuple[ExactMatrix, ExactMatrix]:
    """The unitriangular generator pair: A with superdiagonal a, B with subdiagonal b.

    The freeness guarantees assume a, b >= 2, so smaller values are rejected
    unless allow_small is set (the non-freeness scans deliberately probe
    a = b = 1).
    """
    if n < 2:
        raise ParameterError(f"dimension must be >= 2, got {n}")
    floor = 1 if allow_small else 2
    if a < floor or b < floor:
        raise ParameterError(
            f"band values must be >= {floor}, got a={a}, b={b}"
            + ("" if allow_small else " (freeness statements assume a,b >= 2)")
        )
    A = ExactMatrix(
        n,
        tuple(
            tuple(1 if i == j else (a if j == i + 1 else 0) for j in range(n))
            for i in range(n)
        ),
    )
    B = ExactMatrix(
        n,
        tuple(
            tuple(1 if i == j else (b if i == j + 1 else 0) for j in range(n))
            for i in range(n)
        ),
    )
    return A, B


def power_closed_form(M: ExactMatrix, k: int) -> ExactMatrix:
    """M^k for a magic matrix M, in closed form.

    Entry (i, j) of the k-th power of an upper magic matrix is
    C(k, j-i) * a^(j-i); the lower case is the transpose pattern.  Negative
    k uses the generalized binomial, which agrees with the explicit inverse.
    """
    profile = M.magic_profile()
    if profile is None:
        raise ShapeError("closed-form powers require a magic (unitriangular banded) matrix")
    side, band = profile
    n = M.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            d = j - i if side == "upper" else i - j
            row.append(binom_general(k, d) * band**d if d >= 0 else 0)
        rows.append(tuple(row))
    return ExactMatrix(n, tuple(rows))


def matrix_power(M: ExactMatrix, k: int) -> ExactMatrix:
    """M^k for any invertible integer matrix; closed form when M is magic."""
    if M.magic_profile() is not None:
        return power_closed_form(M, k)
    if k < 0:
        return matrix_power(M.inverse(), -k)
    result = ExactMatrix.identity(M.n)
    base = M
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def eval_word(w: Word, X: ExactMatrix, Y: ExactMatrix) -> ExactMatrix:
    """Evaluate a reduced word at the pair (X, Y) over the integers."""
    if X.n != Y.n:
        raise ShapeError(f"dimension mismatch: {X.n} vs {Y.n}")
    gens = {"X": X, "Y": Y}
    result = ExactMatrix.identity(X.n)
    for letter, exp in w.syllables:
        result = result @ matrix_power(gens[letter], exp)
    return result


def entry_growth_bound(w: Word, a: int, b: int) -> Tuple[int, int]:
    """(actual, bound) for the top-left entry of an alternating 2x2 word.

    The word must be a full alternation X^{l_1} Y^{m_1} ... X^{l_k} Y^{m_k};
    the bound is M^(2k) (ab+1)^k with M the largest |exponent|.  The contract
    actual <= bound is what turns a mod-p collision into a length lower bound.
    """
    syl = w.syllables
    if not syl or len(syl) % 2 != 0:
        raise ParameterError("word must consist of full X,Y syllable pairs")
    for idx, (letter, _) in enumerate(syl):
        if letter != ("X" if idx % 2 == 0 else "Y"):
            raise ParameterError("word must alternate X, Y, X, Y, ...")
    k = len(syl) // 2
    big_m = max(abs(e) for _, e in syl)
    A, B = magic_pair(2, a, b)
    actual = abs(eval_word(w, A, B)[0, 0])
    bound = big_m ** (2 * k) * (a * b + 1) ** k
    return actual, bound
