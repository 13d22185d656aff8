"""Exact linear algebra over GF(2) and enumeration of per-equation local solution sets.

Systems are stored multiplicatively: a sign vector x in {+1,-1}^n satisfies
equation i when the product of x_j over the support V_i equals (-1)^(b_i).
Rows are bit-packed into Python ints, so elimination is exact and reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Optional

from .errors import BudgetError, ValidationError, VerificationError

SignVector = tuple  # entries in {+1, -1}, length n

MAX_SUPPORT_ENUMERATION = 20


@dataclass(frozen=True)
class BinaryLinearSystem:
    """An m x n linear system over GF(2) given by per-equation supports and right-hand bits."""

    m: int
    n: int
    rows: tuple  # tuple of frozensets of 1-based variable indices
    b: tuple      # tuple of bits (0 or 1)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValidationError("system needs at least one equation and one variable")
        if len(self.rows) != self.m or len(self.b) != self.m:
            raise ValidationError("rows/b length must equal m")
        object.__setattr__(self, "rows", tuple(frozenset(r) for r in self.rows))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        for i, support in enumerate(self.rows, start=1):
            if not support:
                raise ValidationError(f"equation {i} has empty support")
            for j in support:
                if not isinstance(j, int) or not 1 <= j <= self.n:
                    raise ValidationError(f"equation {i}: variable index {j!r} out of range 1..{self.n}")
        for i, bit in enumerate(self.b, start=1):
            if bit not in (0, 1):
                raise ValidationError(f"b[{i}] must be 0 or 1")

    @property
    def untouched_variables(self) -> frozenset:
        """Variables that appear in no equation (all-zero columns of A)."""
        touched = frozenset().union(*self.rows)
        return frozenset(range(1, self.n + 1)) - touched

    @property
    def covers_all_columns(self) -> bool:
        """True when every column of A has a nonzero entry; conversions between
        representations and strategies require this and refuse otherwise."""
        return not self.untouched_variables

    def row_mask(self, i: int) -> int:
        """Bitmask of equation i's support, bit j-1 for variable j."""
        self._check_index(i)
        mask = 0
        for j in self.rows[i - 1]:
            mask |= 1 << (j - 1)
        return mask

    def equation_holds(self, i: int, x: SignVector) -> bool:
        """Whether the sign vector x satisfies equation i."""
        self._check_index(i)
        if len(x) != self.n:
            raise ValidationError(f"sign vector length {len(x)} != n = {self.n}")
        prod = 1
        for j in self.rows[i - 1]:
            prod *= x[j - 1]
        return prod == (-1) ** self.b[i - 1]

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.m:
            raise ValidationError(f"equation index {i} out of range 1..{self.m}")

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "rows": [sorted(r) for r in self.rows],
            "b": list(self.b),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BinaryLinearSystem":
        try:
            return cls(
                m=int(data["m"]),
                n=int(data["n"]),
                rows=tuple(frozenset(int(j) for j in row) for row in data["rows"]),
                b=tuple(int(v) for v in data["b"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed system JSON: {exc}") from exc


def solve_gf2(sys: BinaryLinearSystem) -> Optional[SignVector]:
    """Decide solvability of the system and return one multiplicative solution, or None.

    Gaussian elimination on bit-packed rows with pivoting by ascending column;
    free variables are set to +1.  The returned vector is re-verified against
    every equation before being returned.
    """
    rows = [sys.row_mask(i) for i in range(1, sys.m + 1)]
    rhs = list(sys.b)
    pivots = []  # (row, column) pairs, column 0-based
    r = 0
    for col in range(sys.n):
        bit = 1 << col
        pivot = next((k for k in range(r, sys.m) if rows[k] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rhs[r], rhs[pivot] = rhs[pivot], rhs[r]
        for k in range(sys.m):
            if k != r and rows[k] & bit:
                rows[k] ^= rows[r]
                rhs[k] ^= rhs[r]
        pivots.append((r, col))
        r += 1
    for k in range(r, sys.m):
        if rows[k] == 0 and rhs[k] == 1:
            return None
    bits = 0  # bit j set <=> x_{j+1} = -1
    for row, col in pivots:
        other = rows[row] & ~(1 << col)
        val = rhs[row] ^ (bin(other & bits).count("1") & 1)
        if val:
            bits |= 1 << col
    x = tuple(-1 if bits >> j & 1 else 1 for j in range(sys.n))
    for i in range(1, sys.m + 1):
        if not sys.equation_holds(i, x):
            raise VerificationError(f"internal elimination error: equation {i} unsatisfied")
    return x


def enumerate_si(sys: BinaryLinearSystem, i: int) -> list:
    """All sign vectors satisfying equation i with +1 entries off the support V_i.

    Returned in lexicographic order (tuples compared entrywise, -1 before +1),
    so downstream vertex orderings are byte-stable.  Cardinality is
    2^(|V_i| - 1).  Supports larger than 20 variables are refused.
    """
    sys._check_index(i)
    support = sorted(sys.rows[i - 1])
    if len(support) > MAX_SUPPORT_ENUMERATION:
        raise BudgetError(
            f"equation {i} has support size {len(support)} > {MAX_SUPPORT_ENUMERATION}"
        )
    target = (-1) ** sys.b[i - 1]
    out = []
    for signs in iter_product((-1, 1), repeat=len(support)):
        prod = 1
        for s in signs:
            prod *= s
        if prod != target:
            continue
        x = [1] * sys.n
        for j, s in zip(support, signs):
            x[j - 1] = s
        out.append(tuple(x))
    out.sort()
    return out
