"""Collared substitution matrix and its exact Perron eigendata.

Everything here is integer or rational; the Perron eigenvalue is taken from
the constant column sum and then checked, never estimated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

IntMatrix = list[list[int]]


class NotPrimitive(ValueError):
    pass


class EigenspaceDimension(ValueError):
    pass


class NoPositiveSolution(ValueError):
    pass


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: IntMatrix, v) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: IntMatrix) -> IntMatrix:
    return [list(r) for r in zip(*a)]


def collared_matrix(n_classes: int, children) -> IntMatrix:
    """``A[i][j]`` = multiplicity of class ``i`` among the children of class ``j``.

    ``children[j]`` lists the child class ids of class ``j`` (or ``(slot, id)``
    pairs as returned by :func:`pinwheel.corona.collared_children`).
    """
    a = [[0] * n_classes for _ in range(n_classes)]
    for j, kids in enumerate(children):
        for k in kids:
            i = k[1] if isinstance(k, tuple) else k
            a[i][j] += 1
    return a


def column_sums(a: IntMatrix) -> list[int]:
    return [sum(col) for col in zip(*a)]


def primitivity(a: IntMatrix, max_power: int = 32) -> tuple[int, IntMatrix]:
    """Smallest ``k <= max_power`` with ``A^k > 0`` entrywise, and ``A^k`` itself."""
    if any(x < 0 for row in a for x in row):
        raise ValueError("primitivity needs a nonnegative matrix")
    # only the zero pattern matters; keep entries 0/1 to avoid growth
    pattern = [[int(x > 0) for x in row] for row in a]
    power = pattern
    for k in range(1, max_power + 1):
        if all(x > 0 for row in power for x in row):
            return k, power
        power = [[int(x > 0) for x in row] for row in matmul(power, pattern)]
    raise NotPrimitive(f"no power up to {max_power} is strictly positive")


def bareiss_echelon(m: IntMatrix) -> tuple[IntMatrix, list[int]]:
    """Fraction-free row echelon form; returns the reduced matrix and pivot columns."""
    m = [list(r) for r in m]
    rows, cols = len(m), len(m[0]) if m else 0
    prev = 1
    r = 0
    pivots = []
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, rows):
            mic = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c, cols):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (piv * row_i[j] - mic * row_r[j]) // prev
        prev = piv
        pivots.append(c)
        r += 1
    return m, pivots


def rank(m: IntMatrix) -> int:
    if not m or not m[0]:
        return 0
    return len(bareiss_echelon(m)[1])


def nullspace(m: IntMatrix) -> list[list[Fraction]]:
    """Rational basis of ``{x : m x = 0}`` by back substitution on the echelon form."""
    ech, pivots = bareiss_echelon(m)
    cols = len(m[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            s = sum(ech[r][j] * x[j] for j in range(c + 1, cols))
            x[c] = -s / ech[r][c]
        basis.append(x)
    return basis


@dataclass(frozen=True)
class PerronData:
    eigenvalue: int
    alpha: tuple[Fraction, ...]
    denominator: int
    alpha_prime: tuple[int, ...]
    rank_defect: int

    @property
    def gcd(self) -> int:
        return reduce(gcd, self.alpha_prime)


def perron_data(a: IntMatrix, lam: int | None = None) -> PerronData:
    """The positive eigenvector of ``A`` for ``lam``, normalised to sum 1.

    ``lam`` defaults to the common column sum, which is the Perron eigenvalue
    of a nonnegative matrix with constant column sums.
    """
    n = len(a)
    sums = set(column_sums(a))
    if lam is None:
        if len(sums) != 1:
            raise ValueError("column sums differ; pass the eigenvalue explicitly")
        lam = sums.pop()
    shifted = [[a[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    basis = nullspace(shifted)
    if len(basis) != 1:
        raise EigenspaceDimension(f"eigenspace of {lam} has dimension {len(basis)}")
    v = basis[0]
    if all(x < 0 for x in v):
        v = [-x for x in v]
    if not all(x > 0 for x in v):
        raise NoPositiveSolution("eigenvector is not strictly positive")
    total = sum(v)
    alpha = tuple(x / total for x in v)
    den = lcm(*(x.denominator for x in alpha))
    alpha_prime = tuple(int(x * den) for x in alpha)
    return PerronData(lam, alpha, den, alpha_prime, n - len(basis))


def mirror_permutation(partners: list[int]) -> IntMatrix:
    n = len(partners)
    return [[int(partners[j] == i) for j in range(n)] for i in range(n)]
