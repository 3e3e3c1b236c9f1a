"""Smith normal form over the integers with unimodular transforms.

``snf(A)`` returns ``U, D, V`` with ``U @ A @ V == D``.  The inverses of ``U``
and ``V`` are carried along as well, so unimodularity can be certified by
exact re-multiplication instead of a determinant.

Work arrays are ``int64`` while entries stay small (boundary matrices of cell
complexes keep them tiny) and switch to Python integers if a bound is hit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# after every step entries must stay below this for int64 products to be safe
_SAFE = 2**30


@dataclass
class SNFResult:
    D: np.ndarray
    U: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray
    V_inv: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape)
        return [int(self.D[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d != 0]

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.diagonal if d > 1]


class _Work:
    def __init__(self, a: np.ndarray):
        m, n = a.shape
        self.obj = a.dtype == object
        dt = object if self.obj else np.int64
        self.M = a.astype(dt, copy=True)
        self.U = _eye(m, dt)
        self.Ui = _eye(m, dt)
        self.V = _eye(n, dt)
        self.Vi = _eye(n, dt)

    def check(self, *arrays) -> None:
        if self.obj:
            return
        for arr in arrays:
            if arr.size and int(np.abs(arr).max()) >= _SAFE:
                self.promote()
                return

    def promote(self) -> None:
        self.obj = True
        for name in ("M", "U", "Ui", "V", "Vi"):
            setattr(self, name, _to_object(getattr(self, name)))

    def swap_rows(self, i, j):
        if i != j:
            self.M[[i, j]] = self.M[[j, i]]
            self.U[[i, j]] = self.U[[j, i]]
            self.Ui[:, [i, j]] = self.Ui[:, [j, i]]

    def swap_cols(self, i, j):
        if i != j:
            self.M[:, [i, j]] = self.M[:, [j, i]]
            self.V[:, [i, j]] = self.V[:, [j, i]]
            self.Vi[[i, j]] = self.Vi[[j, i]]

    def negate_row(self, t):
        self.M[t] = -self.M[t]
        self.U[t] = -self.U[t]
        self.Ui[:, t] = -self.Ui[:, t]

    def reduce_rows(self, t, rows, q):
        """row_i -= q_i * row_t for i in rows."""
        self.M[rows] -= np.outer(q, self.M[t])
        self.U[rows] -= np.outer(q, self.U[t])
        self.Ui[:, t] += self.Ui[:, rows] @ q
        self.check(self.M[rows], self.U[rows], self.Ui[:, t])

    def reduce_cols(self, t, cols, q):
        """col_j -= q_j * col_t for j in cols."""
        self.M[:, cols] -= np.outer(self.M[:, t], q)
        self.V[:, cols] -= np.outer(self.V[:, t], q)
        self.Vi[t] += q @ self.Vi[cols]
        self.check(self.M[:, cols], self.V[:, cols], self.Vi[t])

    def add_row(self, t, i):
        """row_t += row_i."""
        self.M[t] += self.M[i]
        self.U[t] += self.U[i]
        self.Ui[:, i] -= self.Ui[:, t]
        self.check(self.M[t], self.U[t], self.Ui[:, i])


def _eye(n, dt):
    e = np.zeros((n, n), dtype=dt)
    for i in range(n):
        e[i, i] = 1
    return e


def _to_object(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    out[...] = [[int(x) for x in row] for row in a.tolist()] if a.ndim == 2 else [int(x) for x in a.tolist()]
    return out


def as_int_array(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype == object:
        return arr
    if arr.size == 0:
        return arr.astype(np.int64).reshape(arr.shape)
    if int(np.abs(arr).max()) >= _SAFE:
        return _to_object(arr.astype(object))
    return arr.astype(np.int64)


def _smallest(sub: np.ndarray):
    """Position of the smallest nonzero |entry| (row-major on ties), or None."""
    if sub.dtype == object:
        best = None
        for (i, j), x in np.ndenumerate(sub):
            if x != 0 and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    break
        return None if best is None else (best[1], best[2])
    a = np.abs(sub)
    nz = a != 0
    if not nz.any():
        return None
    a = np.where(nz, a, np.iinfo(np.int64).max)
    flat = int(np.argmin(a))
    return divmod(flat, sub.shape[1])


def snf(a) -> SNFResult:
    """Smith normal form with a deterministic pivot rule (smallest nonzero
    ``|entry|``, then row-major order)."""
    A = as_int_array(a)
    if A.ndim != 2:
        raise ValueError("snf needs a 2-d matrix")
    m, n = A.shape
    w = _Work(A)
    for t in range(min(m, n)):
        pos = _smallest(w.M[t:, t:])
        if pos is None:
            break
        w.swap_rows(t, t + pos[0])
        w.swap_cols(t, t + pos[1])
        while True:
            p = w.M[t, t]
            col = w.M[t + 1:, t]
            rows = np.nonzero(col)[0] + t + 1
            if rows.size:
                q = w.M[rows, t] // p
                w.reduce_rows(t, rows, q)
            row = w.M[t, t + 1:]
            cols = np.nonzero(row)[0] + t + 1
            if cols.size:
                q = w.M[t, cols] // w.M[t, t]
                w.reduce_cols(t, cols, q)
            rest_col = np.nonzero(w.M[t + 1:, t])[0]
            rest_row = np.nonzero(w.M[t, t + 1:])[0]
            if rest_col.size or rest_row.size:
                # a remainder survived: bring the smallest entry of row/column t to the pivot
                cands = [(abs(int(w.M[t + 1 + i, t])), 0, t + 1 + i) for i in rest_col]
                cands += [(abs(int(w.M[t, t + 1 + j])), 1, t + 1 + j) for j in rest_row]
                _, kind, k = min(cands)
                if kind == 0:
                    w.swap_rows(t, k)
                else:
                    w.swap_cols(t, k)
                continue
            p = w.M[t, t]
            sub = w.M[t + 1:, t + 1:]
            bad = np.nonzero(sub % p)[0] if sub.size else ()
            if len(bad):
                w.add_row(t, t + 1 + int(bad[0]))
                continue
            break
        if w.M[t, t] < 0:
            w.negate_row(t)
    return SNFResult(w.M, w.U, w.V, w.Ui, w.Vi)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer product; falls back to Python integers when int64 could overflow."""
    if a.dtype != object and b.dtype != object:
        if not (a.size and b.size):
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * max(a.shape[1], 1)
        if bound < 2**53:
            # every partial sum is an integer below 2**53, so BLAS in float64 is exact
            return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
        if bound < 2**62:
            return a.astype(np.int64) @ b.astype(np.int64)
    return a.astype(object) @ b.astype(object)


def verify(a, res: SNFResult) -> bool:
    """Exact check of ``U A V = D``, of ``U U^-1 = I`` and ``V V^-1 = I`` and of the
    divisibility chain on the diagonal."""
    A = as_int_array(a)
    m, n = A.shape
    if not np.array_equal(matmul(matmul(res.U, A), res.V), res.D):
        return False
    if not np.array_equal(matmul(res.U, res.U_inv), np.eye(m, dtype=np.int64)):
        return False
    if not np.array_equal(matmul(res.V, res.V_inv), np.eye(n, dtype=np.int64)):
        return False
    d = res.D.copy()
    for i in range(min(m, n)):
        d[i, i] = 0
    if np.any(d != 0):
        return False
    diag = res.diagonal
    nz = [x for x in diag if x != 0]
    if any(x < 0 for x in nz) or diag[: len(nz)] != nz:
        return False
    return all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))


def determinantal_invariants(a) -> list[int]:
    """Invariant factors from gcds of all k x k minors (brute force, small matrices)."""
    from itertools import combinations
    from math import gcd

    A = [[int(x) for x in row] for row in np.asarray(a).tolist()]
    m, n = len(A), len(A[0]) if A else 0
    divisors = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, _det([[A[r][c] for c in cols] for r in rows]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def _det(m: list[list[int]]) -> int:
    """Bareiss determinant."""
    m = [row[:] for row in m]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1
