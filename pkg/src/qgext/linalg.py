"""Sparse Gaussian elimination over an exact field.

Field elements are duck-typed: they need ``+ - * /``, truthiness for
"nonzero", and equality.  RatFunc, Fraction and the modular ``nmod`` type all
qualify.  A matrix is a list of sparse columns ``{row_key: value}``.
"""

from __future__ import annotations

from typing import Callable, Hashable

__all__ = ["SparseSystem", "solve_columns", "rank_columns", "independent_columns", "inverse"]


def _size(x) -> int:
    # crude coefficient complexity used to break pivot ties
    sz = getattr(x, "size", None)
    if sz is not None:
        return sz
    num = getattr(x, "num", None)
    if num is not None:
        return len(num.terms) + len(x.den.terms)
    return 1


class SparseSystem:
    """Solve sum_c x_c * col_c = target by Markowitz-pivoted elimination.

    Rows are the row keys appearing in the columns; eliminations act on rows
    so the solution is read off by back substitution.  Several right-hand
    sides can be carried through one elimination (``targets`` as a list).
    """

    def __init__(self, columns: list[dict], target=None, size: Callable = _size):
        self.ncols = len(columns)
        rows: dict[Hashable, dict] = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                if v:
                    rows.setdefault(r, {})[c] = v
        if target is None:
            targets = []
        elif isinstance(target, dict):
            targets = [target]
        else:
            targets = list(target)
        self.ntargets = len(targets)
        self.rhs: dict = {}
        for tid, tgt in enumerate(targets):
            for r, v in tgt.items():
                if v:
                    rows.setdefault(r, {})
                    self.rhs.setdefault(r, {})[tid] = v
        self.rows = rows
        self.size = size
        self._order = {r: n for n, r in enumerate(rows)}

    def eliminate(self):
        rows = self.rows
        rhs = self.rhs
        colocc: dict[int, set] = {}
        for r, row in rows.items():
            for c in row:
                colocc.setdefault(c, set()).add(r)
        active = {r for r, row in rows.items() if row}
        pivots = []
        size = self.size
        order = self._order
        while active:
            # Markowitz-lite: shortest row, then the column with fewest entries
            r = min(active, key=lambda k: (len(rows[k]), order[k]))
            row = rows[r]
            best = None
            for c, v in row.items():
                key = ((len(row) - 1) * (len(colocc[c]) - 1), size(v), c)
                if best is None or key < best[0]:
                    best = (key, c)
            c = best[1]
            inv = 1 / row[c]
            row = {k: v * inv for k, v in row.items()}
            row[c] = 1
            rows[r] = row
            prhs = rhs.get(r)
            if prhs:
                prhs = {t: v * inv for t, v in prhs.items()}
                rhs[r] = prhs
            active.discard(r)
            for c2 in row:
                colocc[c2].discard(r)
            for r2 in list(colocc[c]):
                row2 = rows[r2]
                f = row2[c]
                for k, v in row.items():
                    x = row2.get(k)
                    nv = -f * v if x is None else x - f * v
                    if nv:
                        if x is None:
                            colocc[k].add(r2)
                        row2[k] = nv
                    else:
                        if x is not None:
                            del row2[k]
                            colocc[k].discard(r2)
                if prhs:
                    r2rhs = rhs.setdefault(r2, {})
                    for t, pv in prhs.items():
                        x = r2rhs.get(t)
                        nv = -f * pv if x is None else x - f * pv
                        if nv:
                            r2rhs[t] = nv
                        else:
                            r2rhs.pop(t, None)
                if not row2:
                    active.discard(r2)
            colocc[c] = set()
            pivots.append((r, c))
        self.pivots = pivots
        return pivots

    def rank(self) -> int:
        if not hasattr(self, "pivots"):
            self.eliminate()
        return len(self.pivots)

    def pivot_rows(self) -> set:
        if not hasattr(self, "pivots"):
            self.eliminate()
        return {r for r, _ in self.pivots}

    def consistent(self, tid: int = 0) -> bool:
        prow = self.pivot_rows()
        return not any(r not in prow and d.get(tid) for r, d in self.rhs.items())

    def solution(self, tid: int = 0, require_consistent: bool = True):
        """Return {col: value} with free variables 0, or None if inconsistent.

        With ``require_consistent=False`` the returned x satisfies the pivot
        rows only, which is what normal-form computations need.
        """
        if not hasattr(self, "pivots"):
            self.eliminate()
        if require_consistent and not self.consistent(tid):
            return None
        x: dict = {}
        for r, c in reversed(self.pivots):
            row = self.rows[r]
            acc = self.rhs.get(r, {}).get(tid)
            for k, v in row.items():
                if k != c and k in x:
                    t = v * x[k]
                    acc = -t if acc is None else acc - t
            if acc:
                x[c] = acc
        return x


def solve_columns(columns: list[dict], target: dict):
    """x with sum x_c col_c == target, or None."""
    return SparseSystem(columns, target).solution()


def rank_columns(columns: list[dict]) -> int:
    return SparseSystem(columns).rank()


def independent_columns(columns: list[dict]) -> list[int]:
    """Indices of a maximal independent subset, chosen greedily in order."""
    basis: dict = {}  # pivot key -> reduced column
    order: list = []
    chosen = []
    for idx, col in enumerate(columns):
        v = {k: x for k, x in col.items() if x}
        for p in order:
            f = v.get(p)
            if f:
                for k, x in basis[p].items():
                    y = v.get(k)
                    nv = -f * x if y is None else y - f * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        if v:
            p = min(v, key=lambda k: (_size(v[k]), repr(k)))
            inv = 1 / v[p]
            v = {k: x * inv for k, x in v.items()}
            # keep basis fully reduced on pivot coordinates
            for q in order:
                f = basis[q].get(p)
                if f:
                    b = basis[q]
                    for k, x in v.items():
                        y = b.get(k)
                        nv = -f * x if y is None else y - f * x
                        if nv:
                            b[k] = nv
                        else:
                            b.pop(k, None)
            basis[p] = v
            order.append(p)
            chosen.append(idx)
    return chosen


def inverse(matrix: dict, keys: list, one, zero=None):
    """Inverse of a sparse square matrix {(row, col): value} over the given keys.

    Raises ZeroDivisionError when singular.
    """
    cols = {k: {} for k in keys}
    for (r, c), v in matrix.items():
        if v:
            cols[c][r] = v
    columns = [cols[k] for k in keys]
    out = {}
    for j in keys:
        sys_ = SparseSystem([dict(c) for c in columns], {j: one})
        x = sys_.solution()
        if x is None or sys_.rank() < len(keys):
            raise ZeroDivisionError("singular matrix")
        for c, v in x.items():
            out[(keys[c], j)] = v
    return out
