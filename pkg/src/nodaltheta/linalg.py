"""Exact rank computation over the rationals.

Rows are sparse maps from column index to coefficient.  Elimination is
fraction-free: each row is scaled to a primitive integer vector, and the
update rule  r <- pivot_coeff * r - r_coeff * pivot  keeps all intermediate
entries integral, with a gcd reduction after every step to control growth.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List

SparseRow = Dict[int, Fraction]


def _primitive(row: dict) -> dict:
    """Scale a row to coprime integers, dropping zeros."""
    row = {c: v for c, v in row.items() if v}
    if not row:
        return row
    denominator_lcm = 1
    for v in row.values():
        d = Fraction(v).denominator
        denominator_lcm = denominator_lcm * d // gcd(denominator_lcm, d)
    ints = {c: int(v * denominator_lcm) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def rank_sparse(rows: Iterable[dict]) -> int:
    """Rank over Q of the span of the given sparse rows."""
    pivots: Dict[int, dict] = {}
    rank = 0
    for raw in rows:
        row = _primitive(raw)
        while row:
            col = min(row)
            pivot = pivots.get(col)
            if pivot is None:
                pivots[col] = row
                rank += 1
                break
            a, b = pivot[col], row[col]
            merged = {c: a * v for c, v in row.items()}
            for c, v in pivot.items():
                merged[c] = merged.get(c, 0) - b * v
            row = _primitive(merged)
    return rank


def rank_dense(matrix: List[List[Fraction]]) -> int:
    rows = []
    for row in matrix:
        rows.append({j: v for j, v in enumerate(row) if v})
    return rank_sparse(rows)
