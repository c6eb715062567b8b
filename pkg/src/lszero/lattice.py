"""Integer row reduction used for character canonical forms and sampling."""

from __future__ import annotations


def hermite_rows(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Pivots are positive and entries above each pivot lie in [0, pivot).
    Zero rows are dropped.
    """
    m = [list(r) for r in rows if any(r)]
    basis: list[list[int]] = []
    pivots: list[int] = []
    for col in range(ncols):
        live = [r for r in m if r[col] != 0]
        if not live:
            continue
        rest = [r for r in m if r[col] == 0]
        # euclid down to a single row with a nonzero entry in this column
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            head = live[0]
            nxt = [head]
            for r in live[1:]:
                q = r[col] // head[col]
                r = [a - q * b for a, b in zip(r, head)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        for i, b in enumerate(basis):
            q = b[col] // piv[col]
            if q:
                basis[i] = [x - q * y for x, y in zip(b, piv)]
        basis.append(piv)
        pivots.append(col)
        m = rest
    return basis


def reduce_vector(vec: list[int], basis: list[list[int]]) -> list[int]:
    """Unique representative of ``vec`` modulo the lattice with HNF ``basis``."""
    v = list(vec)
    for row in basis:
        col = next(i for i, a in enumerate(row) if a)
        q = v[col] // row[col]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v


def smith_with_transform(rows: list[list[int]], ncols: int):
    """Return (diag, V) with U*R*V = diag for some unimodular U.

    ``V`` is an ncols x ncols unimodular integer matrix (list of rows) and
    ``diag`` lists the nonzero invariant factors in order.
    """
    a = [list(r) for r in rows if any(r)]
    nrows = len(a)
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def col_op(i, j, q):
        # column_j -= q * column_i
        for r in a:
            r[j] -= q * r[i]
        for r in v:
            r[j] -= q * r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    diag = []
    t = 0
    while t < min(nrows, ncols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if a[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        a[t], a[i0] = a[i0], a[t]
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, nrows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        changed = True
            for j in range(t + 1, ncols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(t, j, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = [(i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols)
                   if a[i][j] % a[t][t]]
            if bad:
                i, _ = bad[0]
                a[t] = [x + y for x, y in zip(a[t], a[i])]
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
        diag.append(a[t][t])
        t += 1
    return diag, v
