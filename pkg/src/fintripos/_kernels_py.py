"""Pure-Python reference kernels.

Every kernel works on Birkhoff codes: meet is ``&``, join is ``|`` and
``a <= b`` is ``a & ~b == 0``.  ``elems`` lists the codes of the frame's
elements in element order.
"""

from __future__ import annotations

import itertools

import numpy as np


def enumerate_pers(n: int, elems) -> np.ndarray:
    """All symmetric, transitive code matrices on ``n`` points, flattened row-major.

    Search order: pairs ``(i, j)`` with ``i <= j`` in lexicographic order, values
    in element order; the output is in that (deterministic) order.
    """
    elems = [int(e) for e in elems]
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    rel = [[-1] * n for _ in range(n)]
    out = []

    def ok_after(i: int, j: int) -> bool:
        # every fully assigned transitivity triple touching i or j
        for x in range(n):
            for y in range(n):
                xy = rel[x][y]
                if xy < 0:
                    continue
                for z in range(n):
                    if i not in (x, y, z) and j not in (x, y, z):
                        continue
                    yz, xz = rel[y][z], rel[x][z]
                    if yz >= 0 and xz >= 0 and (xy & yz) & ~xz:
                        return False
        return True

    def go(k: int):
        if k == len(pairs):
            out.append([rel[x][y] for x in range(n) for y in range(n)])
            return
        i, j = pairs[k]
        for v in elems:
            # ρ(i,j) <= ρ(i,i); the bound by ρ(j,j) is left to the triple check
            if i != j and (v & ~rel[i][i]):
                continue
            rel[i][j] = rel[j][i] = v
            if ok_after(i, j):
                go(k + 1)
        rel[i][j] = rel[j][i] = -1

    go(0)
    return np.array(out, dtype=np.int64).reshape(len(out), n * n)


def enumerate_funrels(rho, sigma, elems, budget: int | None = None) -> np.ndarray:
    """All functional relations between PERs given as code matrices.

    Rows ``φ(x, ·)`` are enumerated per ``x`` (strict, single-valued, total and
    congruent within the row), then combined by backtracking over ``x`` with the
    cross-row congruence check.
    """
    rho = np.asarray(rho, dtype=np.int64)
    sigma = np.asarray(sigma, dtype=np.int64)
    na, nb = rho.shape[0], sigma.shape[0]
    elems = [int(e) for e in elems]
    rho_l = rho.tolist()
    sig_l = sigma.tolist()
    rows = []
    for x in range(na):
        bound = [rho_l[x][x] & sig_l[u][u] for u in range(nb)]
        choices = [[v for v in elems if not v & ~bound[u]] for u in range(nb)]
        good = []
        for row in itertools.product(*choices):
            if not _row_ok(row, rho_l[x][x], sig_l, nb):
                continue
            good.append(row)
        rows.append(good)
    out = []
    cur = [None] * na

    def cong(x: int, y: int) -> bool:
        # ρ(y,x) ∧ φ(x,u) ∧ σ(u,v) <= φ(y,v), both directions
        for a, b in ((x, y), (y, x)):
            r = rho_l[b][a]
            if not r:
                continue
            ra, rb = cur[a], cur[b]
            for u in range(nb):
                ru = r & ra[u]
                if not ru:
                    continue
                su = sig_l[u]
                for v in range(nb):
                    if (ru & su[v]) & ~rb[v]:
                        return False
        return True

    def go(x: int):
        if x == na:
            out.append([v for row in cur for v in row])
            return
        for row in rows[x]:
            cur[x] = row
            if all(cong(y, x) for y in range(x)):
                go(x + 1)
        cur[x] = None

    go(0)
    return np.array(out, dtype=np.int64).reshape(len(out), na * nb)


def _row_ok(row, rx: int, sig_l, nb: int) -> bool:
    total = 0
    for u in range(nb):
        pu = row[u]
        total |= pu
        if not pu:
            continue
        su = sig_l[u]
        for v in range(nb):
            pv = row[v]
            # single-valued: φ(x,u) ∧ φ(x,v) <= σ(u,v)
            if (pu & pv) & ~su[v]:
                return False
            # congruence inside the row: φ(x,u) ∧ σ(u,v) <= φ(x,v)
            if (pu & su[v]) & ~pv:
                return False
    # total: ρx <= ⋁_u φ(x,u)
    return not (rx & ~total)


def classify_names(n_names: int, edges_src, edges_dst) -> np.ndarray:
    """Union-find over ``n_names`` nodes; returns the smallest member of each class.

    Merges follow edge order and always keep the smaller root, so labels are
    deterministic.
    """
    parent = list(range(n_names))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in zip(np.asarray(edges_src).tolist(), np.asarray(edges_dst).tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    return np.array([find(a) for a in range(n_names)], dtype=np.int64)
