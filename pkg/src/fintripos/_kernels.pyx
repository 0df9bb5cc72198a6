# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts and output order as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef long long i64


cdef bint _triples_ok(i64* rel, int n, int i, int j):
    cdef int x, y, z
    cdef i64 xy, yz, xz
    for x in range(n):
        for y in range(n):
            xy = rel[x * n + y]
            if xy < 0:
                continue
            for z in range(n):
                if x != i and y != i and z != i and x != j and y != j and z != j:
                    continue
                yz = rel[y * n + z]
                xz = rel[x * n + z]
                if yz >= 0 and xz >= 0 and ((xy & yz) & ~xz) != 0:
                    return False
    return True


def enumerate_pers(int n, elems):
    cdef cnp.ndarray[i64, ndim=1] el = np.ascontiguousarray(elems, dtype=np.int64)
    cdef int ne = el.shape[0]
    cdef int npairs = n * (n + 1) // 2
    cdef int k, i, j, c, x
    cdef i64 v
    cdef i64* rel = <i64*> malloc(max(n * n, 1) * sizeof(i64))
    cdef int* pi = <int*> malloc(max(npairs, 1) * sizeof(int))
    cdef int* pj = <int*> malloc(max(npairs, 1) * sizeof(int))
    cdef int* choice = <int*> malloc(max(npairs, 1) * sizeof(int))
    out = []
    try:
        k = 0
        for i in range(n):
            for j in range(i, n):
                pi[k] = i
                pj[k] = j
                k += 1
        for x in range(n * n):
            rel[x] = -1
        if npairs == 0:
            return np.zeros((1, 0), dtype=np.int64)
        k = 0
        choice[0] = -1
        while k >= 0:
            i = pi[k]
            j = pj[k]
            c = choice[k] + 1
            while c < ne:
                v = el[c]
                if i == j or (v & ~rel[i * n + i]) == 0:
                    rel[i * n + j] = v
                    rel[j * n + i] = v
                    if _triples_ok(rel, n, i, j):
                        break
                c += 1
            if c >= ne:
                rel[i * n + j] = -1
                rel[j * n + i] = -1
                k -= 1
                continue
            choice[k] = c
            if k == npairs - 1:
                out.append([rel[x] for x in range(n * n)])
                continue
            k += 1
            choice[k] = -1
        return np.array(out, dtype=np.int64).reshape(len(out), n * n)
    finally:
        free(rel)
        free(pi)
        free(pj)
        free(choice)


cdef bint _row_ok(i64* row, i64 rx, i64* sig, int nb):
    cdef i64 total = 0, pu, pv, s
    cdef int u, v
    for u in range(nb):
        pu = row[u]
        total |= pu
        if pu == 0:
            continue
        for v in range(nb):
            pv = row[v]
            s = sig[u * nb + v]
            if ((pu & pv) & ~s) != 0:
                return False
            if ((pu & s) & ~pv) != 0:
                return False
    return (rx & ~total) == 0


cdef bint _cong(i64* cur, i64* rho, i64* sig, int na, int nb, int x, int y):
    cdef int a, b, u, v, t
    cdef i64 r, ru
    for t in range(2):
        if t == 0:
            a = x
            b = y
        else:
            a = y
            b = x
        r = rho[b * na + a]
        if r == 0:
            continue
        for u in range(nb):
            ru = r & cur[a * nb + u]
            if ru == 0:
                continue
            for v in range(nb):
                if ((ru & sig[u * nb + v]) & ~cur[b * nb + v]) != 0:
                    return False
    return True


def enumerate_funrels(rho, sigma, elems, budget=None):
    cdef cnp.ndarray[i64, ndim=2] R = np.ascontiguousarray(rho, dtype=np.int64).reshape(
        np.shape(rho)[0], np.shape(rho)[0])
    cdef cnp.ndarray[i64, ndim=2] S = np.ascontiguousarray(sigma, dtype=np.int64).reshape(
        np.shape(sigma)[0], np.shape(sigma)[0])
    cdef cnp.ndarray[i64, ndim=1] el = np.ascontiguousarray(elems, dtype=np.int64)
    cdef int na = R.shape[0], nb = S.shape[0], ne = el.shape[0]
    cdef int x, u, y, idx
    cdef i64* rp = <i64*> R.data
    cdef i64* sp = <i64*> S.data
    cdef cnp.ndarray[i64, ndim=1] rowbuf = np.zeros(max(nb, 1), dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] cur = np.zeros(max(na * nb, 1), dtype=np.int64)
    cdef i64* cp = <i64*> cur.data
    rows = []
    for x in range(na):
        allowed = [[el[c] for c in range(ne) if (el[c] & ~(rp[x * na + x] & sp[u * nb + u])) == 0]
                   for u in range(nb)]
        good = []
        for row in _product(allowed):
            for u in range(nb):
                rowbuf[u] = row[u]
            if _row_ok(<i64*> rowbuf.data, rp[x * na + x], sp, nb):
                good.append(np.array(row, dtype=np.int64))
        rows.append(good)
    out = []
    if na == 0:
        return np.zeros((1, 0), dtype=np.int64)
    pos = [0] * na
    x = 0
    pos[0] = -1
    while x >= 0:
        pos[x] += 1
        found = False
        while pos[x] < len(rows[x]):
            r = rows[x][pos[x]]
            for u in range(nb):
                cp[x * nb + u] = r[u]
            ok = True
            for y in range(x):
                if not _cong(cp, rp, sp, na, nb, y, x):
                    ok = False
                    break
            if ok:
                found = True
                break
            pos[x] += 1
        if not found:
            x -= 1
            continue
        if x == na - 1:
            out.append(cur[:na * nb].copy())
            continue
        x += 1
        pos[x] = -1
    if not out:
        return np.zeros((0, na * nb), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def _product(lists):
    import itertools
    return itertools.product(*lists)


def classify_names(int n_names, edges_src, edges_dst):
    cdef cnp.ndarray[i64, ndim=1] src = np.ascontiguousarray(edges_src, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] dst = np.ascontiguousarray(edges_dst, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] parent = np.arange(n_names, dtype=np.int64)
    cdef i64* p = <i64*> parent.data
    cdef Py_ssize_t e, m = src.shape[0]
    cdef i64 a, b, ra, rb
    for e in range(m):
        a = src[e]
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        ra = a
        b = dst[e]
        while p[b] != b:
            p[b] = p[p[b]]
            b = p[b]
        rb = b
        if ra != rb:
            if ra < rb:
                p[rb] = ra
            else:
                p[ra] = rb
    for e in range(n_names):
        a = e
        while p[a] != a:
            a = p[a]
        p[e] = a
    return parent
