# cython: language_level=3
"""Compiled dense DBM cell kernels; semantics identical to ``pure.py``.

Numerators/denominators stay Python ints (bounds are arbitrary-precision
exact rationals), so the win over the fallback comes from compiled loop
control and indexing, not from native arithmetic.
"""

from math import gcd

BACKEND = "compiled"


def close_cells(list nums, list dens, Py_ssize_t dim):
    cdef Py_ssize_t k, u, w, v, i, j, t, krow, urow
    cdef object nk, dk, d2, cn, cd, dt, g
    for v in range(dim):
        i = v * dim + v
        if dens[i] != 0 and nums[i] < 0:
            return False
        nums[i] = 0
        dens[i] = 1
    for k in range(dim):
        krow = k * dim
        for u in range(dim):
            i = u * dim + k
            dk = dens[i]
            if dk == 0:
                continue
            nk = nums[i]
            urow = u * dim
            for w in range(dim):
                j = krow + w
                d2 = dens[j]
                if d2 == 0:
                    continue
                cn = nk * d2 + nums[j] * dk
                cd = dk * d2
                t = urow + w
                dt = dens[t]
                if dt == 0 or cn * dt < nums[t] * cd:
                    g = gcd(cn, cd)
                    if g > 1:
                        cn //= g
                        cd //= g
                    nums[t] = cn
                    dens[t] = cd
    for v in range(dim):
        if nums[v * dim + v] < 0:
            return False
    return True


def strengthen_cells(list nums, list dens, Py_ssize_t dim):
    cdef Py_ssize_t u, v, i, t, urow
    cdef object nu, du, dv, cn, cd, dt, g
    cdef list una_n = [0] * dim
    cdef list una_d = [0] * dim
    for u in range(dim):
        i = u * dim + (u ^ 1)
        una_n[u] = nums[i]
        una_d[u] = dens[i]
    for u in range(dim):
        du = una_d[u]
        if du == 0:
            continue
        nu = una_n[u]
        urow = u * dim
        for v in range(dim):
            dv = una_d[v ^ 1]
            if dv == 0:
                continue
            cn = nu * dv + una_n[v ^ 1] * du
            cd = 2 * du * dv
            t = urow + v
            dt = dens[t]
            if dt == 0 or cn * dt < nums[t] * cd:
                g = gcd(cn, cd)
                if g > 1:
                    cn //= g
                    cd //= g
                nums[t] = cn
                dens[t] = cd


def assume_pot_cells(list nums, list dens, Py_ssize_t dim, Py_ssize_t x,
                     Py_ssize_t y, object cnum, object cden):
    cdef Py_ssize_t u, v, i, t, urow, yrow
    cdef object n1, d1, n2, d2, an, ad, cn, cd, dt, g
    cdef list col = []
    cdef list row = []
    for u in range(dim):
        i = u * dim + x
        if dens[i]:
            col.append((u, nums[i], dens[i]))
    yrow = y * dim
    for v in range(dim):
        i = yrow + v
        if dens[i]:
            row.append((v, nums[i], dens[i]))
    for u, n1, d1 in col:
        an = n1 * cden + cnum * d1
        ad = d1 * cden
        urow = u * dim
        for v, n2, d2 in row:
            cn = an * d2 + n2 * ad
            cd = ad * d2
            t = urow + v
            dt = dens[t]
            if dt == 0 or cn * dt < nums[t] * cd:
                g = gcd(cn, cd)
                if g > 1:
                    cn //= g
                    cd //= g
                nums[t] = cn
                dens[t] = cd
