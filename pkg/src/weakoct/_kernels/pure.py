"""Pure-Python fallback for the dense DBM cell kernels.

Cells cross this boundary as two parallel flat lists ``nums``/``dens`` in
row-major order for a ``dim x dim`` matrix: ``dens[i] > 0`` holds the reduced
exact rational ``nums[i]/dens[i]`` and ``dens[i] == 0`` encodes +infinity
(with ``nums[i] == 1`` by convention).  The compiled extension module
``_speedups`` implements the same three entry points with identical
semantics; these loops are the only cubic/quadratic hot paths of the dense
side.
"""

from __future__ import annotations

from math import gcd

BACKEND = "pure"


def close_cells(nums: list, dens: list, dim: int) -> bool:
    """All-pairs shortest-path closure, in place.

    Returns False when a negative cycle exists (the potential-constraint
    system is unsatisfiable); cell contents are unspecified in that case.
    On True, the matrix has a null diagonal and satisfies the triangular
    inequality, i.e. it is the minimal equivalent matrix.
    """
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


def strengthen_cells(nums: list, dens: list, dim: int) -> None:
    """Lower every cell to at most the half-sum of its two unary cells."""
    una_n = [0] * dim
    una_d = [0] * dim
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


def assume_pot_cells(
    nums: list, dens: list, dim: int, x: int, y: int, cnum: int, cden: int
) -> None:
    """Incremental update for one new potential constraint x - y <= c.

    Every cell (u, v) drops to min(B_uv, B_ux + c + B_yv).  Reads are
    snapshotted so the update is simultaneous over the input matrix.
    """
    col = []
    for u in range(dim):
        i = u * dim + x
        if dens[i]:
            col.append((u, nums[i], dens[i]))
    row = []
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
