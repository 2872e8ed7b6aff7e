"""Backend equivalence: compiled kernels must match the pure fallback.

A naive Fraction-based reference implements the same semantics a third way,
so a shared bug in both backends would still be caught.
"""

import random
from fractions import Fraction

import pytest

from weakoct import _kernels
from weakoct._kernels import pure

compiled = pytest.importorskip(
    "weakoct._kernels._speedups", reason="compiled kernels not built"
)

F = Fraction
INF = None  # reference-side marker


def random_arrays(rnd, dim, density=0.4):
    nums, dens = [], []
    for _ in range(dim * dim):
        if rnd.random() < density:
            f = F(rnd.randint(-6, 12), rnd.choice((1, 1, 2, 4)))
            nums.append(f.numerator)
            dens.append(f.denominator)
        else:
            nums.append(1)
            dens.append(0)
    return nums, dens


def to_fractions(nums, dens):
    return [None if d == 0 else F(n, d) for n, d in zip(nums, dens)]


def reference_close(cells, dim):
    for v in range(dim):
        i = v * dim + v
        if cells[i] is not None and cells[i] < 0:
            return None
        cells[i] = F(0)
    for k in range(dim):
        for u in range(dim):
            if cells[u * dim + k] is None:
                continue
            for w in range(dim):
                if cells[k * dim + w] is None:
                    continue
                cand = cells[u * dim + k] + cells[k * dim + w]
                old = cells[u * dim + w]
                if old is None or cand < old:
                    cells[u * dim + w] = cand
    for v in range(dim):
        if cells[v * dim + v] < 0:
            return None
    return cells


def reference_strengthen(cells, dim):
    unary = [cells[u * dim + (u ^ 1)] for u in range(dim)]
    out = list(cells)
    for u in range(dim):
        if unary[u] is None:
            continue
        for v in range(dim):
            if unary[v ^ 1] is None:
                continue
            cand = (unary[u] + unary[v ^ 1]) / 2
            old = out[u * dim + v]
            if old is None or cand < old:
                out[u * dim + v] = cand
    return out


@pytest.mark.parametrize("trial", range(60))
def test_close_backends_agree(trial):
    rnd = random.Random(1000 + trial)
    dim = 2 * rnd.randint(1, 4)
    nums, dens = random_arrays(rnd, dim)
    ref = reference_close(to_fractions(nums, dens), dim)

    n1, d1 = list(nums), list(dens)
    ok_pure = pure.close_cells(n1, d1, dim)
    n2, d2 = list(nums), list(dens)
    ok_fast = compiled.close_cells(n2, d2, dim)

    assert ok_pure == ok_fast == (ref is not None)
    if ref is not None:
        assert to_fractions(n1, d1) == ref
        assert to_fractions(n2, d2) == ref


@pytest.mark.parametrize("trial", range(60))
def test_strengthen_backends_agree(trial):
    rnd = random.Random(2000 + trial)
    dim = 2 * rnd.randint(1, 4)
    nums, dens = random_arrays(rnd, dim)
    ref = reference_strengthen(to_fractions(nums, dens), dim)

    n1, d1 = list(nums), list(dens)
    pure.strengthen_cells(n1, d1, dim)
    n2, d2 = list(nums), list(dens)
    compiled.strengthen_cells(n2, d2, dim)

    assert to_fractions(n1, d1) == ref
    assert to_fractions(n2, d2) == ref


@pytest.mark.parametrize("trial", range(60))
def test_assume_backends_agree(trial):
    rnd = random.Random(3000 + trial)
    dim = 2 * rnd.randint(1, 4)
    nums, dens = random_arrays(rnd, dim)
    x, y = rnd.randrange(dim), rnd.randrange(dim)
    c = F(rnd.randint(-5, 8), rnd.choice((1, 2)))

    cells = to_fractions(nums, dens)
    ref = list(cells)
    for u in range(dim):
        if cells[u * dim + x] is None:
            continue
        for v in range(dim):
            if cells[y * dim + v] is None:
                continue
            cand = cells[u * dim + x] + c + cells[y * dim + v]
            old = ref[u * dim + v]
            if old is None or cand < old:
                ref[u * dim + v] = cand

    n1, d1 = list(nums), list(dens)
    pure.assume_pot_cells(n1, d1, dim, x, y, c.numerator, c.denominator)
    n2, d2 = list(nums), list(dens)
    compiled.assume_pot_cells(n2, d2, dim, x, y, c.numerator, c.denominator)

    assert to_fractions(n1, d1) == ref
    assert to_fractions(n2, d2) == ref


def test_reduced_form_is_maintained():
    rnd = random.Random(4000)
    for _ in range(30):
        dim = 2 * rnd.randint(1, 3)
        nums, dens = random_arrays(rnd, dim)
        if not pure.close_cells(nums, dens, dim):
            continue
        import math

        for n, d in zip(nums, dens):
            if d:
                assert math.gcd(n, d) == 1 and d > 0


def test_select_switches_and_restores():
    previous = _kernels.select("pure")
    try:
        assert _kernels.backend_name() == "pure"
    finally:
        _kernels.select(previous)
    assert _kernels.backend_name() == previous
    with pytest.raises(ValueError):
        _kernels.select("nonsense")
