import random
from fractions import Fraction

import pytest

from multistat import ratlin


def cofactor_det(rows):
    n = len(rows)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        sub = [[Fraction(r[k]) for k in range(n) if k != j] for r in rows[1:]]
        total += (-1) ** j * Fraction(rows[0][j]) * cofactor_det(sub)
    return total


def test_determinant_matches_cofactor_expansion():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 5)
        m = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
        assert ratlin.determinant(m) == cofactor_det(m)


def test_determinant_singular():
    assert ratlin.determinant([[1, 2], [2, 4]]) == 0
    assert ratlin.determinant([]) == 1


def test_kernel_basis_convention():
    # single row (1, 1): free column 2 gives (-1, 1)
    assert ratlin.kernel_basis([[1, 1]]) == [[Fraction(-1), Fraction(1)]]


def test_kernel_basis_hybrid_support_matrix():
    # support matrix of the hybrid kinase steady-state system
    A = [[1, 1, 1, 1, 1], [1, 0, 1, 1, 0], [0, 1, 1, 2, 0]]
    ker = ratlin.kernel_basis(A)
    assert ker == [
        [Fraction(1), Fraction(0), Fraction(-2), Fraction(1), Fraction(0)],
        [Fraction(-1), Fraction(-1), Fraction(1), Fraction(0), Fraction(1)],
    ]
    # both reference cone normals lie in the kernel
    for v in [(1, 0, -2, 1, 0), (0, 1, 1, -1, -1)]:
        for row in A:
            assert sum(a * x for a, x in zip(row, v)) == 0


def test_kernel_vectors_annihilate():
    rng = random.Random(11)
    for _ in range(100):
        m = rng.randint(1, 4)
        n = rng.randint(m, 6)
        M = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]
        ker = ratlin.kernel_basis(M)
        assert len(ker) == n - ratlin.rank(M)
        for v in ker:
            for row in M:
                assert sum(Fraction(a) * x for a, x in zip(row, v)) == 0


def test_solve_roundtrip():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 4)
        while True:
            M = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
            if ratlin.determinant(M) != 0:
                break
        x = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
        rhs = [sum(Fraction(M[i][j]) * x[j] for j in range(n)) for i in range(n)]
        assert ratlin.solve(M, rhs) == x


def test_primitive():
    assert ratlin.primitive([Fraction(2, 3), Fraction(-4, 3)]) == (1, -2)
    assert ratlin.primitive([0, 0]) == (0, 0)
    assert ratlin.primitive([Fraction(-1, 2), Fraction(1, 2)]) == (-1, 1)


def test_strict_feasible_simple_cone():
    h = ratlin.strict_feasible([(1, 0), (0, 1)])
    assert h is not None and h[0] > 0 and h[1] > 0


def test_strict_feasible_empty_cone():
    assert ratlin.strict_feasible([(1, 0), (-1, 0)]) is None
    assert ratlin.strict_feasible([(1, 1), (-1, -1)]) is None


def test_strict_feasible_zero_coords():
    h = ratlin.strict_feasible([(1, -2, 0), (0, 1, -1)], zero_coords=[2])
    assert h is not None and h[2] == 0
    assert h[0] - 2 * h[1] > 0 and h[1] > 0


def test_strict_feasible_matches_fourier_motzkin():
    rng = random.Random(19)
    for _ in range(300):
        n = rng.randint(1, 4)
        k = rng.randint(1, 6)
        normals = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(k)]
        if any(all(x == 0 for x in m) for m in normals):
            continue
        lp = ratlin.strict_feasible(normals) is not None
        fm = ratlin.fourier_motzkin_feasible(normals)
        assert lp == fm, (normals, lp, fm)


def test_lp_feasible():
    # x >= 1, -x >= -2  -> feasible
    pt = ratlin.lp_feasible([[1], [-1]], [1, -2])
    assert pt is not None and 1 <= pt[0] <= 2
    # x >= 1, -x >= 0 -> infeasible
    assert ratlin.lp_feasible([[1], [-1]], [1, 0]) is None


def test_cone_contains():
    normals = [(1, 0), (0, 1)]
    assert ratlin.cone_contains(normals, (1, 1))
    assert not ratlin.cone_contains(normals, (-1, 2))


def test_solve_lp_optimal_value():
    # min -x - y st x + y <= 1, x,y >= 0 -> optimum -1
    A = [[1, 1, 1]]
    status, x, obj = ratlin.solve_standard_lp(A, [1], [-1, -1, 0])
    assert status == "optimal"
    assert obj == -1


def test_solve_lp_infeasible_and_unbounded():
    status, *_ = ratlin.solve_standard_lp([[1, 1]], [-1], [0, 0])
    # rows are sign-normalized, so this is x + y = -1 -> x+y>=0 infeasible
    assert status == "infeasible"
    status, *_ = ratlin.solve_standard_lp([[1, -1]], [0], [-1, 0])
    assert status == "unbounded"
