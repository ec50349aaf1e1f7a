"""Duality layer: evaluation pairing, twisted dual, reversal scans.

Oracles here are exhaustive scans on groups small enough to enumerate:
perfectness means trivial kernels on both sides, and the reversal
pattern is checked cell by cell against hand-computed image orders.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwalab.errors import BadLevels, NotAPBase, PrecisionExhausted
from iwalab.lambda_algebra import LambdaPoly, TowerParams
from iwalab.linalg import mat_mul, mat_vec, poly_of_matrix
from iwalab.modules import ElementaryModule
from iwalab.padic import PadicContext
from iwalab.pairing import (
    build_pairing,
    check_double_dual,
    check_order_reversal,
    check_projective_compat,
    check_reflection,
    dual_base,
)

CTX = PadicContext(3, 6)


def tm(a: int) -> LambdaPoly:
    return LambdaPoly.from_ints([-a, 1], CTX)


def module(*polys, mu=(), ctx=CTX, k=1):
    params = TowerParams(p=ctx.p, k=k)
    return ElementaryModule(ctx, params, tuple((f, 1) for f in polys), tuple(mu))


def powers(f: LambdaPoly, e: int, ctx=CTX, k=1):
    params = TowerParams(p=ctx.p, k=k)
    return ElementaryModule(ctx, params, ((f, e),), ())


def exhaustive_perfect(table) -> bool:
    level, dual = table.level, table.dual
    els = list(level.elements())
    duals = list(dual.elements())
    left = sum(
        1 for x in els if all(table.pair(x, c) == 0 for c in duals)
    )
    right = sum(
        1 for c in duals if all(table.pair(x, c) == 0 for x in els)
    )
    return left == 1 and right == 1


def test_cyclic_pairing_is_multiplication_table():
    m = module(tm(3))
    level = m.finite_level(2)
    assert level.invariant_factors() == [9]
    dual, table = build_pairing(level, m.params)
    assert table.q == 9
    assert table.non_degenerate()
    assert exhaustive_perfect(table)
    # bilinearity against the enumeration, seeded triples
    rng = random.Random(7)
    for _ in range(25):
        x, y = level.random_element(rng), level.random_element(rng)
        c = dual.random_element(rng)
        s = [(a + b) % level.modulus for a, b in zip(x, y)]
        assert table.pair(s, c) == (table.pair(x, c) + table.pair(y, c)) % 9


def test_scalar_t_star_is_zero_when_kappa_matches():
    # t = 3, kappa = 4: T* = 4/(1+3) - 1 = 0 on this module
    m = module(tm(3))
    dual, table = build_pairing(m.finite_level(2), m.params)
    assert dual.t_star == [[0]]
    assert dual.t_action_dual == [[0]]


def test_two_summand_pairing_perfect():
    m = module(tm(3), tm(6))
    dual, table = build_pairing(m.finite_level(1), m.params)
    assert sorted(dual.exps) == [1, 1]
    assert table.non_degenerate()
    assert exhaustive_perfect(table)


def test_nonsplit_level_pairing_perfect():
    m = powers(tm(3), 2)
    dual, table = build_pairing(m.finite_level(2), m.params)
    assert sorted(dual.exps) == [1, 3]
    assert table.q == 27
    assert table.non_degenerate()
    assert exhaustive_perfect(table)


def test_mu_summand_pairing_perfect():
    m = module(mu=(2,))
    dual, table = build_pairing(m.finite_level(1), m.params)
    assert dual.exps == (2,)
    assert exhaustive_perfect(table)


def test_matrix_t_star_defining_relation():
    # (1 + T)(1 + T*) = kappa, exactly, at matrix level
    for m in (module(tm(3)), powers(tm(3), 2), module(mu=(2,))):
        level = m.finite_level(2)
        dual, _ = build_pairing(level, m.params)
        mod = level.modulus
        kappa = m.params.kappa_value() % mod
        one_t = [
            [(v + (1 if i == j else 0)) % mod for j, v in enumerate(row)]
            for i, row in enumerate(level.t_action)
        ]
        one_star = [
            [(v + (1 if i == j else 0)) % mod for j, v in enumerate(row)]
            for i, row in enumerate(dual.t_star)
        ]
        prod = mat_mul(one_t, one_star, mod)
        want = [
            [kappa if i == j else 0 for j in range(level.rank)]
            for i in range(level.rank)
        ]
        assert prod == want


def test_reflection_identities_hold():
    m = powers(tm(3), 2)
    table = build_pairing(m.finite_level(2), m.params)[1]
    assert check_reflection(table, LambdaPoly.from_ints([1], CTX), samples=30)
    assert check_reflection(table, LambdaPoly.from_ints([0, 1], CTX), samples=30)
    assert check_reflection(table, LambdaPoly.from_ints([2, 5, 1, 3], CTX), samples=30)


def test_reflection_random_lambdas():
    m = module(tm(3), tm(6))
    table = build_pairing(m.finite_level(2), m.params)[1]
    rng = random.Random(11)
    for _ in range(20):
        coeffs = [rng.randrange(CTX.modulus) for _ in range(4)]
        assert check_reflection(table, LambdaPoly.from_ints(coeffs, CTX), samples=20)


def test_reflection_detects_a_broken_involution():
    m = powers(tm(3), 2)
    dual, table = build_pairing(m.finite_level(2), m.params)
    dual.t_star = [[(v + 3) % m.context.modulus for v in row] for row in dual.t_star]
    assert not check_reflection(table, LambdaPoly.from_ints([0, 1], CTX), samples=30)


def test_double_dual_recovers_module():
    for m in (module(tm(3)), powers(tm(3), 2), module(tm(3), tm(6)), module(mu=(2,))):
        assert check_double_dual(m.finite_level(2), m.params)


def test_dual_base_cyclic():
    m = module(tm(3))
    level = m.finite_level(2)
    table = build_pairing(level, m.params)[1]
    cert = dual_base(table, [[1]])
    assert cert.q == 9
    assert cert.exponents == [[1]]
    # non-generating element is rejected
    with pytest.raises(NotAPBase):
        dual_base(table, [[3]])


def test_dual_base_mixed_orders():
    m = powers(tm(3), 2)
    level = m.finite_level(2)
    table = build_pairing(level, m.params)[1]
    gens = [
        level.from_smith_coordinates([1 if i == j else 0 for j in range(level.rank)])
        for i, d in enumerate(level.diag_exps)
        if d > 0
    ]
    cert = dual_base(table, gens)
    q = table.q
    for i, g in enumerate(gens):
        for j in range(len(gens)):
            want = q // level.element_order(gens[i]) if i == j else 0
            assert cert.exponents[i][j] == want


def test_dual_base_rejects_non_direct_sum():
    m = module(tm(3), tm(6))
    level = m.finite_level(1)
    table = build_pairing(level, m.params)[1]
    assert dual_base(table, [[1, 0], [0, 1]]).q == 3
    # three elements span but overshoot the order budget
    with pytest.raises(NotAPBase):
        dual_base(table, [[1, 0], [0, 1], [1, 1]])
    with pytest.raises(NotAPBase):
        dual_base(table, [[1, 1]])


def test_projective_compat_scalar_module():
    m = module(tm(3))
    report = check_projective_compat(m, 1, 2, samples=40)
    assert report.ok
    assert "radical" in report.note
    with pytest.raises(BadLevels):
        check_projective_compat(m, 2, 2)


def test_projective_compat_needs_radical_restriction():
    """On a non-scalar module the identity fails for generic duals."""
    m = powers(tm(3), 2)
    level = m.finite_level(2)
    dual, table = build_pairing(level, m.params)
    nu_t = poly_of_matrix(list(m.nu(2, 1).coeffs), level.t_action, level.modulus)
    violated = False
    for x in level.elements():
        for c in dual.elements():
            if table.pair(mat_vec(nu_t, x, level.modulus), c) != (
                3 * table.pair(x, c)
            ) % table.q:
                violated = True
                break
        if violated:
            break
    assert violated
    assert check_projective_compat(m, 1, 2, table_m=table, samples=60).ok


def test_projective_compat_deeper_levels():
    m = module(tm(3), tm(6))
    assert check_projective_compat(m, 1, 2, samples=25).ok
    assert check_projective_compat(m, 1, 3, samples=10).ok
    assert check_projective_compat(m, 2, 3, samples=10).ok


def test_order_reversal_square():
    m = powers(tm(3), 2)
    report = check_order_reversal(m, 2)
    assert report.k == 2 and report.exhaustive and not report.vacuous
    assert report.ok
    cells = {(c.j, c.l): c for c in report.cells}
    assert not cells[(1, 1)].all_zero
    assert not cells[(1, 2)].all_zero and not cells[(2, 1)].all_zero
    assert cells[(2, 2)].all_zero and cells[(2, 2)].witness is None
    assert cells[(1, 2)].witness is not None
    # the torsion-subgroup reading cannot vanish at (k, k): that cell
    # is the whole pairing, which is perfect
    kcells = {(c.j, c.l): c for c in report.kernel_cells}
    assert not kcells[(2, 2)].all_zero
    assert not report.kernel_reading_ok


def test_order_reversal_cube():
    m = powers(tm(3), 3)
    report = check_order_reversal(m, 2)
    assert report.exhaustive
    assert report.ok
    for c in report.cells:
        assert c.all_zero == (c.j + c.l > report.k + 1)
    assert not report.kernel_reading_ok


def test_order_reversal_vacuous_and_errors():
    assert check_order_reversal(module(tm(3)), 2).vacuous
    with pytest.raises(ValueError):
        check_order_reversal(module(tm(3), tm(6)), 1)
    with pytest.raises(ValueError):
        check_order_reversal(module(tm(3), mu=(1,)), 1)


def test_flagged_level_refuses_dual():
    shallow = PadicContext(3, 2)
    m = module(mu=(2,), ctx=shallow)
    with pytest.raises(PrecisionExhausted):
        build_pairing(m.finite_level(1), m.params)


@settings(max_examples=20, deadline=None, derandomize=True)
@given(st.lists(st.integers(min_value=0, max_value=728), min_size=1, max_size=4))
def test_reflection_holds_for_arbitrary_polynomials(coeffs):
    m = powers(tm(3), 2)
    table = build_pairing(m.finite_level(1), m.params)[1]
    assert check_reflection(table, LambdaPoly.from_ints(coeffs, CTX), samples=10)
