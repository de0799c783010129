"""Exact arithmetic, Jacobians, and shear normalization."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npvset.algebra import (
    BiPoly,
    Scalar,
    UniPoly,
    bipoly,
    jacobian,
    normalize_monic,
    poly_gcd,
    sqrt_scalar,
)
from npvset.errors import PreconditionFailed

from conftest import sc


def up(*coeffs):
    return UniPoly.of(*coeffs)


class TestScalar:
    def test_field_ops(self):
        a = sc(Fraction(1, 2), 1)
        b = sc(3, Fraction(-1, 3))
        assert (a + b) - b == a
        assert (a * b) / b == a
        assert a * a.inverse() == sc(1)

    def test_canonical_equality(self):
        assert sc(Fraction(2, 4)) == sc(Fraction(1, 2))

    def test_pow_negative(self):
        a = sc(0, 2)
        assert a ** -2 == (a * a).inverse()

    def test_str(self):
        assert str(sc(Fraction(3, 2))) == "3/2"
        assert str(sc(-1, 2)) == "-1+2i"
        assert str(sc(0, -1)) == "-i"

    def test_sqrt(self):
        assert sqrt_scalar(sc(0, 2)) in (sc(1, 1), sc(-1, -1))
        assert sqrt_scalar(sc(-4)) in (sc(0, 2), sc(0, -2))
        assert sqrt_scalar(sc(2)) is None
        assert sqrt_scalar(sc(Fraction(9, 4))) in (
            sc(Fraction(3, 2)),
            sc(Fraction(-3, 2)),
        )


class TestUniPoly:
    def test_mul_example(self):
        # (s+1)(s-1) = s^2 - 1
        assert up(1, 1) * up(-1, 1) == up(-1, 0, 1)

    def test_derivative_example(self):
        # d/ds (s^2 + s) = 2s + 1
        assert up(0, 1, 1).derivative() == up(1, 2)

    def test_eval_example(self):
        assert up(-1, 0, 1).evaluate(sc(-1)).is_zero()

    def test_divmod_roundtrip(self):
        a = up(1, 2, 0, 1)
        b = up(-1, 1)
        q, r = a.divmod(b)
        assert q * b + r == a

    def test_gcd(self):
        a = up(-1, 0, 1)  # (s-1)(s+1)
        b = up(1, 1)
        assert poly_gcd(a, b) == up(1, 1)

    def test_compose(self):
        p = up(0, 0, 1)  # s^2
        q = up(1, 1)  # s + 1
        assert p.compose(q) == up(1, 2, 1)


scalar_strategy = st.builds(
    lambda a, b: sc(a, b),
    st.integers(-4, 4),
    st.integers(-2, 2),
)


def small_bipoly():
    return st.dictionaries(
        st.tuples(st.integers(0, 2), st.integers(0, 2)),
        scalar_strategy,
        max_size=4,
    ).map(BiPoly)


class TestBiPolyProperties:
    @settings(max_examples=60)
    @given(small_bipoly(), small_bipoly(), small_bipoly())
    def test_ring_axioms(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a

    @settings(max_examples=60)
    @given(small_bipoly(), small_bipoly())
    def test_jacobian_antisymmetric(self, p, q):
        assert jacobian(p, q) == -jacobian(q, p)

    @settings(max_examples=60)
    @given(small_bipoly(), small_bipoly(), small_bipoly())
    def test_jacobian_bilinear(self, p, q, r):
        assert jacobian(p + r, q) == jacobian(p, q) + jacobian(r, q)


class TestJacobian:
    def test_coordinate_pair(self):
        assert jacobian(bipoly({(1, 0): 1}), bipoly({(0, 1): 1})) == bipoly(
            {(0, 0): 1}
        )

    def test_f2(self):
        # P=x+y, Q=xy+y^2: P_x=1, P_y=1, Q_x=y, Q_y=x+2y -> (x+2y)-y = x+y
        p = bipoly({(1, 0): 1, (0, 1): 1})
        q = bipoly({(1, 1): 1, (0, 2): 1})
        assert jacobian(p, q) == bipoly({(1, 0): 1, (0, 1): 1})

    def test_x_squared_xy(self):
        # P=x^2, Q=xy: P_x=2x, P_y=0, Q_x=y, Q_y=x -> 2x^2
        p = bipoly({(2, 0): 1})
        q = bipoly({(1, 1): 1})
        assert jacobian(p, q) == bipoly({(2, 0): 2})


class TestNormalizeMonic:
    def test_already_monic(self):
        p = bipoly({(1, 0): 1, (0, 1): 1})
        q = bipoly({(1, 1): 1, (0, 2): 1})
        f = normalize_monic(p, q)
        assert f.shear == 0 and f.p == p and f.q == q

    def test_shear_one(self):
        # (x, xy) -> (x+y, xy+y^2) with t=1
        f = normalize_monic(bipoly({(1, 0): 1}), bipoly({(1, 1): 1}))
        assert f.shear == 1
        assert f.p == bipoly({(1, 0): 1, (0, 1): 1})
        assert f.q == bipoly({(1, 1): 1, (0, 2): 1})

    def test_shear_one_swapped(self):
        f = normalize_monic(bipoly({(1, 1): 1}), bipoly({(1, 0): 1}))
        assert f.shear == 1
        assert f.p == bipoly({(1, 1): 1, (0, 2): 1})
        assert f.q == bipoly({(1, 0): 1, (0, 1): 1})

    def test_rejects_constant(self):
        with pytest.raises(PreconditionFailed):
            normalize_monic(bipoly({(0, 0): 1}), bipoly({(0, 1): 1}))

    @settings(max_examples=40)
    @given(small_bipoly(), small_bipoly(), st.integers(0, 3))
    def test_shear_chain_rule(self, p, q, t):
        # jacobian of the sheared pair = sheared jacobian (shear has det 1)
        assert jacobian(p.shear(t), q.shear(t)) == jacobian(p, q).shear(t)

    def test_monic_after_normalization(self):
        f = normalize_monic(bipoly({(1, 0): 1}), bipoly({(0, 2): 1}))
        assert f.p.deg_y == f.p.total_degree
        assert f.q.deg_y == f.q.total_degree

    def test_constant_jacobian_preserved(self):
        p = bipoly({(1, 0): 1})  # (x, y^2 + x): J = -2y? use J const pair
        q = bipoly({(0, 1): 1})
        f = normalize_monic(p + bipoly({(0, 2): 1}), q)
        # (x+y^2, y) has J = 1; shearing keeps it constant
        assert f.jac.is_constant()
