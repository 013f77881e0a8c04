from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weyllab import ddphase
from weyllab.errors import PrecisionError


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_two_sum_is_error_free(a, b):
    s, e = ddphase.two_sum(a, b)
    assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


# m * 2**e keeps the partial products clear of underflow, as for n**k * t
_scaled = st.builds(lambda m, e: float(m) * 2.0**e, st.integers(-(2**53), 2**53), st.integers(-80, 40))


@given(_scaled, _scaled)
def test_two_prod_is_error_free(a, b):
    p, e = ddphase.two_prod(a, b)
    assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)


def test_power_split_exact_beyond_int64():
    hi, lo = ddphase.power_split(3000, 6)  # 3000**6 ~ 7e20
    for n in (1, 17, 2999, 3000):
        assert int(hi[n - 1]) + int(lo[n - 1]) == n**6
    assert not hi.flags.writeable


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.floats(0, 1, exclude_max=True))
def test_monomial_phase_matches_exact_rational(k, t):
    N = 300
    ph = ddphase.monomial_phase(N, k, t)
    T = Fraction(t)
    for n in (1, 7, 150, N):
        exact = (n**k * T) % 1
        d = abs(float(exact) - ph[n - 1])
        assert min(d, 1 - d) < 1e-12


def test_frac_of_tiny_negative_is_zero_or_in_range():
    r = ddphase.frac(np.array([-1e-20, -0.0, 0.0, 2.5]))
    assert np.all((r >= 0) & (r < 1))
    assert r[3] == 0.5


def test_power_guard():
    ddphase.check_power_guard(2**25, 4)
    with pytest.raises(PrecisionError):
        ddphase.check_power_guard(2**25 + 1, 4)
