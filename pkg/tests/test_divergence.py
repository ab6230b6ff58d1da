import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qphi.channels import apply_channel, random_channel
from qphi.divergence import (
    LN2,
    delta,
    negative_type_check,
    qjsd,
    qjsd_gram,
    von_neumann_entropy,
)
from qphi.errors import LayoutMismatch, TooFewStates
from qphi.states import (
    bell,
    ginibre_mixed,
    haar_pure,
    maximally_mixed,
    pure_state,
    substream,
)

# spectrum of (bell + I/4)/2; entropy frozen from an independent evaluation
MIDPOINT_ENTROPY = 1.0735428464085232


def _pair(seed: int):
    a = ginibre_mixed((2, 2), 4, substream(seed, "div-a"))
    b = ginibre_mixed((2, 2), 4, substream(seed, "div-b"))
    return a, b


def test_entropy_known_values():
    assert von_neumann_entropy(bell()) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(maximally_mixed((2, 2))) == pytest.approx(np.log(4), abs=1e-12)
    mid = np.diag([5 / 8, 1 / 8, 1 / 8, 1 / 8]).astype(complex)
    assert von_neumann_entropy(mid) == pytest.approx(MIDPOINT_ENTROPY, abs=1e-12)


def test_qjsd_of_bell_and_its_marginal_product():
    val = qjsd(bell(), maximally_mixed((2, 2)))
    assert val == pytest.approx(MIDPOINT_ENTROPY - LN2, abs=1e-12)


def test_orthogonal_pure_states_reach_the_bound():
    zero = pure_state(np.array([1.0, 0.0]), (2,))
    one = pure_state(np.array([0.0, 1.0]), (2,))
    assert qjsd(zero, one) == pytest.approx(LN2, abs=1e-12)
    assert delta(zero, one) == pytest.approx(np.sqrt(LN2), abs=1e-12)


def test_qjsd_layout_mismatch():
    with pytest.raises(LayoutMismatch):
        qjsd(bell(), maximally_mixed((4,)))


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=150, deadline=None)
def test_qjsd_symmetry_and_bounds(seed):
    a, b = _pair(seed)
    d1 = qjsd(a, b)
    d2 = qjsd(b, a)
    assert abs(d1 - d2) <= 1e-12
    assert -1e-10 <= d1 <= LN2 + 1e-10
    assert qjsd(a, a) <= 1e-12


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=150, deadline=None)
def test_sqrt_qjsd_triangle_inequality(seed):
    a, b = _pair(seed)
    c = haar_pure((2, 2), substream(seed, "div-c"))
    assert delta(a, c) <= delta(a, b) + delta(b, c) + 1e-9


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60, deadline=None)
def test_data_processing_contraction(seed):
    a, b = _pair(seed)
    ch = random_channel(4, 4, 2, substream(seed, "div-ch"))
    assert qjsd(apply_channel(ch, a), apply_channel(ch, b)) <= qjsd(a, b) + 1e-9


def test_gram_matrix_shape_and_diagonal():
    states = [ginibre_mixed((2,), 2, substream(k, "gram")) for k in range(4)]
    g = qjsd_gram(states)
    assert g.shape == (4, 4)
    assert np.allclose(np.diag(g), 0.0, atol=1e-12)
    assert np.allclose(g, g.T, atol=1e-12)


def test_negative_type_sampling():
    states = [ginibre_mixed((2, 2), 4, substream(k, "neg")) for k in range(6)]
    rep = negative_type_check(states, 500, substream(0, "neg-coef"))
    assert rep.size == 6 and rep.trials == 500
    assert rep.negative_type_max <= 1e-9
    # the shifted kernel ln2 - D is reported, not asserted
    assert np.isfinite(rep.kernel_min_eigenvalue)


def test_negative_type_needs_two_states():
    with pytest.raises(TooFewStates):
        negative_type_check([bell()], 10, 0)
