import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pnmc_lab.errors import DegenerateSpan, LightlikeStep, ValidationError
from pnmc_lab.pseudo_euclidean import (E1, E2, E3, E4, EUCLIDEAN, MINKOWSKI, CausalCharacter,
                                       Signature, causal_character, gram, inner, orthonormalize)

vec = arrays(np.float64, 4, elements=st.floats(-10, 10, allow_nan=False))


def test_signature_diagonals():
    assert np.array_equal(EUCLIDEAN.diag, [1, 1, 1, 1])
    assert np.array_equal(MINKOWSKI.diag, [1, 1, 1, -1])
    with pytest.raises(ValidationError):
        Signature(2)


def test_inner_on_basis():
    assert inner(E4, E4, MINKOWSKI) == -1
    assert inner(E4, E4, EUCLIDEAN) == 1
    assert inner(E1, E2, MINKOWSKI) == 0


def test_causal_characters():
    assert causal_character(E1 + E4, MINKOWSKI) is CausalCharacter.LIGHTLIKE
    assert causal_character(E4, MINKOWSKI) is CausalCharacter.TIMELIKE
    assert causal_character(E3, MINKOWSKI) is CausalCharacter.SPACELIKE
    assert causal_character(np.zeros(4), MINKOWSKI) is CausalCharacter.ZERO
    # scale invariance of the lightlike test
    assert causal_character(1e-6 * (E1 + E4), MINKOWSKI) is CausalCharacter.LIGHTLIKE


@given(vec, vec, vec, st.floats(-5, 5))
def test_inner_is_symmetric_bilinear(a, b, c, t):
    for s in (EUCLIDEAN, MINKOWSKI):
        assert np.isclose(inner(a, b, s), inner(b, a, s))
        assert np.isclose(inner(a + t * c, b, s), inner(a, b, s) + t * inner(c, b, s), atol=1e-9)


@settings(max_examples=50)
@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3, allow_nan=False)))
def test_orthonormalize_gram_is_diagonal(m):
    vs = list(m + 4 * np.eye(4))
    try:
        out = orthonormalize(vs, MINKOWSKI)
    except (DegenerateSpan, LightlikeStep):
        return
    basis = np.stack([v for v, _ in out], axis=-1)
    signs = [s for _, s in out]
    assert np.allclose(gram(basis, MINKOWSKI), np.diag(signs), atol=1e-7)
    assert sorted(signs) == [-1, 1, 1, 1]


def test_orthonormalize_errors():
    with pytest.raises(DegenerateSpan):
        orthonormalize([E1, 2 * E1], EUCLIDEAN)
    with pytest.raises(LightlikeStep):
        orthonormalize([E1 + E4], MINKOWSKI)
