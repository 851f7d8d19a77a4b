"""Signature-aware linear algebra on 4-vectors.

Vectors are plain ``numpy`` arrays whose last axis has length 4; every
function broadcasts over leading axes. The signature is always passed
explicitly so the same code path serves E^4 and E^4_1.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateSpan, LightlikeStep, ValidationError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Signature:
    """Index of the ambient metric: 0 for E^4, 1 for E^4_1 (<e4, e4> = -1)."""

    index: int = 0

    def __post_init__(self):
        if self.index not in (0, 1):
            raise ValidationError(f"signature index must be 0 or 1, got {self.index!r}")

    @property
    def diag(self):
        return np.array([1.0, 1.0, 1.0, -1.0 if self.index else 1.0])

    @property
    def metric(self):
        return np.diag(self.diag)

    @property
    def name(self):
        return "E4_1" if self.index else "E4"


EUCLIDEAN = Signature(0)
MINKOWSKI = Signature(1)

E1, E2, E3, E4 = np.eye(4)


class CausalCharacter(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    ZERO = "zero"


def as_signature(s):
    if isinstance(s, Signature):
        return s
    return Signature(int(s))


def inner(a, b, s):
    """Signature inner product, broadcast over leading axes."""
    s = as_signature(s)
    return np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float) * s.diag, axis=-1)


def norm_sq(v, s):
    return inner(v, v, s)


def causal_character(v, s, tol=DEFAULT_TOL):
    """Classify a single vector by the sign of <v, v>.

    A vector is ``zero`` when all components are below ``tol`` and
    ``lightlike`` when |<v, v>| is below ``tol`` times its squared Euclidean
    length, which makes the answer invariant under rescaling.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    v = np.asarray(v, dtype=float)
    if np.max(np.abs(v)) < tol:
        return CausalCharacter.ZERO
    q = float(inner(v, v, s))
    if abs(q) < tol * float(v @ v):
        return CausalCharacter.LIGHTLIKE
    return CausalCharacter.SPACELIKE if q > 0 else CausalCharacter.TIMELIKE


def orthonormalize(vs, s, tol=DEFAULT_TOL):
    """Gram-Schmidt with the signature inner product.

    Returns a list of ``(vector, sign)`` pairs with <v_i, v_i> = sign_i = +-1.

    Raises
    ------
    DegenerateSpan
        if an input is (numerically) in the span of the previous ones.
    LightlikeStep
        if an intermediate vector is null and cannot be normalized.
    """
    out = []
    for raw in vs:
        w = np.array(raw, dtype=float)
        scale = np.linalg.norm(w)
        for e, sign in out:
            w = w - sign * inner(w, e, s) * e
        if np.linalg.norm(w) <= tol * max(scale, 1.0):
            raise DegenerateSpan("input vectors are linearly dependent")
        q = float(inner(w, w, s))
        if abs(q) <= tol * float(w @ w):
            raise LightlikeStep("cannot normalize a lightlike vector")
        sign = 1.0 if q > 0 else -1.0
        out.append((w / np.sqrt(abs(q)), sign))
    return out


def gram(vectors, s):
    """Matrix of pairwise inner products of the columns of ``vectors`` (..., 4, k)."""
    d = as_signature(s).diag
    vectors = np.asarray(vectors, dtype=float)
    return np.einsum("...ik,i,...il->...kl", vectors, d, vectors)
