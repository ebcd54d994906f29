"""Named map families and the reference zoo."""

from __future__ import annotations

import math
from fractions import Fraction

from pmaps.errors import ValidationError
from pmaps.maps import PiecewiseMonotonicMap, affine

GOLDEN = (1 + math.sqrt(5)) / 2


def _num(v):
    return v if isinstance(v, (Fraction, int)) else float(v)


def tent(s=2, backend="float", name=None):
    """``T(x) = s x`` on (0, 1/2), ``s (1 - x)`` on (1/2, 1)."""
    s = _num(s)
    half = Fraction(1, 2)
    return PiecewiseMonotonicMap(
        [0, half, 1], [affine(s, 0), affine(-s, s)], backend=backend, name=name or "tent"
    )


def mod_one(beta, alpha=0, backend="float", name=None):
    """``T(x) = beta x + alpha (mod 1)`` with ``beta > 0`` and ``0 <= alpha < 1``."""
    beta, alpha = _num(beta), _num(alpha)
    if beta <= 0:
        raise ValidationError("mod_one needs beta > 0")
    if not 0 <= alpha < 1:
        raise ValidationError("mod_one needs 0 <= alpha < 1")
    crit = [0]
    j = 1
    while j < alpha + beta:
        crit.append((j - alpha) / beta)
        j += 1
    crit.append(1)
    branches = [affine(beta, alpha - j) for j in range(len(crit) - 1)]
    return PiecewiseMonotonicMap(crit, branches, backend=backend, name=name or "mod_one")


def beta(b, backend="float", name=None):
    """The beta-transformation ``T(x) = b x (mod 1)``."""
    return mod_one(b, 0, backend=backend, name=name or "beta")


def skew_tent(s_left, s_right, backend="float", name=None):
    """Continuous tent with slopes ``s_left`` and ``-s_right`` meeting at ``s_right/(s_left+s_right)``."""
    sl, sr = _num(s_left), _num(s_right)
    if sl <= 0 or sr <= 0:
        raise ValidationError("skew_tent slopes must be positive")
    c = sr / (sl + sr)
    return PiecewiseMonotonicMap(
        [0, c, 1], [affine(sl, 0), affine(-sr, sr)], backend=backend, name=name or "skew_tent"
    )


GENERATORS = {
    "tent": tent,
    "beta": beta,
    "mod_one": mod_one,
    "skew_tent": skew_tent,
}


# Reference zoo as map-spec text. Rational coefficients run on the exact
# backend; irrational ones on doubles.
ZOO = {
    "tent": "name = tent\nbackend = rational\ngenerator = tent(2)\n",
    "golden": "name = golden\nbackend = float\ngenerator = beta((1+sqrt(5))/2)\n",
    "skew_tent": "name = skew_tent\nbackend = rational\ngenerator = skew_tent(3, 3/2)\n",
    "mod_one": "name = mod_one\nbackend = float\ngenerator = mod_one(1+sqrt(2), 1/3)\n",
}


def zoo_map(name: str, backend: str | None = None) -> PiecewiseMonotonicMap:
    from pmaps.mapspec import load_map_spec

    try:
        text = ZOO[name]
    except KeyError:
        raise KeyError(f"no zoo map {name!r}; known: {', '.join(sorted(ZOO))}") from None
    return load_map_spec(text, backend)
