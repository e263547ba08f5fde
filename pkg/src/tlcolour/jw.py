"""Coloured Jones-Wenzl projectors.

``f_n^{ij}`` lives on the alternating sequence ``(i, j, i, ...)`` of length
n+1 and is built by the recursion

    f_n = F - (U_{n-2} / U_{n-1}) * F h_{n-1} F,   F = f_{n-1} (x) 1,

with ``U_k`` evaluated at ``(omega_ij, omega_ji)``.  A general sequence is cut
into maximal alternating blocks and its projector is the tensor product of
the block projectors.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .diagram import WrappingMatrix, generator_h, turnback
from .exact import chebychev2_eval
from .morphism import Morphism, compose, scale, add, tensor


class ChebyshevZero(ArithmeticError):
    """U_k(omega_ij, omega_ji) vanished where a projector needs it invertible."""

    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"U_{k}(omega_{i}{j}, omega_{j}{i}) = 0 for colours i={i}, j={j}")
        self.i = i
        self.j = j
        self.k = k

    @property
    def triple(self) -> Tuple[int, int, int]:
        return (self.i, self.j, self.k)


@dataclass(frozen=True)
class AlternatingBlock:
    first_colour: int
    second_colour: Optional[int]
    length: int

    @property
    def n(self) -> int:
        """Number of strands, n_a = length - 1."""
        return self.length - 1

    @property
    def seq(self) -> Tuple[int, ...]:
        if self.length == 1:
            return (self.first_colour,)
        pair = (self.first_colour, self.second_colour)
        return tuple(pair[t % 2] for t in range(self.length))


@dataclass(frozen=True)
class JWProjector:
    seq: Tuple[int, ...]
    morphism: Morphism


def alternating_seq(i: int, j: int, n: int) -> Tuple[int, ...]:
    return tuple((i, j)[t % 2] for t in range(n + 1))


def alternating_blocks(seq: Sequence[int]) -> List[AlternatingBlock]:
    """Greedy split into maximal alternating runs sharing one boundary colour."""
    seq = tuple(seq)
    if not seq:
        raise ValueError("empty colour sequence")
    cuts = []
    start = 0
    for t in range(2, len(seq)):
        if seq[t] != seq[t - 2]:
            cuts.append((start, t))
            start = t - 1
    cuts.append((start, len(seq)))
    out = []
    for a, b in cuts:
        part = seq[a:b]
        out.append(AlternatingBlock(part[0], part[1] if len(part) > 1 else None, len(part)))
    return out


_CACHE: Dict[tuple, Morphism] = {}
_LOCK = threading.Lock()


def clear_cache() -> None:
    with _LOCK:
        _CACHE.clear()


def _alternating(i: int, j: int, n: int, omega: WrappingMatrix) -> Morphism:
    key = (i, j, n, omega)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    seq = alternating_seq(i, j, n)
    if n <= 1:
        f = Morphism.identity(seq)
    else:
        x, y = omega[i, j], omega[j, i]
        below = chebychev2_eval(n - 1, x, y)
        if below == 0:
            raise ChebyshevZero(i, j, n - 1)
        prev = _alternating(i, j, n - 1, omega)
        wide = tensor(prev, Morphism.identity(seq[n - 1:]))
        h = Morphism.from_diagram(generator_h(seq, n - 1))
        middle = compose(compose(wide, h, omega), wide, omega)
        f = add(wide, scale(-chebychev2_eval(n - 2, x, y) / below, middle))
    with _LOCK:
        return _CACHE.setdefault(key, f)


def jw_alternating(i: int, j: int, n: int, omega: WrappingMatrix) -> JWProjector:
    if n < 0:
        raise ValueError("n must be non-negative")
    for c in (i, j):
        if not 1 <= c <= omega.ell:
            raise ValueError(f"colour {c} outside 1..{omega.ell}")
    # build bottom-up so the first failing U_k is the smallest one
    for k in range(2, n + 1):
        _alternating(i, j, k, omega)
    return JWProjector(alternating_seq(i, j, n), _alternating(i, j, n, omega))


def jw(seq: Sequence[int], omega: WrappingMatrix) -> JWProjector:
    seq = tuple(seq)
    if any(not 1 <= c <= omega.ell for c in seq):
        raise ValueError(f"colours must lie in 1..{omega.ell}")
    result = None
    for block in alternating_blocks(seq):
        if block.length == 1:
            part = Morphism.identity(block.seq)
        else:
            part = jw_alternating(block.first_colour, block.second_colour, block.n, omega).morphism
        result = part if result is None else tensor(result, part)
    return JWProjector(seq, result)


def _caps(seq: Tuple[int, ...]):
    """Admissible (k, h_k, cap_k) for 1-based k, as single-term morphisms."""
    n = len(seq) - 1
    for k in range(1, n):
        h = generator_h(seq, k)
        if h is None:
            continue
        yield k, Morphism.from_diagram(h), Morphism.from_diagram(turnback(seq, k, 1))


def check_annihilation(p: JWProjector, omega: WrappingMatrix) -> bool:
    f = p.morphism
    seq = tuple(p.seq)
    from .morphism import transpose

    for _, h, cap in _caps(seq):
        if not compose(h, f, omega).is_zero() or not compose(f, h, omega).is_zero():
            return False
        if not compose(f, cap, omega).is_zero():
            return False
        if not compose(transpose(cap), f, omega).is_zero():
            return False
    return True


def is_idempotent(f: Morphism, omega: WrappingMatrix) -> bool:
    return compose(f, f, omega) == f


def check_uniqueness(seq: Sequence[int], candidate: Morphism, omega: WrappingMatrix) -> bool:
    seq = tuple(seq)
    if candidate.top != seq or candidate.bottom != seq:
        return False
    if candidate.identity_coefficient() != 1:
        return False
    if not check_annihilation(JWProjector(seq, candidate), omega):
        return False
    if not is_idempotent(candidate, omega):
        return False
    try:
        ref = jw(seq, omega).morphism
    except ChebyshevZero:
        return False
    return candidate == ref


def block_dimension(seq: Sequence[int], omega: WrappingMatrix) -> Fraction:
    """Product over alternating blocks of U_{n_a}(omega_ij, omega_ji)."""
    out = Fraction(1)
    for b in alternating_blocks(seq):
        if b.length > 1:
            i, j = b.first_colour, b.second_colour
            out *= chebychev2_eval(b.n, omega[i, j], omega[j, i])
    return out
