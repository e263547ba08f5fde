"""Rational linear combinations of coloured diagrams.

A :class:`Morphism` has fixed top and bottom colour sequences, so a diagram
in it is determined by its matching; terms are stored keyed by matching.
Composition accumulates in integers (coefficients and loop values are put
over common denominators) and converts back to fractions once per result
term, which keeps large products such as ``f_7 * f_7`` cheap.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .diagram import (
    ColouredDiagram,
    Matching,
    WrappingMatrix,
    colouring_consistent,
    compose_matchings,
    composition_cache,
    diagram_from_json,
    diagram_to_json,
    identity_matching,
    tensor_matchings,
    trace_loops,
    transpose_matching,
)
from .exact import format_rational, parse_rational


class Morphism:
    __slots__ = ("top", "bottom", "_terms")

    def __init__(self, top: Sequence[int], bottom: Sequence[int],
                 terms: Optional[Mapping[Union[ColouredDiagram, Matching], object]] = None):
        top = tuple(top)
        bottom = tuple(bottom)
        if not top or not bottom:
            raise ValueError("colour sequences must be non-empty")
        store: Dict[Matching, Fraction] = {}
        for key, c in (terms or {}).items():
            if isinstance(key, ColouredDiagram):
                if key.top != top or key.bottom != bottom:
                    raise ValueError("diagram sequences differ from the morphism's")
                m = key.matching
            else:
                m = key
                if (m.n_top, m.n_bot) != (len(top) - 1, len(bottom) - 1):
                    raise ValueError("matching size differs from the morphism's")
                if not colouring_consistent(m, top, bottom):
                    raise ValueError("colouring is not face-consistent")
            c = Fraction(c)
            if c:
                store[m] = store.get(m, 0) + c
        self.top = top
        self.bottom = bottom
        self._terms = {m: c for m, c in store.items() if c}

    @classmethod
    def _raw(cls, top: tuple, bottom: tuple, terms: Dict[Matching, Fraction]) -> Morphism:
        self = object.__new__(cls)
        self.top = top
        self.bottom = bottom
        self._terms = terms
        return self

    @classmethod
    def zero(cls, top: Sequence[int], bottom: Sequence[int]) -> Morphism:
        return cls._raw(tuple(top), tuple(bottom), {})

    @classmethod
    def identity(cls, seq: Sequence[int]) -> Morphism:
        seq = tuple(seq)
        return cls._raw(seq, seq, {identity_matching(len(seq) - 1): Fraction(1)})

    @classmethod
    def from_diagram(cls, d: Optional[ColouredDiagram], coeff=1,
                     top: Optional[Sequence[int]] = None, bottom: Optional[Sequence[int]] = None) -> Morphism:
        """Single-term morphism; ``d = None`` gives zero (sequences then required)."""
        if d is None:
            if top is None or bottom is None:
                raise ValueError("zero diagram needs explicit sequences")
            return cls.zero(top, bottom)
        c = Fraction(coeff)
        return cls._raw(d.top, d.bottom, {d.matching: c} if c else {})

    @property
    def terms(self) -> Dict[ColouredDiagram, Fraction]:
        """Terms keyed by coloured diagram, in canonical order."""
        return {ColouredDiagram(m, self.top, self.bottom, check=False): self._terms[m]
                for m in sorted(self._terms, key=Matching.sort_key)}

    def matching_terms(self) -> Dict[Matching, Fraction]:
        return dict(self._terms)

    def coefficient(self, key: Union[ColouredDiagram, Matching]) -> Fraction:
        m = key.matching if isinstance(key, ColouredDiagram) else key
        return self._terms.get(m, Fraction(0))

    def identity_coefficient(self) -> Fraction:
        if len(self.top) != len(self.bottom):
            return Fraction(0)
        return self._terms.get(identity_matching(len(self.top) - 1), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.top == other.top and self.bottom == other.bottom and self._terms == other._terms

    __hash__ = None

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __neg__(self):
        return scale(-1, self)

    def __mul__(self, c):
        if isinstance(c, Morphism):
            return NotImplemented
        return scale(c, self)

    __rmul__ = __mul__

    def __repr__(self):
        body = " + ".join(f"{format_rational(c)}*{list(m.pairing)}"
                          for m, c in sorted(self._terms.items(), key=lambda t: t[0].sort_key()))
        return f"Morphism({self.top}->{self.bottom}: {body or '0'})"


def add(a: Morphism, b: Morphism) -> Morphism:
    if a.top != b.top or a.bottom != b.bottom:
        raise ValueError("cannot add morphisms with different sequences")
    out = dict(a._terms)
    for m, c in b._terms.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return Morphism._raw(a.top, a.bottom, out)


def scale(c, a: Morphism) -> Morphism:
    c = Fraction(c)
    if not c:
        return Morphism.zero(a.top, a.bottom)
    return Morphism._raw(a.top, a.bottom, {m: c * v for m, v in a._terms.items()})


def linear_combination(pairs: Iterable[Tuple[object, Morphism]], top, bottom) -> Morphism:
    out: Dict[Matching, Fraction] = {}
    top, bottom = tuple(top), tuple(bottom)
    for c, a in pairs:
        if a.top != top or a.bottom != bottom:
            raise ValueError("cannot add morphisms with different sequences")
        c = Fraction(c)
        for m, v in a._terms.items():
            out[m] = out.get(m, 0) + c * v
    return Morphism._raw(top, bottom, {m: v for m, v in out.items() if v})


def _integer_terms(terms: Dict[Matching, Fraction]):
    den = 1
    for c in terms.values():
        den = math.lcm(den, c.denominator)
    return [(m, c.numerator * (den // c.denominator)) for m, c in terms.items()], den


def _loop_weights(mid: Sequence[int], omega: WrappingMatrix, top_loops: int):
    """Memoized integer loop weights: prod(W) * q^(top_loops - #loops)."""
    W, q = omega.scaled()
    qpow = [q ** e for e in range(top_loops + 1)]
    cache: Dict[tuple, int] = {(): qpow[top_loops]}

    def weight(loops):
        w = cache.get(loops)
        if w is None:
            w = qpow[top_loops - len(loops)]
            for p in loops:
                w *= W[mid[p + 1]][mid[p]]
            cache[loops] = w
        return w

    return weight, cache, qpow[top_loops]


def compose(upper: Morphism, lower: Morphism, omega: WrappingMatrix) -> Morphism:
    """Stack ``upper`` on top of ``lower`` (result runs upper.top -> lower.bottom)."""
    if len(upper.bottom) != len(lower.top):
        raise ValueError("strand counts do not match")
    if upper.bottom != lower.top or not upper._terms or not lower._terms:
        return Morphism.zero(upper.top, lower.bottom)
    mid = upper.bottom
    A, da = _integer_terms(upper._terms)
    B, db = _integer_terms(lower._terms)
    weight, wcache, qmax = _loop_weights(mid, omega, (len(mid) - 1) // 2)
    wget = wcache.get
    acc: Dict[Matching, int] = {}
    get = acc.get
    comp = compose_matchings
    cget = composition_cache().get
    for ma, ca in A:
        for mb, cb in B:
            hit = cget((ma, mb))
            r, loops = hit if hit is not None else comp(ma, mb)
            w = wget(loops)
            if w is None:
                w = weight(loops)
            if w:
                acc[r] = get(r, 0) + ca * cb * w
    den = da * db * qmax
    return Morphism._raw(upper.top, lower.bottom,
                         {r: Fraction(v, den) for r, v in acc.items() if v})


def tensor(a: Morphism, b: Morphism) -> Morphism:
    """Side-by-side product; zero when the seam colours differ."""
    top = a.top + b.top[1:]
    bottom = a.bottom + b.bottom[1:]
    if a.top[-1] != b.top[0] or a.bottom[-1] != b.bottom[0]:
        return Morphism.zero(top, bottom)
    out = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            out[tensor_matchings(ma, mb)] = ca * cb
    return Morphism._raw(top, bottom, out)


def transpose(a: Morphism) -> Morphism:
    return Morphism._raw(a.bottom, a.top, {transpose_matching(m): c for m, c in a._terms.items()})


def trace(a: Morphism, omega: WrappingMatrix) -> Fraction:
    """Right-hand closure of an endomorphism, evaluated to a scalar."""
    if a.top != a.bottom:
        raise ValueError("trace needs an endomorphism")
    if not a._terms:
        return Fraction(0)
    A, den = _integer_terms(a._terms)
    n = len(a.top) - 1
    weight, _, qmax = _loop_weights(a.top, omega, n)
    total = sum(c * weight(trace_loops(m)) for m, c in A)
    return Fraction(total, den * qmax)


def pairing(a: Morphism, b: Morphism, omega: WrappingMatrix) -> Fraction:
    """Trace pairing tr(a b^t)."""
    if a.top != b.top or a.bottom != b.bottom:
        raise ValueError("pairing needs morphisms with equal sequences")
    return pairing_unchecked(a, b, omega)


def pairing_unchecked(a: Morphism, b: Morphism, omega: WrappingMatrix) -> Fraction:
    """tr(a b^t) without building the composite; zero across different blocks."""
    if a.top != b.top or a.bottom != b.bottom or not a._terms or not b._terms:
        return Fraction(0)
    A, da = _integer_terms(a._terms)
    B, db = _integer_terms(b._terms)
    mid = a.bottom
    top = a.top
    W, q = omega.scaled()
    h_mid = (len(mid) - 1) // 2
    n = len(top) - 1
    cap = h_mid + n
    qpow = [q ** e for e in range(cap + 1)]
    total = 0
    for mb, cb in B:
        tb = transpose_matching(mb)
        for ma, ca in A:
            r, loops = compose_matchings(ma, tb)
            tl = trace_loops(r)
            w = qpow[cap - len(loops) - len(tl)]
            for p in loops:
                w *= W[mid[p + 1]][mid[p]]
            for k in tl:
                w *= W[top[k + 1]][top[k]]
            total += ca * cb * w
    return Fraction(total, da * db * qpow[cap])


def partial_trace_right(a: Morphism, omega: WrappingMatrix) -> Morphism:
    """Close the rightmost strand of an endomorphism around the right side.

    For ``a`` on ``(.., c_prev, c_last)`` the result is an endomorphism of the
    sequence with the last colour removed.
    """
    from .diagram import turnback

    if a.top != a.bottom or len(a.top) < 2:
        raise ValueError("partial trace needs an endomorphism with at least one strand")
    seq = a.top
    n = len(seq) - 1
    ext = seq + (seq[-2],)
    cap = Morphism.from_diagram(turnback(ext, n, 1))
    cup = transpose(cap)
    wide = tensor(a, Morphism.identity((seq[-1], seq[-2])))
    return compose(compose(cup, wide, omega), cap, omega)


def morphism_rank(items: List[Morphism]) -> int:
    """Rank of a list of morphisms in the same Hom-space (exact elimination)."""
    rows: List[Dict[Matching, Fraction]] = []
    pivots: List[Matching] = []
    for a in items:
        v = dict(a._terms)
        for piv, row in zip(pivots, rows):
            c = v.get(piv)
            if c:
                for m, x in row.items():
                    nv = v.get(m, 0) - c * x
                    if nv:
                        v[m] = nv
                    else:
                        v.pop(m, None)
        if v:
            piv = min(v, key=Matching.sort_key)
            inv = 1 / v[piv]
            rows.append({m: x * inv for m, x in v.items()})
            pivots.append(piv)
    return len(rows)


def morphism_to_json(a: Morphism) -> dict:
    return {
        "top": list(a.top),
        "bottom": list(a.bottom),
        "terms": [{"diagram": diagram_to_json(d), "coeff": format_rational(c)}
                  for d, c in a.terms.items()],
    }


def morphism_from_json(data: dict) -> Morphism:
    terms = {}
    top, bottom = tuple(data["top"]), tuple(data["bottom"])
    for t in data["terms"]:
        d = diagram_from_json(t["diagram"])
        if d in terms:
            raise ValueError("duplicate diagram in morphism")
        terms[d] = parse_rational(t["coeff"])
    return Morphism(top, bottom, terms)
