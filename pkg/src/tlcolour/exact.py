"""Exact scalars and two-variable Chebychev polynomials.

Scalars are :class:`fractions.Fraction` values.  Polynomials in ``x`` and
``y`` with integer coefficients are stored sparsely in :class:`BivarPoly`.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

Rational = Fraction

Scalar = Union[int, Fraction]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction.

    Decimal strings are rejected so that every value is bit-exact.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(p, q)


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


Monomial = Tuple[int, int]


class BivarPoly:
    """Sparse polynomial in x, y over the integers.

    ``terms`` maps ``(deg_x, deg_y)`` to a nonzero int.  Instances are treated
    as immutable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, int]] = None):
        clean = {}
        for (dx, dy), c in (terms or {}).items():
            if dx < 0 or dy < 0:
                raise ValueError("negative exponent")
            if int(c) != c:
                raise ValueError("coefficients must be integers")
            if c:
                clean[(int(dx), int(dy))] = int(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def const(cls, c: int) -> BivarPoly:
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> BivarPoly:
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> BivarPoly:
        return cls({(0, 1): 1})

    @property
    def terms(self) -> Dict[Monomial, int]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, int]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = BivarPoly.const(other)
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    @staticmethod
    def _coerce(other) -> BivarPoly:
        if isinstance(other, BivarPoly):
            return other
        if isinstance(other, int):
            return BivarPoly.const(other)
        raise TypeError(f"cannot combine BivarPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Monomial, int] = {}
        for (a, b), c in self._terms.items():
            for (e, f), d in other._terms.items():
                key = (a + e, b + f)
                out[key] = out.get(key, 0) + c * d
        return BivarPoly(out)

    __rmul__ = __mul__

    def degree_y(self) -> int:
        return max((dy for _, dy in self._terms), default=-1)

    def evaluate(self, x, y) -> Fraction:
        x = Fraction(x)
        y = Fraction(y)
        return sum((c * x ** dx * y ** dy for (dx, dy), c in self._terms.items()), Fraction(0))

    def sorted_terms(self) -> List[Tuple[int, int, int]]:
        """Terms in display order: graded lex with x > y."""
        keys = sorted(self._terms, key=lambda m: (-(m[0] + m[1]), -m[0]))
        return [(dx, dy, self._terms[(dx, dy)]) for dx, dy in keys]

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for dx, dy, c in self.sorted_terms():
            factors = []
            for name, e in (("x", dx), ("y", dy)):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"BivarPoly({str(self)!r})"


def poly_swap(p: BivarPoly) -> BivarPoly:
    """Exchange the roles of x and y."""
    return BivarPoly({(dy, dx): c for (dx, dy), c in p.items()})


_cheb_cache: List[BivarPoly] = [BivarPoly.const(1), BivarPoly.y()]
_cheb_lock = threading.Lock()


def chebychev2(n: int) -> BivarPoly:
    """Two-variable Chebychev polynomial U_n(x, y).

    U_0 = 1, U_1 = y, and U_n = x U_{n-1} - U_{n-2} for even n, with y in
    place of x for odd n.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n < len(_cheb_cache):
        return _cheb_cache[n]
    with _cheb_lock:
        x, y = BivarPoly.x(), BivarPoly.y()
        while len(_cheb_cache) <= n:
            k = len(_cheb_cache)
            step = x if k % 2 == 0 else y
            _cheb_cache.append(step * _cheb_cache[k - 1] - _cheb_cache[k - 2])
    return _cheb_cache[n]


def chebychev2_eval(n: int, x, y) -> Fraction:
    """U_n(x, y) computed by running the recursion on scalars."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = Fraction(x)
    y = Fraction(y)
    prev, cur = Fraction(1), y
    if n == 0:
        return prev
    for k in range(2, n + 1):
        prev, cur = cur, (x if k % 2 == 0 else y) * cur - prev
    return cur


def check_swap_identity(m: int) -> bool:
    """Swapped U_m equals U_m (m even), or y*swap(U_m) = x*U_m (m odd)."""
    u = chebychev2(m)
    s = poly_swap(u)
    if m % 2 == 0:
        return s == u
    return BivarPoly.y() * s == BivarPoly.x() * u


def check_expanded_formula(m: int, p: int) -> bool:
    """Check the splitting of U_m at position p (1 < p < m)."""
    if not 1 < p < m:
        raise ValueError(f"need 1 < p < m, got p={p}, m={m}")
    U = chebychev2
    if m % 2 == 0:
        rhs = poly_swap(U(p)) * U(m - p) - poly_swap(U(p - 1)) * U(m - p - 1)
    else:
        rhs = U(p) * U(m - p) - U(p - 1) * U(m - p - 1)
    return rhs == U(m)


# Univariate polynomials in x over Q, as dense lists of Fractions (index = degree).

def _trim(a: List[Fraction]) -> List[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _udivmod(a: List[Fraction], b: List[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
    return _trim(q), a


def _by_y(p: BivarPoly) -> Dict[int, List[Fraction]]:
    out: Dict[int, List[Fraction]] = {}
    for (dx, dy), c in p.items():
        row = out.setdefault(dy, [])
        if len(row) <= dx:
            row.extend([Fraction(0)] * (dx + 1 - len(row)))
        row[dx] += c
    return out


def poly_divides(d: BivarPoly, p: BivarPoly) -> Optional[BivarPoly]:
    """Return q with p = d*q in Z[x, y], or None if no such q exists.

    Division runs in y with coefficients in Q[x]; each step needs the leading
    coefficient of d to divide the current leading coefficient exactly.
    """
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    dd = _by_y(d)
    ddeg = max(dd)
    dlead = dd[ddeg]
    rem = _by_y(p)
    quot: Dict[Monomial, Fraction] = {}
    while rem:
        top = max(rem)
        if top < ddeg:
            return None
        c, r = _udivmod(rem[top], dlead)
        if r:
            return None
        shift = top - ddeg
        for dx, v in enumerate(c):
            if v:
                quot[(dx, shift)] = quot.get((dx, shift), 0) + v
        for dy, row in dd.items():
            tgt = rem.setdefault(dy + shift, [])
            need = len(row) + len(c) - 1
            if len(tgt) < need:
                tgt.extend([Fraction(0)] * (need - len(tgt)))
            for i, a in enumerate(row):
                if a:
                    for j, b in enumerate(c):
                        tgt[i + j] -= a * b
        for k in [k for k, row in rem.items() if not _trim(row)]:
            del rem[k]
    if any(v.denominator != 1 for v in quot.values()):
        return None
    return BivarPoly({m: int(v) for m, v in quot.items()})


def divisibility_pairs(max_m: int, max_n: int) -> List[Tuple[int, int, bool]]:
    """Search harness for U_m | U_n with 1 <= m <= n.

    Returns ``(m, n, predicted)`` for every pair where division succeeds;
    ``predicted`` says whether m+1 divides n+1.  Pairs with ``predicted``
    False would be counterexamples to the converse.
    """
    out = []
    for m in range(1, max_m + 1):
        for n in range(m, max_n + 1):
            if poly_divides(chebychev2(m), chebychev2(n)) is not None:
                out.append((m, n, (n + 1) % (m + 1) == 0))
    return out


def poly_to_json(p: BivarPoly) -> list:
    return [[dx, dy, str(c)] for dx, dy, c in p.sorted_terms()]


def poly_from_json(data: Iterable) -> BivarPoly:
    terms = {}
    for dx, dy, c in data:
        q = parse_rational(c)
        if q.denominator != 1:
            raise ValueError("polynomial coefficients must be integers")
        terms[(int(dx), int(dy))] = terms.get((int(dx), int(dy)), 0) + int(q)
    return BivarPoly(terms)
