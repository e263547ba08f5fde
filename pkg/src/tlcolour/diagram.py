"""Crossingless matchings, their faces, colourings, and diagram algebra.

Boundary conventions
--------------------
A matching with ``n`` top and ``m`` bottom points numbers its boundary
cyclically: top points ``0..n-1`` left to right, then bottom points
``n..n+m-1`` right to left.  Interval ``I_k`` runs from point ``k`` to point
``k+1`` (mod ``N = n+m``).  ``I_{N-1}`` crosses the left wall and carries
``top[0]`` and ``bottom[0]``; ``I_{n-1}`` crosses the right wall and carries
``top[n]`` and ``bottom[m]``.  Remaining top colour ``top[t]`` sits on
``I_{t-1}`` and bottom colour ``bottom[s]`` on ``I_{n+m-s-1}`` (0-based).

Internally most work happens in *left-to-right* coordinates: top points
``0..n-1`` then bottom points ``n..n+m-1``, both read left to right.

Colours are positive ints.  Sequences are tuples of length points+1.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import format_rational, parse_rational

ColourSeq = Tuple[int, ...]

# Bound for the pairwise composition cache; it is simply cleared when full.
COMPOSE_CACHE_LIMIT = 1_500_000


def _lr_to_cyc(n_top: int, n: int, e: int) -> int:
    return e if e < n_top else n - 1 - (e - n_top)


def _cyc_to_lr(n_top: int, n: int, c: int) -> int:
    return c if c < n_top else n_top + (n - 1 - c)


@lru_cache(maxsize=None)
def _perms(n_top: int, n: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(lr -> cyclic, cyclic -> lr) position tables."""
    to_cyc = tuple(_lr_to_cyc(n_top, n, e) for e in range(n))
    to_lr = tuple(_cyc_to_lr(n_top, n, c) for c in range(n))
    return to_cyc, to_lr


_INTERN: Dict[tuple, "Matching"] = {}
_LR_INTERN: Dict[tuple, "Matching"] = {}
_INTERN_LOCK = threading.Lock()


class Matching:
    """Non-crossing perfect matching of ``n_top + n_bot`` boundary points.

    ``pairing[p]`` is the cyclic partner of cyclic position ``p``.  Instances
    are interned, so equal matchings are the same object.
    """

    __slots__ = ("n_top", "n_bot", "pairing", "lr", "_faces")

    def __new__(cls, n_top: int, n_bot: int, pairing: Sequence[int]):
        key = (n_top, n_bot, tuple(pairing))
        hit = _INTERN.get(key)
        if hit is not None:
            return hit
        _validate(*key)
        return cls._make(*key)

    @classmethod
    def _make(cls, n_top: int, n_bot: int, pairing: tuple) -> Matching:
        key = (n_top, n_bot, pairing)
        hit = _INTERN.get(key)
        if hit is not None:
            return hit
        self = object.__new__(cls)
        n = n_top + n_bot
        self.n_top = n_top
        self.n_bot = n_bot
        self.pairing = pairing
        to_cyc, to_lr = _perms(n_top, n)
        self.lr = tuple(to_lr[pairing[c]] for c in to_cyc)
        self._faces = None
        with _INTERN_LOCK:
            return _INTERN.setdefault(key, self)

    @classmethod
    def from_lr(cls, n_top: int, n_bot: int, lr: Sequence[int]) -> Matching:
        """Build from partners given in left-to-right coordinates (unchecked)."""
        key = (n_top, n_bot, tuple(lr))
        hit = _LR_INTERN.get(key)
        if hit is not None:
            return hit
        to_cyc, to_lr = _perms(n_top, n_top + n_bot)
        m = cls._make(n_top, n_bot, tuple(to_cyc[lr[e]] for e in to_lr))
        with _INTERN_LOCK:
            return _LR_INTERN.setdefault(key, m)

    def __reduce__(self):
        return (Matching, (self.n_top, self.n_bot, self.pairing))

    # interning makes equality identity, so the default id-based hash and
    # equality apply; they are also much cheaper in the composition cache

    def sort_key(self):
        return (self.n_top, self.n_bot, self.pairing)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @property
    def size(self) -> int:
        return self.n_top + self.n_bot

    def chords(self) -> List[Tuple[int, int]]:
        return [(a, b) for a, b in enumerate(self.pairing) if a < b]

    def through_strands(self) -> int:
        n = self.n_top
        return sum(1 for e in range(n) if self.lr[e] >= n)

    def is_identity(self) -> bool:
        n = self.n_top
        return n == self.n_bot and all(self.lr[e] == n + e for e in range(n))

    def faces(self) -> Tuple[Tuple[int, ...], ...]:
        if self._faces is None:
            self._faces = _compute_faces(self)
        return self._faces

    def __repr__(self):
        return f"Matching({self.n_top}, {self.n_bot}, {list(self.pairing)})"


def _validate(n_top, n_bot, pairing):
    if n_top < 0 or n_bot < 0:
        raise ValueError("point counts must be non-negative")
    n = n_top + n_bot
    if len(pairing) != n:
        raise ValueError(f"pairing has {len(pairing)} entries, expected {n}")
    for p, q in enumerate(pairing):
        if not 0 <= q < n or q == p or pairing[q] != p:
            raise ValueError("pairing must be a fixed-point-free involution")
    stack = []
    for p in range(n):
        q = pairing[p]
        if q > p:
            stack.append(p)
        elif not stack or stack.pop() != q:
            raise ValueError("pairing has crossing chords")


def _compute_faces(m: Matching):
    n = m.size
    if n == 0:
        return ((0,),)
    groups: Dict[int, List[int]] = {}
    stack: List[int] = []
    for k in range(n):
        if m.pairing[k] > k:
            stack.append(k)
        else:
            stack.pop()
        groups.setdefault(stack[-1] if stack else -1, []).append(k)
    return tuple(sorted(tuple(g) for g in groups.values()))


def regions(m: Matching) -> List[Tuple[int, ...]]:
    """Boundary intervals grouped by face, each face sorted, faces by first interval."""
    return list(m.faces())


def _interval_colours(n_top: int, n_bot: int, top: Sequence[int], bottom: Sequence[int]):
    n = n_top + n_bot
    if n == 0:
        return [[top[0], bottom[0]]]
    slots: List[List[int]] = [[] for _ in range(n)]
    slots[n - 1] += (top[0], bottom[0])
    slots[(n_top - 1) % n] += (top[n_top], bottom[n_bot])
    for t in range(1, n_top):
        slots[t - 1].append(top[t])
    for s in range(1, n_bot):
        slots[n - s - 1].append(bottom[s])
    return slots


def colouring_consistent(m: Matching, top: Sequence[int], bottom: Sequence[int]) -> bool:
    """True iff every face of ``m`` receives a single colour."""
    if len(top) != m.n_top + 1 or len(bottom) != m.n_bot + 1:
        raise ValueError("colour sequence lengths do not match the matching")
    slots = _interval_colours(m.n_top, m.n_bot, top, bottom)
    for face in m.faces():
        colours = {c for k in face for c in slots[k]}
        if len(colours) > 1:
            return False
    return True


def _noncrossing(lo: int, hi: int):
    """All noncrossing perfect matchings of positions lo..hi-1 as pair lists."""
    if lo >= hi:
        yield []
        return
    for q in range(lo + 1, hi, 2):
        for inner in _noncrossing(lo + 1, q):
            for outer in _noncrossing(q + 1, hi):
                yield [(lo, q)] + inner + outer


@lru_cache(maxsize=None)
def _enumerate(n_top: int, n_bot: int) -> Tuple[Matching, ...]:
    n = n_top + n_bot
    if n % 2:
        return ()
    out = []
    for pairs in _noncrossing(0, n):
        pairing = [0] * n
        for a, b in pairs:
            pairing[a] = b
            pairing[b] = a
        out.append(Matching._make(n_top, n_bot, tuple(pairing)))
    out.sort(key=Matching.sort_key)
    return tuple(out)


def enumerate_matchings(n_top: int, n_bot: int) -> List[Matching]:
    """All crossingless matchings, sorted by pairing array."""
    if n_top < 0 or n_bot < 0:
        raise ValueError("point counts must be non-negative")
    return list(_enumerate(n_top, n_bot))


class WrappingMatrix:
    """The ell x ell matrix of loop values.

    ``w[j, i]`` (1-based colours) is omega_ji: the value of a loop with
    interior colour j sitting in a region of colour i.
    """

    __slots__ = ("ell", "entries", "_hash", "_scaled")

    def __init__(self, entries):
        rows = tuple(tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in row)
                     for row in entries)
        ell = len(rows)
        if ell == 0 or any(len(r) != ell for r in rows):
            raise ValueError("wrapping matrix must be square and non-empty")
        self.ell = ell
        self.entries = rows
        self._hash = hash(rows)
        self._scaled = None

    @classmethod
    def classical(cls, d) -> WrappingMatrix:
        return cls([[d]])

    def __getitem__(self, ji) -> Fraction:
        j, i = ji
        if not (1 <= j <= self.ell and 1 <= i <= self.ell):
            raise IndexError(f"colour out of range 1..{self.ell}")
        return self.entries[j - 1][i - 1]

    def omega(self, j: int, i: int) -> Fraction:
        return self[j, i]

    def scaled(self):
        """``(W, q)`` with integer ``W[j][i] = q * omega_ji``; index 0 unused."""
        if self._scaled is None:
            import math
            q = 1
            for row in self.entries:
                for v in row:
                    q = math.lcm(q, v.denominator)
            W = [[0] * (self.ell + 1)]
            for row in self.entries:
                W.append([0] + [int(v * q) for v in row])
            self._scaled = (W, q)
        return self._scaled

    def __eq__(self, other):
        if not isinstance(other, WrappingMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rows = [[format_rational(v) for v in r] for r in self.entries]
        return f"WrappingMatrix({rows})"


class ColouredDiagram:
    """A matching together with a face-consistent colouring."""

    __slots__ = ("matching", "top", "bottom")

    def __init__(self, matching: Matching, top: Sequence[int], bottom: Sequence[int], check: bool = True):
        top = tuple(top)
        bottom = tuple(bottom)
        if check:
            if len(top) != matching.n_top + 1 or len(bottom) != matching.n_bot + 1:
                raise ValueError("colour sequence lengths do not match the matching")
            if any(not isinstance(c, int) or c < 1 for c in top + bottom):
                raise ValueError("colours must be positive integers")
            if not colouring_consistent(matching, top, bottom):
                raise ValueError("colouring is not face-consistent")
        self.matching = matching
        self.top = top
        self.bottom = bottom

    def sort_key(self):
        return (self.matching.pairing, self.top, self.bottom)

    def __eq__(self, other):
        if not isinstance(other, ColouredDiagram):
            return NotImplemented
        return (self.matching is other.matching and self.top == other.top
                and self.bottom == other.bottom)

    def __hash__(self):
        return hash((self.matching, self.top, self.bottom))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"ColouredDiagram({self.matching!r}, top={self.top}, bottom={self.bottom})"


def identity_matching(n: int) -> Matching:
    return Matching.from_lr(n, n, [n + e for e in range(n)] + list(range(n)))


def identity_diagram(seq: Sequence[int]) -> ColouredDiagram:
    seq = tuple(seq)
    return ColouredDiagram(identity_matching(len(seq) - 1), seq, seq, check=False)


def enumerate_coloured_diagrams(top: Sequence[int], bottom: Sequence[int]) -> List[ColouredDiagram]:
    top = tuple(top)
    bottom = tuple(bottom)
    if top[0] != bottom[0] or top[-1] != bottom[-1]:
        return []
    return [ColouredDiagram(m, top, bottom, check=False)
            for m in _enumerate(len(top) - 1, len(bottom) - 1)
            if colouring_consistent(m, top, bottom)]


# --- matching-level operations (cached) ---------------------------------

_COMPOSE: Dict[tuple, tuple] = {}


def compose_matchings(upper: Matching, lower: Matching):
    """Stack ``upper`` on ``lower``.

    Returns ``(result, loops)`` where ``loops`` is the sorted tuple of the
    leftmost middle point of each closed loop.
    """
    key = (upper, lower)
    hit = _COMPOSE.get(key)
    if hit is not None:
        return hit
    a = upper.n_top
    M = upper.n_bot
    if M != lower.n_top:
        raise ValueError("strand counts do not match")
    b = lower.n_bot
    U = upper.lr
    L = lower.lr
    res = [-1] * (a + b)
    seen = [False] * M
    for start in range(a):
        if res[start] >= 0:
            continue
        e = U[start]
        # alternate upper -> lower -> upper until an exposed point is reached
        while e >= a:
            j = e - a
            seen[j] = True
            f = L[j]
            if f >= M:
                e = a + f - M
                break
            seen[f] = True
            e = U[a + f]
        res[start] = e
        res[e] = start
    for start in range(a, a + b):
        if res[start] >= 0:
            continue
        e = L[M + start - a]
        while e < M:
            seen[e] = True
            g = U[a + e]
            if g < a:
                e = g
                break
            seen[g - a] = True
            e = L[g - a]
        else:
            e = a + e - M
        res[start] = e
        res[e] = start
    loops = []
    for j in range(M):
        if seen[j]:
            continue
        # j is the smallest unseen point, so it is the leftmost point of its loop
        loops.append(j)
        p = j
        while True:
            seen[p] = True
            p = U[a + p] - a
            seen[p] = True
            p = L[p]
            if p == j:
                break
    out = (Matching.from_lr(a, b, res), tuple(loops))
    if len(_COMPOSE) >= COMPOSE_CACHE_LIMIT:
        _COMPOSE.clear()
    _COMPOSE[key] = out
    return out


def composition_cache() -> Dict[tuple, tuple]:
    """The live ``(upper, lower) -> (result, loops)`` cache, for hot loops."""
    return _COMPOSE


def clear_compose_cache() -> None:
    """Drop memoized matching-level results (for cold-start timing)."""
    _COMPOSE.clear()
    tensor_matchings.cache_clear()
    transpose_matching.cache_clear()
    trace_loops.cache_clear()


@lru_cache(maxsize=1 << 16)
def tensor_matchings(left: Matching, right: Matching) -> Matching:
    at, ab = left.n_top, left.n_bot
    bt, bb = right.n_top, right.n_bot
    nt = at + bt

    def lmap(e):
        return e if e < at else nt + e - at

    def rmap(e):
        return at + e if e < bt else nt + ab + e - bt

    lr = [0] * (nt + ab + bb)
    for e, f in enumerate(left.lr):
        lr[lmap(e)] = lmap(f)
    for e, f in enumerate(right.lr):
        lr[rmap(e)] = rmap(f)
    return Matching.from_lr(nt, ab + bb, lr)


@lru_cache(maxsize=1 << 16)
def transpose_matching(m: Matching) -> Matching:
    n, k = m.n_top, m.n_bot

    def swap(e):
        return k + e if e < n else e - n

    lr = [0] * (n + k)
    for e, f in enumerate(m.lr):
        lr[swap(e)] = swap(f)
    return Matching.from_lr(k, n, lr)


@lru_cache(maxsize=1 << 18)
def trace_loops(m: Matching) -> Tuple[int, ...]:
    """Loops of the right-hand closure of an endomorphism matching.

    Top point k is joined to bottom point k by an arc around the right side
    (arc 0 outermost).  Each loop is reported by its smallest arc index.
    """
    n = m.n_top
    if m.n_bot != n:
        raise ValueError("trace needs an endomorphism")
    lr = m.lr
    used = [False] * n
    loops = []
    for k in range(n):
        if used[k]:
            continue
        loops.append(k)
        used[k] = True
        p = k
        while True:
            q = lr[p]
            arc = q if q < n else q - n
            if arc == k:
                break
            used[arc] = True
            p = q + n if q < n else q - n
    return tuple(loops)


# --- coloured diagram operations ----------------------------------------

def loop_factor(loops: Iterable[int], mid: Sequence[int], omega: WrappingMatrix) -> Fraction:
    out = Fraction(1)
    for p in loops:
        out *= omega[mid[p + 1], mid[p]]
    return out


def compose_diagrams(upper: ColouredDiagram, lower: ColouredDiagram, omega: WrappingMatrix):
    """Vertical stacking; ``None`` when the middle colours disagree."""
    if len(upper.bottom) != len(lower.top):
        raise ValueError("strand counts do not match")
    if upper.bottom != lower.top:
        return None
    res, loops = compose_matchings(upper.matching, lower.matching)
    scalar = loop_factor(loops, upper.bottom, omega)
    return scalar, ColouredDiagram(res, upper.top, lower.bottom, check=False)


def tensor_diagrams(left: ColouredDiagram, right: ColouredDiagram) -> Optional[ColouredDiagram]:
    if left.top[-1] != right.top[0] or left.bottom[-1] != right.bottom[0]:
        return None
    return ColouredDiagram(tensor_matchings(left.matching, right.matching),
                           left.top + right.top[1:], left.bottom + right.bottom[1:], check=False)


def transpose_diagram(d: ColouredDiagram) -> ColouredDiagram:
    return ColouredDiagram(transpose_matching(d.matching), d.bottom, d.top, check=False)


def trace_diagram(d: ColouredDiagram, omega: WrappingMatrix) -> Fraction:
    if d.top != d.bottom:
        raise ValueError("trace needs an endomorphism")
    return loop_factor(trace_loops(d.matching), d.top, omega)


def turnback(seq: Sequence[int], gap: int, depth: int) -> Optional[ColouredDiagram]:
    """Nested caps around the gap between top points ``gap-1`` and ``gap``.

    The diagram goes from ``seq`` (top) to the shortened sequence with the
    enclosed colours removed; every other strand runs straight down.  Returns
    ``None`` when the colours around the caps disagree.
    """
    seq = tuple(seq)
    n = len(seq) - 1
    if depth < 0 or gap - depth < 0 or gap + depth > n:
        raise ValueError("caps do not fit")
    if any(seq[gap - t] != seq[gap + t] for t in range(1, depth + 1)):
        return None
    k = n - 2 * depth
    lr = [0] * (n + k)
    for p in range(n):
        if p < gap - depth:
            lr[p], lr[n + p] = n + p, p
        elif p >= gap + depth:
            q = n + p - 2 * depth
            lr[p], lr[q] = q, p
        else:
            lr[p] = 2 * gap - 1 - p
    bottom = seq[:gap - depth + 1] + seq[gap + depth + 1:]
    return ColouredDiagram(Matching.from_lr(n, k, lr), seq, bottom, check=False)


def generator_h(seq: Sequence[int], k: int) -> Optional[ColouredDiagram]:
    """Cap on top strands k, k+1 and cup on bottom strands k, k+1 (1-based)."""
    seq = tuple(seq)
    n = len(seq) - 1
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in 1..{n - 1}")
    if seq[k - 1] != seq[k + 1]:
        return None
    lr = [0] * (2 * n)
    for p in range(n):
        if p == k - 1:
            lr[p], lr[p + 1] = p + 1, p
            lr[n + p], lr[n + p + 1] = n + p + 1, n + p
        elif p != k:
            lr[p], lr[n + p] = n + p, p
    return ColouredDiagram(Matching.from_lr(n, n, lr), seq, seq, check=False)


# --- JSON ---------------------------------------------------------------

def diagram_to_json(d: ColouredDiagram) -> dict:
    return {
        "n_top": d.matching.n_top,
        "n_bot": d.matching.n_bot,
        "pairing": [list(c) for c in d.matching.chords()],
        "top": list(d.top),
        "bottom": list(d.bottom),
    }


def diagram_from_json(data: dict) -> ColouredDiagram:
    n_top = int(data["n_top"])
    n_bot = int(data["n_bot"])
    pairing = [-1] * (n_top + n_bot)
    for a, b in data["pairing"]:
        if not (0 <= a < len(pairing) and 0 <= b < len(pairing)):
            raise ValueError("pairing index out of range")
        pairing[a], pairing[b] = b, a
    return ColouredDiagram(Matching(n_top, n_bot, pairing), data["top"], data["bottom"])


def omega_to_json(w: WrappingMatrix) -> dict:
    return {"ell": w.ell, "omega": [[format_rational(v) for v in row] for row in w.entries]}


def omega_from_json(data) -> WrappingMatrix:
    if isinstance(data, dict):
        rows = data["omega"]
        w = WrappingMatrix([[parse_rational(v) for v in row] for row in rows])
        if "ell" in data and int(data["ell"]) != w.ell:
            raise ValueError("ell does not match the matrix size")
        return w
    return WrappingMatrix([[parse_rational(v) for v in row] for row in data])
