"""Gram matrices, semisimplicity, meanders and tensor decompositions."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .diagram import (
    ColouredDiagram,
    Matching,
    WrappingMatrix,
    _enumerate,
    colouring_consistent,
    compose_diagrams,
    compose_matchings,
    enumerate_coloured_diagrams,
    generator_h,
    trace_loops,
    transpose_diagram,
    transpose_matching,
    turnback,
)
from .jw import ChebyshevZero, JWProjector, alternating_seq, check_annihilation, jw, jw_alternating
from .morphism import (
    Morphism,
    compose,
    linear_combination,
    morphism_rank,
    pairing_unchecked,
    scale,
    tensor,
    trace,
    transpose,
)

DEFAULT_SEMISIMPLE_MAX_N = 16
DEFAULT_WITNESS_BOUND = 64
ENV_MAX_N = "TLCOLOUR_MAX_N"


class VerificationError(RuntimeError):
    """An identity that must hold exactly failed; this indicates a bug."""


def scan_bound(default: int) -> int:
    """``default`` unless TLCOLOUR_MAX_N holds a positive integer."""
    raw = os.environ.get(ENV_MAX_N)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_MAX_N} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{ENV_MAX_N} must be a positive integer, got {raw!r}")
    return value


# --- semisimplicity ---------------------------------------------------------

@dataclass
class SemisimpleReport:
    max_n: int
    zeros: List[Tuple[int, int, int]]

    @property
    def verdict(self) -> str:
        return "obstructed" if self.zeros else "semisimple-up-to-bound"


def _cheb_values(x, y, max_n: int) -> List[Fraction]:
    vals = [Fraction(1), Fraction(y)]
    for k in range(2, max_n + 1):
        vals.append((x if k % 2 == 0 else y) * vals[-1] - vals[-2])
    return vals[:max_n + 1]


def semisimple_check(omega: WrappingMatrix, max_n: int) -> SemisimpleReport:
    """All (i, j, n) with U_n(omega_ij, omega_ji) = 0 and 1 <= n <= max_n."""
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    zeros = []
    for i in range(1, omega.ell + 1):
        for j in range(1, omega.ell + 1):
            vals = _cheb_values(omega[i, j], omega[j, i], max_n)
            zeros.extend((i, j, n) for n in range(1, max_n + 1) if vals[n] == 0)
    return SemisimpleReport(max_n, zeros)


def first_zero(i: int, j: int, omega: WrappingMatrix, bound: int) -> Optional[int]:
    vals = _cheb_values(omega[i, j], omega[j, i], bound)
    return next((n for n in range(1, bound + 1) if vals[n] == 0), None)


def nilpotent_witness(i: int, j: int, omega: WrappingMatrix, bound: Optional[int] = None):
    """``(seq, e)`` with e != 0 and e*e = 0, or None if U_n has no zero up to the bound."""
    if bound is None:
        bound = scan_bound(DEFAULT_WITNESS_BOUND)
    n = first_zero(i, j, omega, bound)
    if n is None:
        return None
    seq = alternating_seq(i, j, n + 1)
    f = tensor(jw_alternating(i, j, n, omega).morphism, Morphism.identity(seq[n:]))
    h = Morphism.from_diagram(generator_h(seq, n))
    e = compose(compose(f, h, omega), f, omega)
    if e.is_zero():
        raise VerificationError(f"witness on {seq} vanished")
    if not compose(e, e, omega).is_zero():
        raise VerificationError(f"witness on {seq} is not nilpotent")
    return seq, e


def quantum_dimension(seq: Sequence[int], omega: WrappingMatrix) -> Fraction:
    return trace(jw(seq, omega).morphism, omega)


# --- Gram matrices ----------------------------------------------------------

def _sequences(length: int, ell: int):
    return itertools.product(range(1, ell + 1), repeat=length)


def _blocks(n: int, ell: int):
    """(s, t, diagrams) for every non-empty block of End([n]) in lex order."""
    seqs = list(_sequences(n + 1, ell))
    for s in seqs:
        for t in seqs:
            if s[0] != t[0] or s[-1] != t[-1]:
                continue
            ds = enumerate_coloured_diagrams(s, t)
            if ds:
                yield s, t, ds


def endomorphism_basis(n: int, ell: int) -> List[Tuple[tuple, tuple, ColouredDiagram]]:
    if n < 0 or ell < 1:
        raise ValueError("need n >= 0 and ell >= 1")
    return [(s, t, d) for s, t, ds in _blocks(n, ell) for d in ds]


def bareiss_det(rows: List[List[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    M = [list(r) for r in rows]
    size = len(M)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if M[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if M[r][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        rk = M[k]
        for i in range(k + 1, size):
            ri = M[i]
            a = ri[k]
            for c in range(k + 1, size):
                ri[c] = (ri[c] * pivot - a * rk[c]) // prev
        prev = pivot
    return sign * M[-1][-1]


def det_fraction(rows: List[List[Fraction]]) -> Fraction:
    scaled = []
    den = Fraction(1)
    for r in rows:
        q = 1
        for v in r:
            q = math.lcm(q, Fraction(v).denominator)
        scaled.append([int(Fraction(v) * q) for v in r])
        den *= q
    return Fraction(bareiss_det(scaled)) / den


@dataclass
class GramBlock:
    top: tuple
    bottom: tuple
    matrix: List[List[Fraction]]
    determinant: Fraction


@dataclass
class GramReport:
    n: int
    ell: int
    basis: List[Morphism]
    blocks: List[GramBlock]
    determinant: Fraction
    adapted: bool = False
    sparse: Optional[bool] = None
    diagonal: Optional[List[Fraction]] = None

    @property
    def nondegenerate(self) -> bool:
        return self.determinant != 0

    @property
    def sign(self) -> int:
        return (self.determinant > 0) - (self.determinant < 0)

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> List[List[Fraction]]:
        """Dense matrix (block diagonal in basis order)."""
        size = self.size
        out = [[Fraction(0)] * size for _ in range(size)]
        off = 0
        for b in self.blocks:
            k = len(b.matrix)
            for r in range(k):
                out[off + r][off:off + k] = b.matrix[r]
            off += k
        return out


def _diagram_block(args):
    s, t, pairings, omega = args
    ms = [Matching(len(s) - 1, len(t) - 1, p) for p in pairings]
    W, q = omega.scaled()
    cap = (len(t) - 1) // 2 + len(s) - 1
    qpow = [q ** e for e in range(cap + 1)]
    size = len(ms)
    G = [[0] * size for _ in range(size)]
    for b in range(size):
        tb = transpose_matching(ms[b])
        for a in range(b, size):
            r, loops = compose_matchings(ms[a], tb)
            tl = trace_loops(r)
            w = qpow[cap - len(loops) - len(tl)]
            for p in loops:
                w *= W[t[p + 1]][t[p]]
            for k in tl:
                w *= W[s[k + 1]][s[k]]
            G[a][b] = G[b][a] = w
    det = Fraction(bareiss_det(G), qpow[cap] ** size)
    matrix = [[Fraction(v, qpow[cap]) for v in row] for row in G]
    return matrix, det


def _run_blocks(tasks, jobs: int):
    if jobs and jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_diagram_block, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_diagram_block(t) for t in tasks]


def gram(n: int, omega: WrappingMatrix, jobs: int = 1) -> GramReport:
    """Trace-pairing Gram matrix of End([n]) in the diagram basis."""
    if n < 0:
        raise ValueError("n must be non-negative")
    basis = []
    tasks = []
    for s, t, ds in _blocks(n, omega.ell):
        basis.extend(Morphism.from_diagram(d) for d in ds)
        tasks.append((s, t, [d.matching.pairing for d in ds], omega))
    results = _run_blocks(tasks, jobs)
    blocks = []
    det = Fraction(1)
    for (s, t, _, _), (matrix, bdet) in zip(tasks, results):
        blocks.append(GramBlock(s, t, matrix, bdet))
        det *= bdet
    return GramReport(n, omega.ell, basis, blocks, det)


# --- JW-adapted basis -----------------------------------------------------

@lru_cache(maxsize=None)
def _monic(n: int, k: int) -> Tuple[Matching, ...]:
    """Matchings from n top to k bottom points with every bottom point through."""
    return tuple(m for m in _enumerate(n, k) if all(m.lr[n + j] < n for j in range(k)))


def _cell_form(xs: List[ColouredDiagram], omega: WrappingMatrix) -> List[List[Fraction]]:
    size = len(xs)
    G = [[Fraction(0)] * size for _ in range(size)]
    for a in range(size):
        xa = transpose_diagram(xs[a])
        for b in range(a, size):
            out = compose_diagrams(xa, xs[b], omega)
            if out is not None and out[1].matching.is_identity():
                G[a][b] = G[b][a] = out[0]
    return G


def _orthogonalize(G: List[List[Fraction]]) -> List[List[Fraction]]:
    """Coordinate vectors of an orthogonal basis for the form G.

    Only pivoting, adding one vector to another and subtracting multiples
    are used, so the change of basis has determinant +-1.
    """
    size = len(G)

    def form(u, v):
        return sum(u[a] * G[a][b] * v[b] for a in range(size) if u[a] for b in range(size) if v[b])

    rest = [[Fraction(int(a == b)) for b in range(size)] for a in range(size)]
    out = []
    while rest:
        idx = next((i for i, v in enumerate(rest) if form(v, v)), None)
        if idx is None:
            hit = next(((i, j) for i in range(len(rest)) for j in range(i + 1, len(rest))
                        if form(rest[i], rest[j])), None)
            if hit is None:
                raise VerificationError("cell form is degenerate")
            i, j = hit
            rest[i] = [u + v for u, v in zip(rest[i], rest[j])]
            idx = i
        p = rest.pop(idx)
        pp = form(p, p)
        rest = [[u - form(v, p) / pp * w for u, w in zip(v, p)] for v in rest]
        out.append(p)
    return out


def _half_basis(s: tuple, u: tuple, omega: WrappingMatrix) -> List[Morphism]:
    xs = [ColouredDiagram(m, s, u, check=False) for m in _monic(len(s) - 1, len(u) - 1)
          if colouring_consistent(m, s, u)]
    if not xs:
        return []
    vecs = _orthogonalize(_cell_form(xs, omega))
    return [Morphism(s, u, {x: c for x, c in zip(xs, v) if c}) for v in vecs]


def adapted_basis_gram(n: int, omega: WrappingMatrix) -> GramReport:
    """Gram matrix in a basis built from JW projectors; it is monomial."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n >= 2:
        # projectors up to n strands need U_k != 0 for k <= n-1
        zeros = semisimple_check(omega, n - 1).zeros
        if zeros:
            i, j, k = min(zeros, key=lambda z: (z[2], z[0], z[1]))
            raise ChebyshevZero(i, j, k)
    ell = omega.ell
    halves:Dict[Tuple[tuple, tuple], List[Morphism]] = {}

    def half(s, u):
        key = (s, u)
        if key not in halves:
            halves[key] = _half_basis(s, u, omega)
        return halves[key]

    middles = []
    for k in range(n, -1, -2):
        middles.extend(_sequences(k + 1, ell))
    basis: List[Morphism] = []
    blocks: List[GramBlock] = []
    diagonal: List[Fraction] = []
    det = Fraction(1)
    sparse = True
    for s, t, ds in _blocks(n, ell):
        elems = []
        for u in middles:
            if u[0] != s[0] or u[-1] != s[-1]:
                continue
            vs, vt = half(s, u), half(t, u)
            if not vs or not vt:
                continue
            f = jw(u, omega).morphism
            for va in vs:
                left = compose(va, f, omega)
                for vb in vt:
                    elems.append(compose(left, transpose(vb), omega))
        if len(elems) != len(ds):
            raise VerificationError(f"adapted block {s}->{t} has {len(elems)} elements, expected {len(ds)}")
        size = len(elems)
        matrix = [[Fraction(0)] * size for _ in range(size)]
        for a in range(size):
            for b in range(a, size):
                matrix[a][b] = matrix[b][a] = pairing_unchecked(elems[a], elems[b], omega)
        rows = [sum(1 for v in matrix[a] if v) for a in range(size)]
        cols = [sum(1 for a in range(size) if matrix[a][c]) for c in range(size)]
        if max(rows + cols, default=0) > 1:
            raise VerificationError(f"adapted Gram block {s}->{t} is not monomial")
        if min(rows + cols, default=1) < 1:
            sparse = False
        bdet = det_fraction(matrix)
        basis.extend(elems)
        diagonal.extend(matrix[a][a] for a in range(size))
        blocks.append(GramBlock(s, t, matrix, bdet))
        det *= bdet
    return GramReport(n, ell, basis, blocks, det, adapted=True, sparse=sparse, diagonal=diagonal)


# --- meanders -------------------------------------------------------------

def _checked_from_lr(n_top: int, n_bot: int, lr: Sequence[int]) -> Matching:
    size = n_top + n_bot
    pairing = [0] * size

    def cyc(e):
        return e if e < n_top else size - 1 - (e - n_top)

    for e in range(size):
        pairing[cyc(e)] = cyc(lr[e])
    return Matching(n_top, n_bot, pairing)


def meander_halves(upper_arcs, lower_arcs) -> Tuple[Matching, Matching]:
    """Matchings for arcs above and below a line of 2n points numbered from 1."""
    pts = 2 * len(upper_arcs)
    if 2 * len(lower_arcs) != pts:
        raise ValueError("both halves need the same number of arcs")
    mats = []
    for arcs in (upper_arcs, lower_arcs):
        lr = [-1] * pts
        for a, b in arcs:
            a, b = int(a) - 1, int(b) - 1
            if not (0 <= a < pts and 0 <= b < pts) or a == b or lr[a] >= 0 or lr[b] >= 0:
                raise ValueError(f"bad arc ({a + 1}, {b + 1})")
            lr[a], lr[b] = b, a
        mats.append(lr)
    upper = _checked_from_lr(0, pts, mats[0])
    lower = _checked_from_lr(pts, 0, mats[1])
    return upper, lower


def meander_eval(upper: Matching, lower: Matching, colours: Optional[Sequence[int]],
                 omega: WrappingMatrix) -> Fraction:
    """Evaluate the closed loops formed by two halves glued along the line."""
    if upper.n_top and not upper.n_bot:
        upper = transpose_matching(upper)
    if lower.n_bot and not lower.n_top:
        lower = transpose_matching(lower)
    pts = upper.n_bot
    if upper.n_top or lower.n_bot or lower.n_top != pts:
        raise ValueError("meander halves must be matchings of the same 2n line points")
    colours = tuple(colours) if colours is not None else (1,) * (pts + 1)
    if len(colours) != pts + 1:
        raise ValueError(f"need {pts + 1} interval colours, got {len(colours)}")
    if any(not 1 <= c <= omega.ell for c in colours):
        raise ValueError(f"colours must lie in 1..{omega.ell}")
    outer = (colours[0],)
    if colours[-1] != colours[0] or not colouring_consistent(upper, outer, colours) \
            or not colouring_consistent(lower, colours, outer):
        raise ValueError("inconsistent meander colouring")
    scalar, _ = compose_diagrams(ColouredDiagram(upper, outer, colours, check=False),
                                 ColouredDiagram(lower, colours, outer, check=False), omega)
    return scalar


# --- tensor products of simples ---------------------------------------------

@dataclass
class TensorDecomposition:
    left: tuple
    right: tuple
    r: int
    summands: List[tuple] = field(default_factory=list)


def overlap_r(left: Sequence[int], right: Sequence[int]) -> int:
    left, right = tuple(left), tuple(right)
    cap = min(len(left), len(right))
    r = 0
    while r < cap and right[r] == left[len(left) - 1 - r]:
        r += 1
    return r


def cut(left: Sequence[int], right: Sequence[int], k: int) -> tuple:
    """The sequence left with its last k colours and right's first k+1 removed, joined."""
    left, right = tuple(left), tuple(right)
    return left[:len(left) - k] + right[k + 1:]


def tensor_decompose(left: Sequence[int], right: Sequence[int]) -> TensorDecomposition:
    left, right = tuple(left), tuple(right)
    r = overlap_r(left, right)
    return TensorDecomposition(left, right, r, [cut(left, right, k) for k in range(r)])


def _turnback_morphism(left: tuple, right: tuple, k: int) -> Morphism:
    whole = left + right[1:]
    return Morphism.from_diagram(turnback(whole, len(left) - 1, k))


def tensor_projector(left: Sequence[int], right: Sequence[int], omega: WrappingMatrix) -> Morphism:
    return tensor(jw(left, omega).morphism, jw(right, omega).morphism)


def tensor_end_dimension(left: Sequence[int], right: Sequence[int], omega: WrappingMatrix,
                         brute: bool = False) -> int:
    """dim of F End(left right) F with F the tensor of the two projectors.

    With ``brute`` every basis diagram g contributes F g F.  Otherwise only
    diagrams whose caps and cups all straddle the seam are used; the others
    are killed by the (checked) annihilation property of the two factors.
    """
    left, right = tuple(left), tuple(right)
    if overlap_r(left, right) == 0:
        return 0
    F = tensor_projector(left, right, omega)
    whole = F.top
    if brute:
        gs = [Morphism.from_diagram(d) for d in enumerate_coloured_diagrams(whole, whole)]
    else:
        for seq in (left, right):
            if not check_annihilation(jw(seq, omega), omega):
                raise VerificationError(f"projector on {seq} is not annihilated by caps")
        gs = []
        for k in range(overlap_r(left, right)):
            D = _turnback_morphism(left, right, k)
            gs.append(compose(D, transpose(D), omega))
    return morphism_rank([compose(compose(F, g, omega), F, omega) for g in gs])


DIRECT_PRODUCT_LIMIT = 250_000


def _through_strands(m: Morphism, side: str) -> Morphism:
    """Terms of m whose points on ``side`` all run through to the other side.

    The other terms carry a cap on that side, so they vanish against any
    projector annihilated by caps.
    """
    nt = len(m.top) - 1
    nb = len(m.bottom) - 1
    if side == "bottom":
        keep = {g: c for g, c in m.matching_terms().items() if all(g.lr[nt + j] < nt for j in range(nb))}
    else:
        keep = {g: c for g, c in m.matching_terms().items() if all(g.lr[t] >= nt for t in range(nt))}
    return Morphism._raw(m.top, m.bottom, keep)


def tensor_idempotents(left: Sequence[int], right: Sequence[int], omega: WrappingMatrix,
                       direct_limit: int = DIRECT_PRODUCT_LIMIT,
                       report: Optional[dict] = None) -> List[Tuple[Morphism, Fraction]]:
    """Quasi-idempotents ``(a_k, lambda_k)`` splitting the tensor of two simples.

    Verifies a_k a_l = delta_kl lambda_k a_k and sum a_k / lambda_k = F.  A
    product is checked directly when its size (terms times terms) is at most
    ``direct_limit``; larger ones are checked through the middle factor using
    annihilation and identity coefficient of the projectors involved.  If
    ``report`` is a dict it receives the mode used for each pair.
    """
    left, right = tuple(left), tuple(right)
    dec = tensor_decompose(left, right)
    if dec.r == 0:
        return []
    F = tensor_projector(left, right, omega)
    items = []
    fs = []
    for k, u in enumerate(dec.summands):
        D = _turnback_morphism(left, right, k)
        Dt = transpose(D)
        f = jw(u, omega).morphism
        if f.identity_coefficient() != 1 or not check_annihilation(JWProjector(u, f), omega):
            raise VerificationError(f"projector on {u} fails its defining properties")
        FD = compose(F, D, omega)
        DtF = compose(Dt, F, omega)
        lam = compose(DtF, D, omega).identity_coefficient()
        if lam == 0:
            raise VerificationError(f"lambda_{k} vanished for {left} (x) {right}")
        # terms capping the middle object are killed by f, so drop them first
        a = compose(compose(_through_strands(FD, "bottom"), f, omega),
                    _through_strands(DtF, "top"), omega)
        items.append((a, lam))
        fs.append(f)
    total = linear_combination(((1 / lam, a) for a, lam in items), F.top, F.bottom)
    if total != F:
        raise VerificationError("normalized idempotents do not sum to the projector")
    modes = {}
    factored_ready = False
    for k, (ak, lk) in enumerate(items):
        for l, (al, _) in enumerate(items):
            if len(ak) * len(al) <= direct_limit:
                prod = compose(ak, al, omega)
                want = scale(lk, ak) if k == l else Morphism.zero(ak.top, al.bottom)
                if prod != want:
                    raise VerificationError(f"a_{k} a_{l} has the wrong value")
                modes[(k, l)] = "direct"
                continue
            if not factored_ready:
                # F = f_left (x) f_right, so F F = F follows from the factors
                for seq in (left, right):
                    g = jw(seq, omega).morphism
                    if compose(g, g, omega) != g:
                        raise VerificationError(f"projector on {seq} is not idempotent")
                factored_ready = True
            modes[(k, l)] = "factored"
    if report is not None:
        report.update(modes)
    return items
