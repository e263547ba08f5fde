from __future__ import annotations

import itertools
import json
from fractions import Fraction

import pytest

from tlcolour.diagram import (
    ColouredDiagram,
    Matching,
    WrappingMatrix,
    colouring_consistent,
    compose_diagrams,
    compose_matchings,
    diagram_from_json,
    diagram_to_json,
    enumerate_coloured_diagrams,
    enumerate_matchings,
    generator_h,
    identity_diagram,
    omega_from_json,
    omega_to_json,
    regions,
    tensor_diagrams,
    trace_loops,
    transpose_diagram,
    transpose_matching,
    turnback,
)
from oracles import (
    all_pairings,
    catalan,
    closure_loops,
    consistent_by_definition,
    face_partition,
    random_omega,
    seeded,
    stack_components,
)

W2 = WrappingMatrix([[Fraction(3, 2), Fraction(7, 3)], [Fraction(-1, 2), Fraction(5, 3)]])


def cap_cup():
    return Matching(2, 2, [1, 0, 3, 2])


def seqs(length, ell=2):
    return list(itertools.product(range(1, ell + 1), repeat=length))


# --- matchings ---

def test_enumerate_small_counts():
    assert len(enumerate_matchings(2, 2)) == 2
    assert len(enumerate_matchings(3, 3)) == 5
    assert enumerate_matchings(0, 0) == [Matching(0, 0, [])]
    assert enumerate_matchings(1, 2) == []


def test_enumerate_catalan_counts():
    for total in range(0, 17, 2):
        for n_top in range(total + 1):
            assert len(enumerate_matchings(n_top, total - n_top)) == catalan(total // 2)


def test_enumerate_matches_brute_force_and_order():
    for total in range(0, 11, 2):
        for n_top in (0, total // 2, total):
            got = [m.pairing for m in enumerate_matchings(n_top, total - n_top)]
            assert got == all_pairings(total)


def test_matching_validation():
    with pytest.raises(ValueError):
        Matching(2, 2, [2, 3, 0, 1])  # crossing chords
    with pytest.raises(ValueError):
        Matching(1, 1, [0, 1])
    with pytest.raises(ValueError):
        Matching(1, 2, [1, 0])
    with pytest.raises(ValueError):
        Matching(2, 0, [1, 1])


def test_interning():
    assert Matching(2, 2, [1, 0, 3, 2]) is cap_cup()
    assert Matching(1, 1, (1, 0)) == Matching(1, 1, [1, 0])


def test_regions_examples():
    ident = Matching(1, 1, [1, 0])
    assert sorted(regions(ident)) == [(0,), (1,)]
    assert len(regions(cap_cup())) == 3
    assert regions(Matching(0, 0, [])) == [(0,)]


def test_regions_against_definition():
    for total in range(2, 11, 2):
        for n_top in range(total + 1):
            for m in enumerate_matchings(n_top, total - n_top):
                faces = regions(m)
                assert sorted(faces) == face_partition(m.pairing)
                assert sorted(k for f in faces for k in f) == list(range(total))
                assert len(faces) == total // 2 + 1


# --- colourings ---

def test_consistency_examples():
    cc = cap_cup()
    ident = enumerate_matchings(2, 2)[1]
    assert ident.is_identity()
    assert colouring_consistent(cc, (1, 2, 1), (1, 2, 1))
    assert not colouring_consistent(cc, (1, 2, 2), (1, 2, 2))
    assert colouring_consistent(ident, (1, 2, 2), (1, 2, 2))
    with pytest.raises(ValueError):
        colouring_consistent(cc, (1, 2), (1, 2, 1))


def test_consistency_against_definition():
    for n_top, n_bot in ((1, 1), (2, 2), (3, 1), (2, 0), (0, 4), (3, 3)):
        for m in enumerate_matchings(n_top, n_bot):
            for top in seqs(n_top + 1):
                for bottom in seqs(n_bot + 1):
                    want = consistent_by_definition(m.pairing, n_top, n_bot, top, bottom)
                    assert colouring_consistent(m, top, bottom) == want


def test_monochrome_always_consistent():
    for total in range(0, 9, 2):
        for n_top in range(total + 1):
            for m in enumerate_matchings(n_top, total - n_top):
                assert colouring_consistent(m, (7,) * (n_top + 1), (7,) * (total - n_top + 1))


def test_enumerate_coloured_examples():
    assert len(enumerate_coloured_diagrams((1, 2, 1), (1, 2, 1))) == 2
    assert len(enumerate_coloured_diagrams((1, 2, 2), (1, 2, 2))) == 1
    assert enumerate_coloured_diagrams((1,), (2,)) == []
    assert enumerate_coloured_diagrams((1, 2), (1, 2, 1)) == []


def test_coloured_diagram_rejects_inconsistent():
    with pytest.raises(ValueError):
        ColouredDiagram(cap_cup(), (1, 2, 2), (1, 2, 2))
    with pytest.raises(ValueError):
        ColouredDiagram(cap_cup(), (1, 2, 1), (1, 2))
    with pytest.raises(ValueError):
        ColouredDiagram(cap_cup(), (1, 0, 1), (1, 0, 1))


# --- composition ---

def random_diagram(rng, top, n_bot, ell=2, tries=200):
    for _ in range(tries):
        bottom = tuple([top[0]] + [rng.randint(1, ell) for _ in range(n_bot - 1)] + [top[-1]]) \
            if n_bot else (top[0],)
        if n_bot == 0 and top[0] != top[-1]:
            return None
        ds = enumerate_coloured_diagrams(top, bottom)
        if ds:
            return rng.choice(ds)
    return None


def test_compose_examples():
    d = Fraction(5, 3)
    w = WrappingMatrix([[d]])
    h = generator_h((1, 1, 1), 1)
    assert compose_diagrams(h, h, w) == (d, h)
    one = identity_diagram((1, 2, 1))
    assert compose_diagrams(one, one, W2) == (1, one)
    upper = identity_diagram((1, 2, 1))
    lower = identity_diagram((1, 2, 2))
    assert compose_diagrams(upper, lower, W2) is None
    with pytest.raises(ValueError):
        compose_diagrams(identity_diagram((1, 2)), identity_diagram((1, 2, 1)), W2)


def test_loop_colour_convention():
    # nested cups over nested caps: outer loop colour 2 inside 1, inner loop 3 inside 2
    cup = turnback((1, 2, 3, 2, 1), 2, 2)
    cap = transpose_diagram(cup)
    w = WrappingMatrix([[2, 3, 5], [7, 11, 13], [17, 19, 23]])
    scalar, res = compose_diagrams(cap, cup, w)
    assert res.matching.size == 0
    assert scalar == w[2, 1] * w[3, 2]
    h = generator_h((1, 2, 1), 1)
    assert compose_diagrams(h, h, w)[0] == w[2, 1]
    h = generator_h((2, 1, 2, 3), 1)
    assert compose_diagrams(h, h, w)[0] == w[1, 2]


def test_compose_matchings_against_union_find():
    for a, M, b in ((2, 2, 2), (3, 3, 1), (4, 4, 4), (2, 4, 2), (0, 4, 0), (1, 3, 3), (5, 3, 2)):
        if (a + M) % 2 or (M + b) % 2:
            continue
        for U in enumerate_matchings(a, M):
            for L in enumerate_matchings(M, b):
                res, loops = compose_matchings(U, L)
                pairs, comps = stack_components(U.lr, a, M, L.lr, b)
                assert list(res.lr) == [pairs[e] for e in range(a + b)]
                assert list(loops) == sorted(c[0] for c in comps)


def test_trace_loops_against_union_find():
    for n in range(0, 6):
        for m in enumerate_matchings(n, n):
            comps = closure_loops(m.lr, n)
            assert list(trace_loops(m)) == sorted(c[0] for c in comps)


def test_compose_associative():
    rng = seeded(11)
    w = random_omega(rng, 2)
    checked = 0
    for _ in range(3000):
        p, q, r, s = (rng.randint(0, 3) for _ in range(4))
        if (p + q) % 2 or (q + r) % 2 or (r + s) % 2 or p + q + r + s > 8:
            continue
        top = tuple(rng.randint(1, 2) for _ in range(p + 1))
        a = random_diagram(rng, top, q)
        if a is None:
            continue
        b = random_diagram(rng, a.bottom, r)
        if b is None:
            continue
        c = random_diagram(rng, b.bottom, s)
        if c is None:
            continue
        s1, ab = compose_diagrams(a, b, w)
        s2, abc = compose_diagrams(ab, c, w)
        t1, bc = compose_diagrams(b, c, w)
        t2, abc2 = compose_diagrams(a, bc, w)
        assert abc == abc2 and s1 * s2 == t1 * t2
        checked += 1
    assert checked > 200


def test_transpose_involution_exhaustive():
    for total in range(0, 9, 2):
        for n_top in range(total + 1):
            for m in enumerate_matchings(n_top, total - n_top):
                assert transpose_matching(transpose_matching(m)) is m


def test_transpose_examples():
    one = identity_diagram((1, 2, 1))
    assert transpose_diagram(one) == one
    cup = turnback((1, 2, 1), 1, 1)
    assert (cup.matching.n_top, cup.matching.n_bot) == (2, 0)
    cap = transpose_diagram(cup)
    assert (cap.matching.n_top, cap.matching.n_bot) == (0, 2)
    assert cap.top == (1,) and cap.bottom == (1, 2, 1)


def test_transpose_anti_homomorphism():
    rng = seeded(5)
    w = random_omega(rng, 2)
    for _ in range(200):
        p, q, r = rng.randint(0, 4), rng.randint(0, 4), rng.randint(0, 4)
        if (p + q) % 2 or (q + r) % 2:
            continue
        top = tuple(rng.randint(1, 2) for _ in range(p + 1))
        a = random_diagram(rng, top, q)
        b = a and random_diagram(rng, a.bottom, r)
        if b is None:
            continue
        s, ab = compose_diagrams(a, b, w)
        t, ba = compose_diagrams(transpose_diagram(b), transpose_diagram(a), w)
        assert s == t and transpose_diagram(ab) == ba


# --- tensor ---

def test_tensor_examples():
    assert tensor_diagrams(identity_diagram((1, 2)), identity_diagram((2, 1))) == identity_diagram((1, 2, 1))
    assert tensor_diagrams(identity_diagram((1, 2)), identity_diagram((1, 2))) is None
    h = generator_h((2, 1, 2), 1)
    assert tensor_diagrams(identity_diagram((2,)), h) == h
    assert tensor_diagrams(h, identity_diagram((2,))) == h


def test_tensor_associative_and_interchange():
    rng = seeded(21)
    w = random_omega(rng, 2)
    checked = 0
    for _ in range(400):
        shape = [rng.randint(0, 2) for _ in range(6)]
        f_top, f_mid, f_bot, g_top, g_mid, g_bot = shape
        if (f_top + f_mid) % 2 or (f_mid + f_bot) % 2 or (g_top + g_mid) % 2 or (g_mid + g_bot) % 2:
            continue
        ft = tuple(rng.randint(1, 2) for _ in range(f_top + 1))
        f = random_diagram(rng, ft, f_mid)
        f2 = f and random_diagram(rng, f.bottom, f_bot)
        gt = (ft[-1],) + tuple(rng.randint(1, 2) for _ in range(g_top))
        g = random_diagram(rng, gt, g_mid)
        g2 = g and random_diagram(rng, g.bottom, g_bot)
        if f2 is None or g2 is None:
            continue
        s1, ff = compose_diagrams(f, f2, w)
        s2, gg = compose_diagrams(g, g2, w)
        lhs = tensor_diagrams(ff, gg)
        fg = tensor_diagrams(f, g)
        fg2 = tensor_diagrams(f2, g2)
        if lhs is None:
            assert fg is None or fg2 is None or compose_diagrams(fg, fg2, w) is None
            continue
        t, rhs = compose_diagrams(fg, fg2, w)
        assert lhs == rhs and s1 * s2 == t
        e = identity_diagram((gt[-1], 1))
        assert tensor_diagrams(tensor_diagrams(f, g), e) == tensor_diagrams(f, tensor_diagrams(g, e))
        checked += 1
    assert checked > 30


# --- generators ---

def test_generator_examples():
    h = generator_h((1, 2, 1), 1)
    assert h.matching is cap_cup() and h.top == h.bottom == (1, 2, 1)
    assert generator_h((1, 2, 2), 1) is None
    assert generator_h((1, 1, 1), 1).matching is cap_cup()
    with pytest.raises(ValueError):
        generator_h((1, 2, 1), 2)
    with pytest.raises(ValueError):
        generator_h((1, 2, 1, 2), 0)


def test_generator_relations_classical():
    d = Fraction(7, 4)
    w = WrappingMatrix([[d]])
    seq = (1,) * 5
    h = [None] + [generator_h(seq, k) for k in range(1, 4)]

    def mul(*ds):
        s, acc = Fraction(1), ds[0]
        for x in ds[1:]:
            t, acc = compose_diagrams(acc, x, w)
            s *= t
        return s, acc

    assert mul(h[1], h[2], h[1]) == (1, h[1])
    assert mul(h[2], h[1], h[2]) == (1, h[2])
    assert mul(h[1], h[3]) == mul(h[3], h[1])


def test_turnback_shapes():
    d = turnback((1, 2, 3, 2, 1), 2, 2)
    assert d.bottom == (1,)
    assert turnback((1, 2, 1, 3), 2, 1) is None
    e = turnback((1, 2, 1, 3), 1, 1)
    assert e.bottom == (1, 3)
    with pytest.raises(ValueError):
        turnback((1, 2, 1), 1, 2)


# --- JSON ---

def test_diagram_json_round_trip():
    for top in seqs(4):
        for d in enumerate_coloured_diagrams(top, top):
            data = json.loads(json.dumps(diagram_to_json(d)))
            assert diagram_from_json(data) == d


def test_diagram_json_shape():
    data = diagram_to_json(generator_h((1, 2, 1), 1))
    assert data == {"n_top": 2, "n_bot": 2, "pairing": [[0, 1], [2, 3]], "top": [1, 2, 1], "bottom": [1, 2, 1]}


def test_omega_json():
    data = omega_to_json(W2)
    assert data == {"ell": 2, "omega": [["3/2", "7/3"], ["-1/2", "5/3"]]}
    assert omega_from_json(data) == W2
    with pytest.raises(ValueError):
        omega_from_json({"ell": 3, "omega": [["1"]]})
    with pytest.raises(ValueError):
        WrappingMatrix([[1, 2]])


def test_omega_indexing():
    assert W2[1, 2] == Fraction(7, 3)
    assert W2.omega(2, 1) == Fraction(-1, 2)
    with pytest.raises(IndexError):
        W2[3, 1]
