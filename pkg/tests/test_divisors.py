import pytest

from chipfire.divisors import (Divisor, canonical_divisor, dhar_reduce,
                               enumerate_jacobian, is_reduced,
                               linear_equivalent, rank, support_complex)
from chipfire.errors import EnumerationCapError, InvalidGraphError
from chipfire.graphs import (Graph, build_banana, build_cycle, build_general,
                             build_theta, jacobian_order)

from conftest import definitional_rank, random_connected_multigraph, random_divisor


def test_divisor_arithmetic():
    d = Divisor({"a": 2, "b": -1})
    e = Divisor({"b": 1, "c": 3})
    assert (d + e).coeffs == {"a": 2, "c": 3}
    assert (d - e).degree == d.degree - e.degree
    assert (2 * d)["a"] == 4
    assert (-d)["b"] == 1
    assert d["missing"] == 0
    assert not d.is_effective()
    assert Divisor({"a": 1}).is_effective()


def test_dhar_four_cycle_hand_run():
    g = Graph(["q", "x1", "x2", "x3"],
              [("q", "x1"), ("x1", "x2"), ("x2", "x3"), ("x3", "q")])
    form = dhar_reduce(g, Divisor({"x2": 2}), "q")
    assert form.divisor == Divisor({"q": 2})
    # the burning run fires {x2} and then the whole off-base set
    assert form.firing_certificate == ((("x2",), 1), (("x1", "x2", "x3"), 1))


def test_dhar_idempotent_and_replayable(rng):
    for _ in range(25):
        g = random_connected_multigraph(rng)
        d = random_divisor(rng, g)
        q = rng.choice(g.vertices)
        form = dhar_reduce(g, d, q)
        assert form.replay(g, d) == form.divisor
        again = dhar_reduce(g, form.divisor, q)
        assert again.divisor == form.divisor
        assert again.firing_certificate == ()
        assert is_reduced(g, form.divisor, q)
        assert all(form.divisor[v] >= 0 for v in g.vertices if v != q)


def test_banana_tuple_divisors_are_reduced():
    # one chip per strand at interior positions, the rest at the base hub,
    # stays fixed under reduction
    g = build_banana([3, 4, 5])
    d = Divisor({"s0.1": 1, "s1.2": 1, "s0.0": -2})
    form = dhar_reduce(g, d, "L")
    assert form.divisor == d
    assert form.firing_certificate == ()


def test_reduced_tuple_divisors_are_fixed_points():
    # coset representatives translate to base-reduced divisors verbatim
    from chipfire.banana import BananaTuple, tuple_to_reduced_divisor
    g = build_banana([2, 3, 2])
    spec = g.banana
    import itertools
    for cand in itertools.product(range(3), range(4), range(3)):
        t = BananaTuple(spec, cand)
        if not t.is_reduced():
            continue
        d = tuple_to_reduced_divisor(t, 0).to_divisor(spec)
        assert dhar_reduce(g, d, "L").divisor == d


def test_reduced_means_no_legal_firing_set():
    # definitional check on a small graph: once reduced, every nonempty vertex
    # set avoiding the base leaves some member in debt if fired
    import itertools
    g = Graph(["q", "x1", "x2", "x3"],
              [("q", "x1"), ("x1", "x2"), ("x2", "x3"), ("x3", "q"), ("x1", "x3")])
    d = dhar_reduce(g, Divisor({"x2": 3, "x3": 1}), "q").divisor
    others = [v for v in g.vertices if v != "q"]
    for size in range(1, len(others) + 1):
        for combo in itertools.combinations(others, size):
            inside = set(combo)
            legal = all(
                d[v] >= sum(m for w, m in g._adj[g.index(v)]
                            if g.vertices[w] not in inside)
                for v in inside)
            assert not legal, combo


def test_rank_examples():
    b = build_banana([1, 1, 1, 1])
    assert rank(b, Divisor({"s0.0": 1, "s0.1": 1})) == 1      # hub pair
    assert rank(b, Divisor()) == 0
    assert rank(b, Divisor({"s0.0": -1})) == -1
    th = build_theta(2, 3, 4)
    assert rank(th, Divisor({"s0.0": 1, "s0.2": 1})) == 1


def test_rank_definitional_oracle(rng):
    for _ in range(10):
        g = random_connected_multigraph(rng, max_vertices=4, max_extra=3)
        d = random_divisor(rng, g, lo=-2, hi=3)
        if d.degree > 5:
            continue
        assert rank(g, d, rank_determining_set="full") == definitional_rank(g, d)


def test_rank_effective_iff_reduced_base_nonnegative(rng):
    for _ in range(20):
        g = random_connected_multigraph(rng)
        d = random_divisor(rng, g)
        for q in g.vertices:
            form = dhar_reduce(g, d, q)
            assert (rank(g, d) >= 0) == (form.divisor[q] >= 0)


def test_rank_hub_pair_determines_banana_ranks(rng):
    # the two hubs act as a rank-determining set on bananas
    for _ in range(10):
        genus = rng.randint(1, 3)
        lengths = [rng.randint(1, 3) for _ in range(genus + 1)]
        g = build_banana(lengths)
        d = random_divisor(rng, g, lo=-2, hi=3)
        assert rank(g, d) == rank(g, d, rank_determining_set="full")


def test_rank_monotone_in_one_chip(rng):
    for _ in range(15):
        g = random_connected_multigraph(rng, max_vertices=5)
        d = random_divisor(rng, g, lo=-2, hi=3)
        r = rank(g, d)
        for w in g.vertices:
            assert rank(g, d + Divisor.at(w)) in (r, r + 1)


def test_riemann_roch(rng):
    for _ in range(40):
        g = random_connected_multigraph(rng)
        k = canonical_divisor(g)
        d = random_divisor(rng, g)
        assert rank(g, d) - rank(g, k - d) == d.degree - g.genus + 1


def test_canonical_divisor_shapes():
    b = build_banana([2, 3, 4, 5])
    k = canonical_divisor(b)
    assert k == Divisor({"s0.0": 2, "s0.2": 2})
    assert k.degree == 2 * b.genus - 2
    assert rank(b, k) == b.genus - 1

    cyc = build_cycle(3, 2).graph
    assert canonical_divisor(cyc) == Divisor()

    path = build_general(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert canonical_divisor(path) == Divisor({"a": -1, "c": -1})


def test_support_complex_examples():
    b = build_banana([2, 3, 4])
    assert support_complex(b, Divisor({"s0.1": 1, "s1.2": 1})) == {"s0.1", "s1.2"}
    assert support_complex(b, Divisor()) == set()
    assert support_complex(b, canonical_divisor(b)) == set(b.vertices)


def test_linear_equivalence_strand_shift():
    g = build_banana([3, 4, 5])
    for alpha, n in enumerate([3, 4, 5]):
        one = Divisor.at(g.banana.vertex_id(alpha, 1)) - Divisor.at("s0.0")
        for a in range(n + 1):
            lhs = a * one
            rhs = Divisor.at(g.banana.vertex_id(alpha, a)) - Divisor.at("s0.0")
            assert linear_equivalent(g, lhs, rhs)
    assert linear_equivalent(g, Divisor({"s0.1": 2}), Divisor({"s0.1": 2}))
    assert not linear_equivalent(g, Divisor({"s0.1": 2}), Divisor({"s0.1": 1}))


def test_enumerate_jacobian_counts():
    assert len(enumerate_jacobian(build_cycle(2, 1).graph)) == 3
    assert len(enumerate_jacobian(build_theta(1, 1, 1))) == 3
    assert len(enumerate_jacobian(build_theta(3, 4, 5))) == 47


def test_enumerate_jacobian_classes_distinct(rng):
    g = build_theta(2, 1, 3)
    classes = enumerate_jacobian(g)
    assert len(classes) == jacobian_order(g)
    for i, a in enumerate(classes):
        assert a.degree == 0
        for b in classes[i + 1:]:
            assert not linear_equivalent(g, a, b)


def test_enumerate_jacobian_cap():
    g = build_theta(3, 4, 5)
    with pytest.raises(EnumerationCapError):
        enumerate_jacobian(g, cap=10)


def test_enumeration_cap_env(monkeypatch):
    g = build_theta(3, 4, 5)
    monkeypatch.setenv("CHIPFIRE_CLASS_CAP", "5")
    with pytest.raises(EnumerationCapError):
        enumerate_jacobian(g)
    monkeypatch.setenv("CHIPFIRE_CLASS_CAP", "100")
    assert len(enumerate_jacobian(g)) == 47


def test_genus_zero_ranks():
    path = build_general(["a", "b", "c"], [("a", "b"), ("b", "c")])
    for d in (Divisor({"a": 2}), Divisor({"c": 1, "a": 1}), Divisor({"b": 3})):
        assert rank(path, d) == d.degree
    assert rank(path, Divisor({"a": -1})) == -1


def test_dhar_unknown_vertex():
    g = build_theta(1, 1, 1)
    with pytest.raises(InvalidGraphError):
        dhar_reduce(g, Divisor(), "nope")
