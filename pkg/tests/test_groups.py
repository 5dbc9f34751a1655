import collections
import json

import numpy as np
import pytest

from phiharm import groups as gr
from phiharm.errors import ResourceError, ValidationError


def test_ball_sizes():
    assert gr.build_ball("z:1", 3).n_vertices == 7
    assert gr.build_ball("free:2", 2).n_vertices == 17
    assert gr.build_ball("z:2", 2).n_vertices == 13


def test_bfs_order_z1():
    ball = gr.build_ball("z:1", 3)
    assert [x[0] for x in ball.elements] == [0, 1, -1, 2, -2, 3, -3]
    assert ball.depth.tolist() == [0, 1, 1, 2, 2, 3, 3]
    assert ball.interior.tolist() == [True, True, True, True, True, False, False]


def test_free_group_sphere_sizes():
    for k in (2, 3):
        ball = gr.build_ball(f"free:{k}", 6 if k == 2 else 4)
        spheres = collections.Counter(ball.depth.tolist())
        for r in range(1, ball.radius + 1):
            assert spheres[r] == 2 * k * (2 * k - 1) ** (r - 1)


def test_lamplighter_growth_between_z2_and_free2():
    # The strict sandwich holds from R=4 on; at R=3 the lamplighter ball (22
    # vertices, hand-countable) is smaller than the z:2 ball (25).
    assert gr.build_ball("lamplighter", 3).n_vertices == 22
    assert gr.build_ball("z:2", 3).n_vertices == 25
    for radius in (4, 5):
        lamp = gr.build_ball("lamplighter", radius).n_vertices
        z2 = gr.build_ball("z:2", radius).n_vertices
        f2 = gr.build_ball("free:2", radius).n_vertices
        assert z2 < lamp < f2


def test_neighbor_maps_mutually_consistent():
    for spec, radius in (("z:2", 3), ("free:2", 3), ("lamplighter", 4),
                         ("prod(z:1,free:2)", 2)):
        ball = gr.build_ball(spec, radius)
        group = ball.group
        for gi in range(ball.n_gens):
            inv = group.inverse_index[gi]
            for x in range(ball.n_vertices):
                y = int(ball.nbr[gi, x])
                if y >= 0:
                    assert int(ball.nbr[inv, y]) == x


def test_interior_vertices_have_all_neighbors():
    for spec in ("z:2", "free:2", "lamplighter"):
        ball = gr.build_ball(spec, 4)
        assert (ball.nbr[:, ball.interior] >= 0).all()


def test_depths_change_by_at_most_one_along_edges():
    ball = gr.build_ball("lamplighter", 5)
    for gi in range(ball.n_gens):
        for x in range(ball.n_vertices):
            y = int(ball.nbr[gi, x])
            if y >= 0:
                assert abs(int(ball.depth[y]) - int(ball.depth[x])) <= 1


def test_free_action():
    # s^-1 x = x would force s = identity; never happens for generators
    for spec in ("z:2", "free:2", "lamplighter", "prod(z:1,z:1)"):
        ball = gr.build_ball(spec, 3)
        for gi in range(ball.n_gens):
            assert not np.any(ball.nbr[gi] == np.arange(ball.n_vertices))


def test_vertex_budget():
    with pytest.raises(ResourceError):
        gr.build_ball("free:2", 10, vertex_budget=100)


def test_group_spec_parsing():
    assert gr.parse_group_spec("z:3").spec == "z:3"
    assert gr.parse_group_spec("prod(z:1,lamplighter)").spec == \
        "prod(z:1,lamplighter)"
    assert gr.parse_group_spec("prod(prod(z:1,z:1),free:2)").spec == \
        "prod(prod(z:1,z:1),free:2)"
    for bad in ("z:", "free:0", "foo", "prod(z:1)", "z:0"):
        with pytest.raises((ValidationError, ValueError)):
            gr.parse_group_spec(bad)


def test_normal_form_roundtrip():
    for spec in ("z:2", "free:2", "lamplighter", "prod(z:1,free:2)"):
        ball = gr.build_ball(spec, 3)
        group = ball.group
        for x in ball.elements:
            assert group.parse_nf(group.nf_str(x)) == x


def test_free_group_reduction():
    g = gr.FreeGroup(2)
    a, A, b, B = g.generators()
    w = g.mul(g.mul(a, b), g.mul(B, A))
    assert w == ""
    assert g.mul("ab", "Ba") == "aa"
    assert g.inv("aB") == "bA"


def test_lamplighter_relations():
    g = gr.Lamplighter()
    t, T, a = g.generators()
    assert g.mul(a, a) == g.identity()
    assert g.mul(t, T) == g.identity()
    # t a t^-1 toggles the lamp one step right of the origin
    conj = g.mul(t, g.mul(a, T))
    assert conj == (frozenset({1}), 0)
    x = (frozenset({-1, 2}), 3)
    assert g.mul(x, g.inv(x)) == g.identity()


def test_act_identity_and_shift():
    ball = gr.build_ball("z:1", 3)
    f = ball.function(np.arange(7.0))
    out, mask = gr.act(ball, ball.group.identity(), f)
    assert np.array_equal(out.values, f.values) and mask.all()
    delta0 = ball.function(np.eye(7)[0])
    out, mask = gr.act(ball, (1,), delta0)
    assert out.values[ball.index[(1,)]] == 1.0
    assert out.values.sum() == 1.0
    assert not mask[ball.index[(-3,)]]


def test_act_composition_on_common_domain():
    ball = gr.build_ball("free:2", 3)
    group = ball.group
    rng = np.random.default_rng(0)
    f = ball.function(rng.normal(size=ball.n_vertices))
    short = [ball.elements[i] for i in range(ball.n_vertices)
             if ball.depth[i] <= 2]
    for gi in range(0, len(short), 7):
        for hi in range(0, len(short), 5):
            g, h = short[gi], short[hi]
            lh, mh = gr.act(ball, h, f)
            nested, mg = gr.act(ball, g, lh)
            direct, md = gr.act(ball, group.mul(g, h), f)
            w = group.inv(g)
            defined = np.zeros(ball.n_vertices, dtype=bool)
            for i, x in enumerate(ball.elements):
                j = ball.index.get(group.mul(w, x))
                defined[i] = j is not None and mh[j]
            common = defined & md
            assert np.allclose(nested.values[common], direct.values[common],
                               atol=1e-15)


def test_act_generator_matches_act():
    ball = gr.build_ball("lamplighter", 3)
    rng = np.random.default_rng(1)
    values = rng.normal(size=ball.n_vertices)
    f = ball.function(values)
    for gi, s in enumerate(ball.group.generators()):
        fast, fast_mask = gr.act_generator(ball, gi, values)
        slow, slow_mask = gr.act(ball, s, f)
        assert np.array_equal(fast_mask, slow_mask)
        assert np.array_equal(fast[fast_mask], slow.values[fast_mask])


def test_ball_serialization_roundtrip():
    for spec in ("z:2", "free:2", "lamplighter", "prod(z:1,z:1)"):
        ball = gr.build_ball(spec, 3)
        text = json.dumps(ball.to_json_dict(), sort_keys=True)
        back = gr.ball_from_json_dict(json.loads(text))
        assert json.dumps(back.to_json_dict(), sort_keys=True) == text
        assert np.array_equal(back.depth, ball.depth)
        assert np.array_equal(back.interior, ball.interior)


def test_ball_deserialization_rejects_corruption():
    data = gr.build_ball("z:1", 2).to_json_dict()
    bad = json.loads(json.dumps(data))
    bad["neighbors"]["+e1"][0] = 99
    with pytest.raises(ValidationError):
        gr.ball_from_json_dict(bad)
    bad = json.loads(json.dumps(data))
    bad["vertices"][0] = "5"
    with pytest.raises(ValidationError):
        gr.ball_from_json_dict(bad)


def test_function_length_check():
    ball = gr.build_ball("z:1", 2)
    with pytest.raises(ValueError):
        ball.function(np.zeros(3))
