import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cspp.domain import INF
from cspp.graph import WeightedGraph
from cspp.instances import INSTANCE_IDS, example_graph, instance, random_graph
from cspp.modality import Transition, apply
from cspp.solve import bellman_power, coalg_dijkstra, kleene_gfp
from cspp.verify import (
    Analytic,
    BudgetError,
    CombinatorialBlowup,
    FromGraph,
    InstanceMismatch,
    Leaf,
    Node,
    NotAWitness,
    Sampler,
    Witness,
    check_expansive,
    contraction_coalgebra,
    cross_check,
    discount_game_analysis,
    enumerate_run_trees,
    omega_sigma,
    run_tree_infima,
    run_tree_infimum,
    run_tree_value,
    run_tree_values,
    sample_graph_for,
    tree_value,
    witness_from_dict,
)

from oracles import brute_tree_values, naive_gfp, naive_iterate

YES = [i for i in INSTANCE_IDS if instance(i).dijkstra_applies]
NO = [i for i in INSTANCE_IDS if not instance(i).dijkstra_applies]
# rows whose modality returns top as soon as one slot is top
TOP_ABSORBING = [i for i in INSTANCE_IDS if i not in ("ulongest", "prob-reach")]


# the closure of {xi, top} -----------------------------------------------------


def test_closure_over_fig2_weights_one_round():
    s = omega_sigma(instance("spp"), 1, FromGraph(example_graph("fig1_fig2")))
    assert s.value_set() == {0, 1, 2, 3, 6, INF}


@pytest.mark.parametrize("iid", INSTANCE_IDS)
def test_closure_at_depth_zero_is_base(iid):
    inst = instance(iid)
    assert omega_sigma(inst, 0).value_set() == {inst.domain.xi, inst.domain.top}


def test_closure_for_reachability_never_grows():
    for depth in range(5):
        assert omega_sigma(instance("reach"), depth).value_set() == {0, INF}


def test_closure_rejects_graph_of_other_instance():
    with pytest.raises(InstanceMismatch):
        omega_sigma(instance("spp"), 1, FromGraph(example_graph("fig3")))


def test_closure_reports_cap():
    s = omega_sigma(instance("spp"), 6, Sampler(seed=1), cap=10)
    assert s.capped and len(s.values) == 10


@pytest.mark.parametrize("iid", INSTANCE_IDS)
@given(seed=st.integers(0, 1000))
def test_closure_grows_one_application_at_a_time(iid, seed):
    inst = instance(iid)
    src = Sampler(seed=seed, count=4)
    s3 = omega_sigma(inst, 3, src, cap=2000)
    if s3.capped:
        return
    prev = set()
    for depth in range(4):
        cur = omega_sigma(inst, depth, src, cap=2000).value_set()
        assert prev <= cur
        prev = cur
    seen = set(s3.levels[0])
    for level in s3.levels[1:]:
        for v in level:
            node = s3.trees[v]
            assert isinstance(node, Node) and all(c in seen for c in node.slot_values)
            assert tree_value(inst, node) == v
        seen |= set(level)


# expansiveness --------------------------------------------------------------


def test_spp_is_expansive():
    assert check_expansive(instance("spp")).verdict == "Expansive"


def test_negative_edges_witness():
    rep = check_expansive(instance("spp-neg"))
    assert rep.verdict == "NotExpansive"
    w = rep.witness
    assert (w.tree.payload, w.slot_value, w.result) == (-1, 1, 0)


def test_discounted_game_default_not_expansive():
    assert check_expansive(instance("dyn-game-discount", l0=1, L=2, r="1/2", xi=0)).verdict == "NotExpansive"


@pytest.mark.parametrize("iid", INSTANCE_IDS)
def test_analytic_verdict_matches_catalog(iid):
    inst = instance(iid)
    rep = check_expansive(inst, source=Analytic())
    assert rep.expansive is inst.dijkstra_applies
    if rep.witness is not None:
        assert rep.witness.check()


@pytest.mark.parametrize("iid", INSTANCE_IDS)
def test_sampled_verdict_matches_catalog(iid):
    inst = instance(iid)
    rep = check_expansive(inst, depth=3, source=Sampler(seed=0))
    assert rep.expansive is inst.dijkstra_applies
    if rep.witness is not None:
        assert rep.witness.check()


@pytest.mark.parametrize("iid", YES)
def test_sample_graphs_of_expansive_rows_show_no_violation(iid):
    inst = instance(iid)
    assert check_expansive(inst, depth=3, source=FromGraph(sample_graph_for(inst))).verdict == "Expansive"


def test_search_finds_shallowest_witness():
    rep = check_expansive(instance("spp-neg"), depth=3, source=FromGraph(example_graph("neg_edges")))
    assert rep.witness.tree.depth == 1


def test_budget_handling():
    with pytest.raises(BudgetError):
        check_expansive(instance("spp"), source=Sampler(), budget=0)
    rep = check_expansive(instance("spp"), depth=3, source=Sampler(), budget=5)
    assert rep.verdict == "Unknown" and "budget" in rep.reason


weights = st.integers(1, 4)
rates = st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)])


@given(lo=weights, extra=st.integers(0, 3), r=rates, xi=st.integers(0, 8))
def test_discounted_game_regimes(lo, extra, r, xi):
    inst = instance("dyn-game-discount", l0=lo, L=lo + extra, r=str(r), xi=xi)
    rep = check_expansive(inst)
    assert rep.expansive is inst.dijkstra_applies
    assert rep.analysis["agrees_with_uniform_condition"]
    if extra == 0 and xi <= lo + r * xi:
        assert rep.verdict == "Expansive"
    if extra > 0 and r < 1:
        assert rep.verdict == "NotExpansive" and rep.witness.check()


def test_discounted_game_single_step_condition_is_not_enough():
    a = discount_game_analysis(1, 2, Fraction(1, 2), 0)
    assert a["single_step_condition"] and not a["uniform_condition"]


# witnesses and contraction ---------------------------------------------------


def _witness(iid, **params):
    return check_expansive(instance(iid, params or None)).witness


def test_negative_edge_witness_contracts_to_bundled_graph():
    assert contraction_coalgebra(_witness("spp-neg")) == example_graph("neg_edges")


def test_probabilistic_witness_contracts_to_bundled_graph():
    w = _witness("prob-reach")
    assert w.index == 1
    assert contraction_coalgebra(w) == example_graph("prob_counterexample")


@pytest.mark.parametrize("iid", NO)
def test_every_witness_contracts_to_a_disagreement(iid):
    w = _witness(iid)
    g = contraction_coalgebra(w)
    rep = cross_check(g, run_tree_height=None)
    assert rep.disagreement
    assert rep.diffs["dijkstra/kleene"]


def test_discount_contraction_breaks_dijkstra():
    g = contraction_coalgebra(_witness("spp-discount"))
    assert coalg_dijkstra(g).valuation != naive_gfp(g)


def test_contraction_rejects_non_witness():
    inst = instance("spp")
    xi = Leaf("xi", 0)
    tree = Node(2, (Node(1, (xi,), 1),), 3)
    with pytest.raises(NotAWitness):
        contraction_coalgebra(Witness(inst, tree, 0))
    bad = Node(2, (xi,), 5)
    with pytest.raises(NotAWitness):
        contraction_coalgebra(Witness(inst, bad, 0))


def test_contraction_numbers_nodes_in_postorder():
    inst = instance("spp-neg")
    leaf = Leaf("xi", 0)
    child = Node(2, (Node(1, (leaf,), 1),), 3)
    g = contraction_coalgebra(Witness(inst, Node(-2, (child,), 1), 0))
    assert g.targets == (True, False, False)
    assert g.transitions == ((), (Transition(1, (0,)),), (Transition(2, (1,)), Transition(-2, (2,))))


def test_contraction_keeps_repeated_subtrees_apart():
    inst = instance("prob-reach")
    xi = Leaf("xi", 1)
    top = Leaf("top", 0)
    tree = Node((0.25, 0.25, 0.5), (xi, xi, top), 0.5)
    g = contraction_coalgebra(Witness(inst, tree, 2))
    assert g.V == 3 and g.targets == (True, True, False)
    assert g.transitions[2] == (Transition((0.25, 0.25, 0.5), (0, 1, 2)),)


@pytest.mark.parametrize("iid", NO)
def test_witness_json_round_trip(iid):
    w = _witness(iid)
    back = witness_from_dict(json.loads(w.to_json()))
    assert back.tree == w.tree and back.index == w.index and back.instance == w.instance


def test_witness_file_with_wrong_value_is_recomputed():
    doc = _witness("spp-neg").to_dict()
    doc["tree"]["value"] = 99
    assert witness_from_dict(doc).result == 0


# run trees ---------------------------------------------------------------------


def test_run_tree_infimum_on_fig2():
    assert run_tree_infimum(example_graph("fig1_fig2"), 5, 6) == 4


def test_run_tree_infimum_without_finite_tree_is_top():
    g = example_graph("fig3")
    for h in range(6):
        assert run_tree_infimum(g, 4, h) == INF


def test_single_leaf_tree():
    g = example_graph("fig1_fig2")
    assert run_tree_infimum(g, 0, 0) == 0


def test_run_tree_budget():
    g = example_graph("fig3")
    with pytest.raises(CombinatorialBlowup):
        run_tree_values(g, 6, budget=10)
    with pytest.raises(IndexError):
        run_tree_infimum(g, 9, 1)


@pytest.mark.parametrize("iid", TOP_ABSORBING)
@given(seed=st.integers(0, 2**32 - 1), h=st.integers(0, 4))
def test_run_trees_give_kleene_iterates(iid, seed, h):
    g = random_graph(instance(iid), random.Random(seed), max_states=6, max_arity=2)
    assert run_tree_infima(g, h) == bellman_power(g, h + 1) == naive_iterate(g, h + 1)


@pytest.mark.parametrize("iid", ["spp", "bintree", "prob-reach", "ulongest", "dyn-game"])
@given(seed=st.integers(0, 2**32 - 1), h=st.integers(0, 3))
def test_memoized_values_match_brute_force(iid, seed, h):
    g = random_graph(instance(iid), random.Random(seed), max_states=4, max_arity=2, max_transitions=2)
    sets = run_tree_values(g, h)[h]
    for x in g.states:
        assert sets[x] == brute_tree_values(g, x, h)


@given(seed=st.integers(0, 2**32 - 1), h=st.integers(0, 3))
def test_materialized_trees_match_value_sets(seed, h):
    g = random_graph(instance("bintree"), random.Random(seed), max_states=4, max_transitions=2)
    sets = run_tree_values(g, h)[h]
    for x in g.states:
        trees = enumerate_run_trees(g, x, h)
        assert {run_tree_value(g, t) for t in trees} == sets[x]
        assert all(t.height <= h for t in trees)


@pytest.mark.parametrize("iid", YES)
@given(seed=st.integers(0, 2**32 - 1))
def test_run_trees_of_acyclic_graph_give_gfp(iid, seed):
    g = random_graph(instance(iid), random.Random(seed), max_states=6, max_arity=2, acyclic=True)
    kl = kleene_gfp(g)
    assert run_tree_infima(g, g.V) == kl.valuation


def test_reverse_order_rows_break_the_identity():
    g = example_graph("prob_counterexample")
    assert run_tree_infima(g, 3) != bellman_power(g, 4)


# cross checks ------------------------------------------------------------------


def test_cross_check_fig2_agrees():
    rep = cross_check(example_graph("fig1_fig2"), run_tree_height=4)
    assert not rep.disagreement
    assert rep.valuations["dijkstra"] == rep.valuations["kleene"] == [0, 1, 5, 3, 6, 4]


def test_cross_check_negative_edges():
    rep = cross_check(example_graph("neg_edges"))
    assert rep.disagreement
    assert rep.diffs["dijkstra/dijkstra-heap"] == []
    assert [x for x, _, _ in rep.diffs["dijkstra/kleene"]] == [1]
    assert "DISAGREE" in rep.render()


def test_cross_check_empty_graph():
    rep = cross_check(WeightedGraph(instance("spp"), [], []))
    assert not rep.disagreement


def test_capped_kleene_above_dijkstra_is_inconclusive():
    # a long countdown chain that Kleene cannot finish within a tiny cap
    inst = instance("spp")
    V = 30
    g = WeightedGraph(inst, [x == 0 for x in range(V)],
                      [[]] + [[Transition(1, (x - 1,))] for x in range(1, V)])
    rep = cross_check(g, run_tree_height=None, max_iters=3)
    assert not rep.disagreement
    assert any("inconclusive" in n for n in rep.notes)


def test_apply_agrees_with_witness_values():
    w = _witness("spp-discount")
    inst = w.instance
    assert apply(inst.modality, inst.domain, w.tree.payload, w.tree.slot_values) == w.result
