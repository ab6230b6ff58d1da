import json

import numpy as np
import pytest

from qphi.dendrogram import (
    build_dendrogram,
    from_json,
    stability_probe,
    to_dot,
    to_json,
    to_newick,
)
from qphi.errors import BadParameter, SingleSubsystem
from qphi.states import (
    bell,
    ghz,
    maximally_mixed,
    pure_state,
    substream,
    tensor,
)

BELL_PHI = 0.3803956658485781
CLASSICAL_PAIR_PHI = 0.2157615543388356


def test_bell_tree():
    d = build_dendrogram(bell())
    assert d.root.members == (0, 1)
    assert d.root.phi_internal == pytest.approx(BELL_PHI, abs=1e-9)
    assert len(d.leaves()) == 2 and len(d.internal_nodes()) == 1
    assert to_newick(d) == "(0,1)[&phi=0.380396];"


def test_bell_with_spectator_qubit():
    spectator = pure_state(np.array([1.0, 0.0]), (2,))
    rho = tensor(bell(), spectator)
    d = build_dendrogram(rho)
    assert abs(d.root.phi_internal) <= 1e-10
    kids = {c.members for c in d.root.children}
    assert kids == {(0, 1), (2,)}
    inner = next(c for c in d.root.children if c.members == (0, 1))
    assert inner.phi_internal == pytest.approx(BELL_PHI, abs=1e-9)
    assert all(leaf.is_leaf and leaf.phi_internal is None for leaf in d.leaves())


def test_ghz3_tree_values_and_newick():
    d = build_dendrogram(ghz(3))
    assert d.root.phi_internal == pytest.approx(BELL_PHI, abs=1e-9)
    assert d.root.tie_count == 3
    pair = next(n for n in d.internal_nodes() if len(n.members) == 2)
    assert pair.phi_internal == pytest.approx(CLASSICAL_PAIR_PHI, abs=1e-6)
    assert to_newick(d) == "(0,(1,2)[&phi=0.215762])[&phi=0.380396];"


def test_structural_invariants_on_random_state():
    from qphi.states import ginibre_mixed

    rho = ginibre_mixed((2, 2, 2, 2), 16, substream(2, "dend"))
    d = build_dendrogram(rho)
    assert len(d.leaves()) == 4
    assert len(d.internal_nodes()) == 3
    for node in d.internal_nodes():
        a, b = node.children
        assert tuple(sorted(a.members + b.members)) == node.members
    # deterministic rebuild
    again = build_dendrogram(rho)
    assert to_json(d) == to_json(again)


def test_json_round_trip():
    d = build_dendrogram(ghz(3))
    text = to_json(d)
    back = from_json(text)
    assert back == d
    assert to_json(back) == text
    parsed = json.loads(text)
    assert parsed["dims"] == [2, 2, 2]
    with pytest.raises(BadParameter):
        from_json("{\"not\": \"a tree\"}")


def test_dot_export_mentions_all_leaves():
    d = build_dendrogram(ghz(3))
    dot = to_dot(d)
    assert dot.startswith("digraph")
    for q in ("q0", "q1", "q2"):
        assert q in dot
    assert "phi=0.380396" in dot


def test_full_product_tree_has_zero_heights():
    from qphi.states import ginibre_mixed

    factors = [ginibre_mixed((2,), 2, substream(8, f"dend-prod-{i}")) for i in range(3)]
    rho = tensor(tensor(factors[0], factors[1]), factors[2])
    d = build_dendrogram(rho)
    for node in d.internal_nodes():
        assert abs(node.phi_internal) <= 1e-9
    text = to_newick(d)
    assert "-0.000000" not in text


def test_single_subsystem_rejected():
    with pytest.raises(SingleSubsystem):
        build_dendrogram(maximally_mixed((4,)))


def test_stability_probe_reports():
    rep = stability_probe(ghz(3), trials=3, eps=1e-3, seed=0)
    assert rep["trials"] == 3
    assert rep["max_phi_shift"] >= 0.0
    assert rep["topology_changes"] >= 0
    assert {"max_phi_shift", "shift_bound", "shift_violations", "topology_changes", "trials"} <= set(rep)
    with pytest.raises(BadParameter):
        stability_probe(ghz(3), trials=0)
