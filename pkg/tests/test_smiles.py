import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsarbench.elements import DEFAULT_VALENCES
from qsarbench.errors import (
    ConflictingRingBond,
    InvalidCharge,
    SmilesParseError,
    UnbalancedParenthesis,
    UnclosedRingBond,
    UnknownElement,
)
from qsarbench.smiles import BondOrder, MolecularGraph, parse_smiles, perceive_rings

from conftest import REAL_SMILES, random_smiles


def test_methane():
    graph = parse_smiles("C")
    assert len(graph.atoms) == 1
    assert len(graph.bonds) == 0
    assert graph.implicit_h == [4]


def test_ethanol_valences():
    graph = parse_smiles("CCO")
    assert len(graph.atoms) == 3
    assert len(graph.bonds) == 2
    assert all(b.order is BondOrder.SINGLE for b in graph.bonds)
    assert graph.implicit_h == [3, 2, 1]


def test_benzene():
    graph = parse_smiles("c1ccccc1")
    assert len(graph.atoms) == 6
    assert len(graph.bonds) == 6
    assert all(a.aromatic for a in graph.atoms)
    assert all(b.order is BondOrder.AROMATIC for b in graph.bonds)
    assert all(graph.atom_in_ring)
    assert all(graph.bond_in_ring)
    assert graph.implicit_h == [1] * 6


def test_unclosed_ring_bond():
    with pytest.raises(UnclosedRingBond) as err:
        parse_smiles("C1CC")
    assert err.value.offset == 1


def test_acyclic_chain_has_no_rings():
    graph = parse_smiles("CCCC")
    assert not any(graph.atom_in_ring)
    assert not any(graph.bond_in_ring)


def test_cyclobutane_all_in_ring():
    graph = parse_smiles("C1CCC1")
    assert graph.atom_in_ring == [True] * 4
    assert graph.bond_in_ring == [True] * 4


def _simple_cycles_oracle(graph: MolecularGraph) -> tuple[set[int], set[int]]:
    """Brute-force enumeration of simple cycles; returns (atoms, bonds) on any."""
    adjacency = graph.adjacency()
    ring_atoms: set[int] = set()
    ring_bonds: set[int] = set()

    def walk(start: int, node: int, visited: list[int], used_bonds: list[int]):
        for nxt, bond_idx in adjacency[node]:
            if bond_idx in used_bonds:
                continue
            if nxt == start and len(visited) >= 3:
                ring_atoms.update(visited)
                ring_bonds.update(used_bonds + [bond_idx])
            elif nxt not in visited:
                walk(start, nxt, visited + [nxt], used_bonds + [bond_idx])

    for atom in range(len(graph.atoms)):
        walk(atom, atom, [atom], [])
    return ring_atoms, ring_bonds


def test_ring_flags_match_cycle_enumeration_oracle():
    graph = parse_smiles("C1CC1C")
    atoms, bonds = _simple_cycles_oracle(graph)
    assert atoms == {0, 1, 2}
    assert [graph.atom_in_ring[i] for i in range(4)] == [True, True, True, False]
    assert {i for i, flag in enumerate(graph.bond_in_ring) if flag} == bonds


@pytest.mark.parametrize("smiles", REAL_SMILES)
def test_ring_flags_on_corpus_match_oracle(smiles):
    graph = parse_smiles(smiles)
    atoms, bonds = _simple_cycles_oracle(graph)
    assert {i for i, f in enumerate(graph.atom_in_ring) if f} == atoms
    assert {i for i, f in enumerate(graph.bond_in_ring) if f} == bonds


def test_perceive_rings_idempotent():
    for smiles in REAL_SMILES:
        graph = parse_smiles(smiles)
        once = perceive_rings(graph)
        twice = perceive_rings(once)
        assert once.atom_in_ring == twice.atom_in_ring
        assert once.bond_in_ring == twice.bond_in_ring


def _count_atom_tokens(text: str) -> int:
    """Independent token counter: bracket groups plus bare subset symbols."""
    count = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "[":
            count += 1
            while text[i] != "]":
                i += 1
        elif text[i:i + 2] in ("Cl", "Br"):
            count += 1
            i += 1
        elif ch in "BCNOPSFI" or ch in "bcnops":
            count += 1
        i += 1
    return count


def test_atom_count_matches_token_counter_oracle(rng):
    corpus = REAL_SMILES + [random_smiles(rng) for _ in range(200)]
    for smiles in corpus:
        graph = parse_smiles(smiles)
        assert len(graph.atoms) == _count_atom_tokens(smiles), smiles


def test_valence_sums_respect_standard_valences(rng):
    corpus = REAL_SMILES + [random_smiles(rng) for _ in range(200)]
    for smiles in corpus:
        if "[" in smiles:
            continue  # bracket atoms carry explicit hydrogens instead
        graph = parse_smiles(smiles)
        order_sum = [0.0] * len(graph.atoms)
        for bond in graph.bonds:
            order_sum[bond.a] += bond.order.valence_units
            order_sum[bond.b] += bond.order.valence_units
        for idx, atom in enumerate(graph.atoms):
            if atom.aromatic:
                continue
            used = math.ceil(order_sum[idx])
            allowed = DEFAULT_VALENCES[atom.atomic_number]
            if used <= max(allowed):
                assert used + graph.implicit_h[idx] in allowed, (smiles, idx)


def test_branches_and_bond_symbols():
    graph = parse_smiles("CC(=O)O")
    orders = sorted(b.order.name for b in graph.bonds)
    assert orders == ["DOUBLE", "SINGLE", "SINGLE"]
    assert graph.implicit_h == [3, 0, 0, 1]


def test_triple_bond_and_explicit_single():
    graph = parse_smiles("C#C-C")
    assert [b.order for b in graph.bonds] == [BondOrder.TRIPLE, BondOrder.SINGLE]
    assert graph.implicit_h == [1, 0, 3]


def test_bracket_atom_fields():
    graph = parse_smiles("[13CH3+]")
    atom = graph.atoms[0]
    assert atom.atomic_number == 6
    assert atom.isotope == 13
    assert atom.explicit_h == 3
    assert atom.formal_charge == 1
    assert graph.implicit_h == [0]


def test_bracket_charges():
    assert parse_smiles("[O-]").atoms[0].formal_charge == -1
    assert parse_smiles("[Fe+2]").atoms[0].formal_charge == 2
    assert parse_smiles("[Fe++]").atoms[0].formal_charge == 2
    assert parse_smiles("[N+3]").atoms[0].formal_charge == 3


def test_aromatic_bracket_nitrogen():
    graph = parse_smiles("c1c[nH]cn1")
    pyrrole_n = graph.atoms[2]
    assert pyrrole_n.aromatic
    assert pyrrole_n.explicit_h == 1
    assert all(graph.atom_in_ring)


def test_dot_separated_fragments_share_one_graph():
    graph = parse_smiles("CCO.CC(=O)O")
    assert len(graph.atoms) == 7
    assert len(graph.bonds) == 5


def test_stereo_markers_parsed_and_discarded():
    graph = parse_smiles("C/C=C/C")
    assert [b.order for b in graph.bonds] == [
        BondOrder.SINGLE, BondOrder.DOUBLE, BondOrder.SINGLE,
    ]
    chiral = parse_smiles("C[C@H](N)C(=O)O")
    assert chiral.atoms[1].explicit_h == 1


def test_two_digit_ring_closure():
    graph = parse_smiles("C%12CCCCC%12")
    assert len(graph.bonds) == 6
    assert all(graph.atom_in_ring)


def test_ring_bond_order_from_either_closure_digit():
    for text in ("C=1CCCCC=1", "C=1CCCCC1", "C1CCCCC=1"):
        graph = parse_smiles(text)
        closure = graph.bonds[-1]
        assert closure.order is BondOrder.DOUBLE, text


def test_conflicting_ring_bond_symbols():
    with pytest.raises(ConflictingRingBond):
        parse_smiles("C=1CCCCC#1")


def test_unbalanced_parentheses():
    with pytest.raises(UnbalancedParenthesis):
        parse_smiles("C(C")
    with pytest.raises(UnbalancedParenthesis) as err:
        parse_smiles("CC)C")
    assert err.value.offset == 2


def test_unknown_element():
    with pytest.raises(UnknownElement):
        parse_smiles("Qx")
    with pytest.raises(UnknownElement):
        parse_smiles("[Zz]")


def test_invalid_charge():
    with pytest.raises(InvalidCharge):
        parse_smiles("[C++2]")
    with pytest.raises(InvalidCharge):
        parse_smiles("[C+99]")


def test_empty_input_rejected():
    with pytest.raises(SmilesParseError):
        parse_smiles("")


def test_duplicate_and_self_ring_bonds_rejected():
    with pytest.raises(ConflictingRingBond):
        parse_smiles("C11")
    with pytest.raises(ConflictingRingBond):
        parse_smiles("C12CC12")


@given(st.text(max_size=40))
def test_parser_never_panics(text):
    try:
        graph = parse_smiles(text)
    except SmilesParseError:
        return
    assert isinstance(graph, MolecularGraph)
    assert len(graph.implicit_h) == len(graph.atoms)


@given(st.binary(max_size=30))
def test_parser_never_panics_on_bytes(blob):
    try:
        text = blob.decode("utf-8", errors="surrogateescape")
        graph = parse_smiles(text)
    except SmilesParseError:
        return
    assert isinstance(graph, MolecularGraph)
