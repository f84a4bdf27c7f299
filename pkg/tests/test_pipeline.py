import pytest

from planar_l21.colouring import (
    BLACK,
    UNORIENTED,
    WHITE,
    ColouredOrientation,
    is_good_orientation,
    swap_colours,
    verify_2cpm,
    verify_coloured_orientation,
)
from planar_l21.errors import ValidationError
from planar_l21.graphs import check_regular, edge_key, from_json, verify_planar
from planar_l21.labelling import verify_labelling
from planar_l21.nae3sat import Nae3SatFormula, check_nae
from planar_l21.pipeline import (
    assignment_to_matching,
    build_auxiliary,
    build_instance,
    canonicalize_orientation,
    labelling_to_orientation,
    matching_to_assignment,
    matching_to_good_orientation,
    nae_to_cubic,
    orientation_to_labelling,
    orientation_to_matching,
    oriented_component_structure,
    planar_stage_from_graph,
    planarize,
    run_reduction,
    write_trace,
)

from conftest import complete_graph, make_graph

XXX = Nae3SatFormula(1, ((1, 1, 1),))
XYZ = Nae3SatFormula(3, ((1, 2, 3),))
CROSSY = Nae3SatFormula(2, ((1, 2, 1), (2, 1, 2)))


def k33():
    return make_graph(6, [(a, b) for a in range(3) for b in range(3, 6)])


def all_satisfying(formula):
    n = formula.num_vars
    out = []
    for bits in range(1 << n):
        a = {i: bool((bits >> (n - i)) & 1) for i in range(1, n + 1)}
        if check_nae(formula, a):
            out.append(a)
    return out


def test_cubic_census_single_clause():
    stage = nae_to_cubic(XXX)
    assert stage.graph.n == 40  # 46 minus the six consumed ports
    assert check_regular(stage.graph, 3)
    assert len(stage.identifying_edges) == 3


def test_cubic_census_two_clauses():
    stage = nae_to_cubic(Nae3SatFormula(3, ((1, 2, 3), (1, 2, 3))))
    assert stage.graph.n == 80
    assert len(stage.identifying_edges) == 6
    assert check_regular(stage.graph, 3)


def test_chord_system_covers_every_slot():
    stage = nae_to_cubic(CROSSY)
    stage.chords.validate()
    assert len(stage.chords.slots) == 12
    assert len(stage.chords.chords) == 6


def test_empty_formula_rejected():
    with pytest.raises(ValidationError):
        nae_to_cubic(Nae3SatFormula(1, ()))


def test_planarize_without_crossings_keeps_the_graph():
    stage = nae_to_cubic(XXX)
    planar = planarize(stage)
    assert planar.crossing_count == 0
    assert planar.graph.n == stage.graph.n
    assert planar.graph.edges == stage.graph.edges
    assert verify_planar(planar.graph, planar.rot)


def test_planarize_inserts_one_gadget_per_crossing():
    stage = nae_to_cubic(CROSSY)
    planar = planarize(stage)
    assert planar.crossing_count == 6
    assert len(planar.uncross_maps) == 6
    assert planar.graph.n == stage.graph.n + 24 * 6  # 28 vertices minus 4 pendants
    assert check_regular(planar.graph, 3)
    assert verify_planar(planar.graph, planar.rot)
    # each original chord carries one more segment than it has crossings
    assert len(planar.identifying_edges) == len(stage.identifying_edges) + 2 * 6


def test_auxiliary_counts_on_k4():
    stage = planar_stage_from_graph(complete_graph(4), None)
    # K4 with the id-order rotation happens to be planar already
    aux = build_auxiliary(stage)
    assert aux.graph.n == 40
    assert aux.graph.m == 48  # eight edges per replaced edge
    assert len(aux.out_vertices()) == 6


def test_auxiliary_counts_on_k33():
    aux = build_auxiliary(planar_stage_from_graph(k33()))
    assert aux.graph.n == 60
    assert aux.graph.m == 72
    for v in range(6):
        assert aux.graph.degree(v) == 3
    for record in aux.aux_records.values():
        assert aux.graph.degree(record["in"]) == 1
        assert aux.graph.degree(record["out"]) == 1


def test_auxiliary_rejects_noncubic():
    with pytest.raises(ValidationError):
        build_auxiliary(planar_stage_from_graph(complete_graph(3)))


def test_instance_census_k4_from_k4():
    aux = build_auxiliary(planar_stage_from_graph(complete_graph(4)))
    inst = build_instance(aux, 4)
    # 40 former vertices + 2 gadget interiors per 48 edges + 24 in/out
    # pendants + 12 hub leaves
    assert inst.graph.n == 40 + 2 * 48 + 24 + 12
    for v in range(aux.graph.n):
        assert inst.graph.degree(v) == 3
    with pytest.raises(ValidationError):
        build_instance(aux, 3)


def test_instance_planar_and_degree_bound_for_pipeline():
    trace = run_reduction(XYZ, 5)
    inst = trace.instance
    assert verify_planar(inst.graph, inst.rot)
    for v in range(trace.aux.graph.n):
        assert inst.graph.degree(v) == 4
    for w in inst.w_map.values():
        assert inst.graph.degree(w) == 4


def test_forward_chain_and_intermediate_verifiers():
    trace = run_reduction(XYZ, 4)
    assignment = all_satisfying(XYZ)[0]
    matching = assignment_to_matching(trace, assignment)
    assert verify_2cpm(trace.planar.graph, matching)
    for u, v in trace.planar.identifying_edges:
        assert matching[u] == matching[v]
    orientation = matching_to_good_orientation(trace, matching)
    assert is_good_orientation(trace.aux.graph, orientation, trace.aux.out_vertices())
    labelling = orientation_to_labelling(trace, orientation, 4)
    assert verify_labelling(trace.instance.graph, labelling)


def test_forward_chain_with_crossings():
    trace = run_reduction(CROSSY, 4)
    assignment = all_satisfying(CROSSY)[0]
    matching = assignment_to_matching(trace, assignment)
    orientation = matching_to_good_orientation(trace, matching)
    labelling = orientation_to_labelling(trace, orientation, 4)
    assert verify_labelling(trace.instance.graph, labelling)


def test_assignment_to_matching_refuses_bad_assignment():
    trace = run_reduction(XYZ, 4)
    with pytest.raises(ValidationError, match="clause 0"):
        assignment_to_matching(trace, {1: True, 2: True, 3: True})


def test_backward_chain_recovers_assignment():
    trace = run_reduction(XYZ, 4)
    assignment = all_satisfying(XYZ)[0]
    labelling = orientation_to_labelling(
        trace,
        matching_to_good_orientation(trace, assignment_to_matching(trace, assignment)),
        4,
    )
    orientation = labelling_to_orientation(trace, labelling)
    assert verify_coloured_orientation(
        trace.aux.graph, orientation, trace.aux.out_vertices()
    )
    good = canonicalize_orientation(trace, orientation)
    matching = orientation_to_matching(trace, good)
    recovered = matching_to_assignment(trace, matching)
    assert check_nae(XYZ, recovered)
    assert recovered == assignment


def test_complement_matching_gives_complement_assignment():
    trace = run_reduction(XYZ, 4)
    assignment = all_satisfying(XYZ)[0]
    matching = assignment_to_matching(trace, assignment)
    recovered = matching_to_assignment(trace, swap_colours(matching))
    assert recovered == {v: not val for v, val in assignment.items()}
    assert check_nae(XYZ, recovered)


def test_monochromatic_aux_edges_get_directed_cycles():
    trace = run_reduction(XYZ, 4)
    assignment = all_satisfying(XYZ)[0]
    matching = assignment_to_matching(trace, assignment)
    orientation = matching_to_good_orientation(trace, matching)
    mono = [(e, m) for e, m in trace.aux.aux_records.items() if matching[e[0]] == matching[e[1]]]
    assert mono
    for (x, y), m in mono:
        assert orientation.colouring[m["in"]] == matching[x]
        assert orientation.colouring[m["cu"]] != matching[x]
        ring = [
            orientation.orientation[edge_key(m[a], m[b])]
            for a, b in (("cu", "cin"), ("cin", "cv"), ("cv", "cout"), ("cout", "cu"))
        ]
        assert UNORIENTED not in ring
        assert orientation.orientation[edge_key(m["in"], m["cin"])] == UNORIENTED


def test_component_structure_is_paths_and_circuits():
    trace = run_reduction(XYZ, 4)
    for assignment in all_satisfying(XYZ)[:2]:
        orientation = matching_to_good_orientation(
            trace, assignment_to_matching(trace, assignment)
        )
        kinds = {
            kind
            for kind, _ in oriented_component_structure(
                trace.aux.graph, orientation, trace.aux.out_vertices()
            )
        }
        assert kinds <= {"path", "circuit"}


def test_canonicalize_is_identity_on_good_orientations():
    trace = run_reduction(XYZ, 4)
    assignment = all_satisfying(XYZ)[0]
    orientation = matching_to_good_orientation(
        trace, assignment_to_matching(trace, assignment)
    )
    fixed = canonicalize_orientation(trace, orientation)
    assert fixed.colouring == orientation.colouring
    assert fixed.orientation == orientation.orientation


def test_canonicalize_recolours_pendants_of_uniform_cycles():
    trace = run_reduction(XYZ, 4)
    assignment = all_satisfying(XYZ)[0]
    matching = assignment_to_matching(trace, assignment)
    good = matching_to_good_orientation(trace, matching)
    mono_edge = next(
        e for e in trace.aux.aux_records if matching[e[0]] == matching[e[1]]
    )
    m = trace.aux.aux_records[mono_edge]
    colours = dict(good.colouring)
    orientation = dict(good.orientation)
    cycle_shade = colours[m["cin"]]
    colours[m["in"]] = cycle_shade  # now matches the cycle; edge must orient
    inedge = edge_key(m["in"], m["cin"])
    orientation[inedge] = "F" if m["cin"] < m["in"] else "B"
    mutated = ColouredOrientation(colours, orientation)
    assert verify_coloured_orientation(trace.aux.graph, mutated, trace.aux.out_vertices())
    assert not is_good_orientation(trace.aux.graph, mutated, trace.aux.out_vertices())
    fixed = canonicalize_orientation(trace, mutated)
    assert fixed.colouring == good.colouring
    assert fixed.orientation == good.orientation


def test_matching_to_assignment_rejects_inconsistent_colours():
    trace = run_reduction(Nae3SatFormula(3, ((1, 2, 3), (1, 2, 3))), 4)
    assignment = {1: True, 2: False, 3: False}
    matching = assignment_to_matching(trace, assignment)
    lit_vertices = trace.planar.literal_vertices[1]
    broken = dict(matching)
    # flipping one literal vertex breaks the matching itself
    broken[lit_vertices[0]] = BLACK if matching[lit_vertices[0]] == WHITE else WHITE
    with pytest.raises(ValidationError):
        matching_to_assignment(trace, broken)


def test_unused_variable_defaults_to_false():
    formula = Nae3SatFormula(4, ((1, 2, 3),))  # variable 4 never occurs
    trace = run_reduction(formula, 4)
    assignment = {1: False, 2: False, 3: True, 4: False}
    matching = assignment_to_matching(trace, assignment)
    recovered = matching_to_assignment(trace, matching)
    assert recovered[4] is False


def test_trace_files_round_trip(tmp_path):
    trace = run_reduction(XYZ, 4)
    written = write_trace(trace, tmp_path)
    assert "instance.json" in written and "manifest.json" in written
    graph, rot, _, k = from_json((tmp_path / "instance.json").read_text())
    assert graph == trace.instance.graph
    assert k == 4
    graph_c, _, _, _ = from_json((tmp_path / "cubic.json").read_text())
    assert graph_c == trace.cubic.graph
