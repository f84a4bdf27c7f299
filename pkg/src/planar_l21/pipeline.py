"""The reduction chain and its witness translators.

Stages: formula -> cubic graph (one clause gadget per clause, literal ports
linked cyclically) -> planar cubic graph (each chord crossing replaced by an
uncrossing gadget) -> auxiliary graph (every edge replaced by the four-cycle
gadget) -> labelling instance (pendants to degree k-1, every former edge
replaced by the span-k edge gadget, hub pendants under each out-vertex).

The witness translators execute the constructive arguments in both
directions; every translator asserts its stage verifier before returning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from . import chords as chordgeo
from .colouring import (
    BACKWARD,
    BLACK,
    FORWARD,
    UNORIENTED,
    WHITE,
    ColouredOrientation,
    TwoColouring,
    is_good_orientation,
    solve_2cpm,
    verify_2cpm,
    verify_coloured_orientation,
)
from .errors import InconsistencyError, ValidationError
from .gadgets import GadgetInstance, build_aux_edge, build_clause_gadget, build_edge_gadget, build_uncrossing
from .graphs import (
    CYCLE_VERTEX,
    GADGET_INTERNAL,
    GATE,
    IN_VERTEX,
    ORIGINAL,
    OUT_VERTEX,
    PENDANT,
    Edge,
    Graph,
    GraphBuilder,
    RotationSystem,
    check_regular,
    edge_key,
    to_json,
    verify_planar,
)
from .labelling import Labelling, solve_labelling, verify_labelling
from .nae3sat import Assignment, Nae3SatFormula, check_nae, literal_value

PORT_SLOT_ORDER = ("q1", "r1", "q2", "r2", "q3", "r3")
_SLOT_INDEX = {name: i for i, name in enumerate(PORT_SLOT_ORDER)}


@dataclass(frozen=True)
class SlotRecord:
    index: int
    clause: int
    port: str  # consumed pendant port, q1..r3
    attach: int  # vertex that kept the half-edge


@dataclass(frozen=True)
class ChordRecord:
    slot_lo: int
    slot_hi: int
    literal: int


@dataclass
class ChordSystem:
    slots: List[SlotRecord]
    chords: List[ChordRecord]

    def validate(self) -> None:
        used = [s for ch in self.chords for s in (ch.slot_lo, ch.slot_hi)]
        if sorted(used) != list(range(len(self.slots))):
            raise ValidationError("every port slot must appear in exactly one chord")

    def arcs(self) -> List[chordgeo.Arc]:
        return [(ch.slot_lo, ch.slot_hi) for ch in self.chords]


_SLOT_MARKER = "slot"


@dataclass
class CubicStage:
    graph: Graph
    chords: ChordSystem
    # rotation with consumed-port positions holding ("slot", index) markers
    rotation_template: Dict[int, List[object]]
    literal_vertices: Dict[int, List[int]]  # literal -> port vertices labelled with it
    arm_vertices: Dict[Tuple[int, int], Dict[str, int]]  # (clause, arm) -> {"o","p"}
    a_vertices: List[int]  # hub vertex per clause
    arm_literals: List[Tuple[int, int, int]]
    identifying_edges: List[Edge]


@dataclass
class PlanarStage:
    graph: Graph
    rot: RotationSystem
    literal_vertices: Dict[int, List[int]]
    a_vertices: List[int]
    arm_literals: List[Tuple[int, int, int]]
    identifying_edges: List[Edge]
    crossing_count: int
    uncross_maps: List[Dict[str, int]]  # per inserted gadget: figure name -> id


@dataclass
class AuxStage:
    graph: Graph
    rot: RotationSystem
    # per planar edge (x,y): ids of the six inserted vertices
    aux_records: Dict[Edge, Dict[str, int]]
    original_count: int

    def out_vertices(self) -> Set[int]:
        return {v.id for v in self.graph.vertices if v.role == OUT_VERTEX}


@dataclass
class InstanceStage:
    graph: Graph
    rot: RotationSystem
    k: int
    h_vertex_count: int
    gadget_records: Dict[Edge, Dict[str, object]]  # per former edge: a_u, a_v, interior
    pendant_map: Dict[int, List[int]]  # parent -> leaf ids
    w_map: Dict[int, int]  # out-vertex -> hub pendant


@dataclass
class ReductionTrace:
    formula: Nae3SatFormula
    k: int
    cubic: CubicStage
    planar: Optional[PlanarStage] = None
    aux: Optional[AuxStage] = None
    instance: Optional[InstanceStage] = None


# ---------------------------------------------------------------------------
# Stage 1: formula -> cubic graph with a chord system
# ---------------------------------------------------------------------------


def nae_to_cubic(formula: Nae3SatFormula) -> CubicStage:
    """One clause gadget per clause; same-literal arms linked cyclically.

    Each link consumes the r-port of one occurrence and the q-port of the
    next (cyclically), leaving a cubic graph whose inter-gadget edges are the
    identifying edges.
    """
    if not formula.clauses:
        raise ValidationError("reduction needs at least one clause")
    src = build_clause_gadget()
    src_name = {v.id: v.name for v in src.graph.vertices}
    consumed = set(PORT_SLOT_ORDER)

    builder = GraphBuilder()
    maps: List[Dict[str, int]] = []
    for c in range(len(formula.clauses)):
        m = {}
        for v in src.graph.vertices:
            if v.name in consumed:
                continue
            m[v.name] = builder.add_vertex(GADGET_INTERNAL, f"c{c}.{v.name}")
        maps.append(m)
        for x, y in src.graph.sorted_edges():
            nx, ny = src_name[x], src_name[y]
            if nx in consumed or ny in consumed:
                continue
            builder.add_edge(m[nx], m[ny])

    slots: List[SlotRecord] = []
    for c in range(len(formula.clauses)):
        for port in PORT_SLOT_ORDER:
            attach = maps[c]["o" + port[1]] if port[0] == "q" else maps[c]["p" + port[1]]
            slots.append(SlotRecord(len(slots), c, port, attach))

    occurrences: Dict[int, List[Tuple[int, int]]] = {}
    for c, clause in enumerate(formula.clauses):
        for t in (1, 2, 3):
            occurrences.setdefault(clause[t - 1], []).append((c, t))

    chords: List[ChordRecord] = []
    identifying: List[Edge] = []
    for lit in sorted(occurrences):
        occ = occurrences[lit]
        for j in range(len(occ)):
            c1, t1 = occ[j]
            c2, t2 = occ[(j + 1) % len(occ)]
            s_r = 6 * c1 + _SLOT_INDEX[f"r{t1}"]
            s_q = 6 * c2 + _SLOT_INDEX[f"q{t2}"]
            u, v = maps[c1][f"p{t1}"], maps[c2][f"o{t2}"]
            builder.add_edge(u, v)
            identifying.append(edge_key(u, v))
            chords.append(ChordRecord(min(s_r, s_q), max(s_r, s_q), lit))
    chord_system = ChordSystem(slots, chords)
    chord_system.validate()

    slot_of = {}
    for s in slots:
        slot_of[(s.clause, s.port)] = s.index
    h_rot = {src_name[v]: [src_name[u] for u in ns] for v, ns in src.rot.rotation.items()}
    template: Dict[int, List[object]] = {}
    for c, m in enumerate(maps):
        for name, vid in m.items():
            entries: List[object] = []
            for nbr in h_rot[name]:
                if nbr in consumed:
                    entries.append((_SLOT_MARKER, slot_of[(c, nbr)]))
                else:
                    entries.append(m[nbr])
            template[vid] = entries

    graph = builder.freeze()
    if not check_regular(graph, 3):
        raise AssertionError("the linked clause gadgets must form a cubic graph")

    literal_vertices: Dict[int, List[int]] = {}
    arm_vertices: Dict[Tuple[int, int], Dict[str, int]] = {}
    for c, clause in enumerate(formula.clauses):
        for t in (1, 2, 3):
            arm_vertices[(c, t)] = {"o": maps[c][f"o{t}"], "p": maps[c][f"p{t}"]}
            literal_vertices.setdefault(clause[t - 1], []).extend(
                [maps[c][f"o{t}"], maps[c][f"p{t}"]]
            )
    return CubicStage(
        graph=graph,
        chords=chord_system,
        rotation_template=template,
        literal_vertices={lit: sorted(vs) for lit, vs in literal_vertices.items()},
        arm_vertices=arm_vertices,
        a_vertices=[m["a"] for m in maps],
        arm_literals=[tuple(clause) for clause in formula.clauses],
        identifying_edges=sorted(identifying),
    )


# ---------------------------------------------------------------------------
# Stage 2: crossing removal
# ---------------------------------------------------------------------------

_U_PENDANT_OF_GATE = {"v": "w", "z1": "z2", "b": "a", "z3": "z4"}


def planarize(stage: CubicStage) -> PlanarStage:
    """Replace every chord crossing by an uncrossing gadget.

    Chords become chains of identifying-edge segments through gadget gates;
    the resulting graph is cubic, planar, and certified by the Euler check.
    """
    stage.chords.validate()
    arcs = stage.chords.arcs()
    per_arc, pair_count = chordgeo.arc_crossings(arcs)

    builder = GraphBuilder()
    for v in stage.graph.vertices:
        builder.add_vertex(v.role, v.name)
    rotation: Dict[int, List[object]] = {v: list(ns) for v, ns in stage.rotation_template.items()}

    id_edge_set = set(stage.identifying_edges)
    for e in stage.graph.sorted_edges():
        if e not in id_edge_set:
            builder.add_edge(*e)

    u_src = build_uncrossing()
    u_name = {v.id: v.name for v in u_src.graph.vertices}
    u_pendants = {"a", "w", "z2", "z4"}
    ucopy: Dict[Tuple[int, int], Dict[str, int]] = {}
    uncross_maps: List[Dict[str, int]] = []
    for i, j in chordgeo.crossing_pairs(arcs):
        m = {}
        for v in u_src.graph.vertices:
            if v.name in u_pendants:
                continue
            m[v.name] = builder.add_vertex(v.role, f"u{len(uncross_maps)}.{v.name}")
        for x, y in u_src.graph.sorted_edges():
            nx, ny = u_name[x], u_name[y]
            if nx in u_pendants or ny in u_pendants:
                continue
            builder.add_edge(m[nx], m[ny])
        for uv, ns in u_src.rot.rotation.items():
            name = u_name[uv]
            if name in u_pendants:
                continue
            rotation[m[name]] = [
                (_SLOT_MARKER, (i, j, u_name[nb])) if u_name[nb] in u_pendants else m[u_name[nb]]
                for nb in ns
            ]
        ucopy[(i, j)] = m
        uncross_maps.append(m)

    def fill_marker(vid: int, marker: object, partner: int) -> None:
        entries = rotation[vid]
        entries[entries.index(marker)] = partner

    slot_attach = {s.index: s.attach for s in stage.chords.slots}
    identifying: List[Edge] = []
    for ci, chord in enumerate(stage.chords.chords):
        lo_vertex = slot_attach[chord.slot_lo]
        hi_vertex = slot_attach[chord.slot_hi]
        prev_vertex, prev_marker = lo_vertex, (_SLOT_MARKER, chord.slot_lo)
        for crossing in per_arc.get(ci, []):
            cj = crossing.partner
            pair = (min(ci, cj), max(ci, cj))
            m = ucopy[pair]
            if ci < cj:
                entry_gate, exit_gate = "v", "z1"
            elif not crossing.partner_starts_inside:
                # this chord is the delta of the pair and starts under gamma
                entry_gate, exit_gate = "b", "z3"
            else:
                entry_gate, exit_gate = "z3", "b"
            entry, exit_ = m[entry_gate], m[exit_gate]
            builder.add_edge(prev_vertex, entry)
            identifying.append(edge_key(prev_vertex, entry))
            fill_marker(prev_vertex, prev_marker, entry)
            fill_marker(entry, (_SLOT_MARKER, (pair[0], pair[1], _U_PENDANT_OF_GATE[entry_gate])), prev_vertex)
            prev_vertex = exit_
            prev_marker = (_SLOT_MARKER, (pair[0], pair[1], _U_PENDANT_OF_GATE[exit_gate]))
        builder.add_edge(prev_vertex, hi_vertex)
        identifying.append(edge_key(prev_vertex, hi_vertex))
        fill_marker(prev_vertex, prev_marker, hi_vertex)
        fill_marker(hi_vertex, (_SLOT_MARKER, chord.slot_hi), prev_vertex)

    graph = builder.freeze()
    for vid, entries in rotation.items():
        for entry in entries:
            if isinstance(entry, tuple):
                raise AssertionError(f"unfilled rotation slot at vertex {vid}")
    rot = RotationSystem({v: ns for v, ns in rotation.items()})
    if not check_regular(graph, 3):
        raise AssertionError("planarization must preserve 3-regularity")
    if not verify_planar(graph, rot):
        raise AssertionError("planarized graph failed the Euler check")
    return PlanarStage(
        graph=graph,
        rot=rot,
        literal_vertices=stage.literal_vertices,
        a_vertices=stage.a_vertices,
        arm_literals=stage.arm_literals,
        identifying_edges=sorted(identifying),
        crossing_count=pair_count,
        uncross_maps=uncross_maps,
    )


# ---------------------------------------------------------------------------
# Stage 3: auxiliary graph
# ---------------------------------------------------------------------------


def planar_stage_from_graph(graph: Graph, rot: Optional[RotationSystem] = None) -> PlanarStage:
    """Wrap a bare cubic graph so the later stages can run on it directly."""
    if rot is None:
        rot = RotationSystem({v: list(graph.neighbours(v)) for v in range(graph.n)})
    return PlanarStage(
        graph=graph,
        rot=rot,
        literal_vertices={},
        a_vertices=[],
        arm_literals=[],
        identifying_edges=[],
        crossing_count=0,
        uncross_maps=[],
    )


def build_auxiliary(stage: PlanarStage) -> AuxStage:
    """Replace every edge by the four-cycle gadget with in/out pendants."""
    if not check_regular(stage.graph, 3):
        raise ValidationError("auxiliary construction expects a cubic graph")
    input_planar = verify_planar(stage.graph, stage.rot)
    aux_src = build_aux_edge()
    aux_name = {v.id: v.name for v in aux_src.graph.vertices}

    builder = GraphBuilder()
    for v in stage.graph.vertices:
        builder.add_vertex(ORIGINAL, v.name)
    rotation: Dict[int, List[int]] = {
        v: list(ns) for v, ns in stage.rot.rotation.items()
    }

    roles = {"cu": CYCLE_VERTEX, "cin": CYCLE_VERTEX, "cout": CYCLE_VERTEX, "cv": CYCLE_VERTEX,
             "in": IN_VERTEX, "out": OUT_VERTEX}
    aux_records: Dict[Edge, Dict[str, int]] = {}
    for x, y in stage.graph.sorted_edges():
        m = {"u": x, "v": y}
        for name in ("cu", "cin", "cout", "cv", "in", "out"):
            m[name] = builder.add_vertex(roles[name], f"e{x}-{y}.{name}")
        for a, b in aux_src.graph.sorted_edges():
            na, nb = aux_name[a], aux_name[b]
            if (na, nb) in (("u", "cu"), ("cu", "u")):
                continue  # the two attachment edges are added via the map
            builder.add_edge(m[na], m[nb])
        builder.add_edge(x, m["cu"])
        rotation[x][rotation[x].index(y)] = m["cu"]
        rotation[y][rotation[y].index(x)] = m["cv"]
        for av, ns in aux_src.rot.rotation.items():
            name = aux_name[av]
            if name in ("u", "v"):
                continue
            rotation[m[name]] = [m[aux_name[nb]] for nb in ns]
        aux_records[(x, y)] = m

    graph = builder.freeze()
    rot = RotationSystem(rotation)
    n, mm = stage.graph.n, stage.graph.m
    if graph.n != n + 6 * mm or graph.m != 8 * mm:
        raise AssertionError("auxiliary graph census mismatch")
    if input_planar and not verify_planar(graph, rot):
        raise AssertionError("auxiliary graph failed the Euler check")
    for v in range(n):
        if graph.degree(v) != 3:
            raise AssertionError("original vertices must keep degree three")
    return AuxStage(graph=graph, rot=rot, aux_records=aux_records, original_count=n)


# ---------------------------------------------------------------------------
# Stage 4: the labelling instance
# ---------------------------------------------------------------------------


def build_instance(stage: AuxStage, k: int) -> InstanceStage:
    """Pendants to degree k-1, edge gadgets on every former edge, and a
    degree-(k-1) hub pendant below every out-vertex."""
    if k < 4:
        raise ValidationError(f"instance construction needs k >= 4, got {k}")
    h = stage.graph
    input_planar = verify_planar(h, stage.rot)
    builder = GraphBuilder()
    for v in h.vertices:
        builder.add_vertex(v.role, v.name)
    rotation: Dict[int, List[int]] = {v: list(ns) for v, ns in stage.rot.rotation.items()}

    pendant_map: Dict[int, List[int]] = {}
    for v in range(h.n):
        need = (k - 1) - h.degree(v)
        leaves = []
        for idx in range(need):
            leaf = builder.add_vertex(PENDANT, f"v{v}.leaf{idx}")
            builder.add_edge(v, leaf)
            rotation.setdefault(v, []).append(leaf)
            rotation[leaf] = [v]
            leaves.append(leaf)
        if leaves:
            pendant_map[v] = leaves

    gadget_src = build_edge_gadget(k)
    g_name = {v.id: v.name for v in gadget_src.graph.vertices}
    gadget_records: Dict[Edge, Dict[str, object]] = {}
    for x, y in h.sorted_edges():
        m: Dict[str, int] = {"u": x, "v": y}
        for v in gadget_src.graph.vertices:
            if v.name in ("u", "v"):
                continue
            m[v.name] = builder.add_vertex(GADGET_INTERNAL, f"e{x}-{y}.{v.name}")
        for a, b in gadget_src.graph.sorted_edges():
            na, nb = g_name[a], g_name[b]
            if (na, nb) in (("u", "a_u"), ("a_u", "u")) or (na, nb) in (("a_v", "v"), ("v", "a_v")):
                continue
            builder.add_edge(m[na], m[nb])
        builder.add_edge(x, m["a_u"])
        builder.add_edge(m["a_v"], y)
        rotation[x][rotation[x].index(y)] = m["a_u"]
        rotation[y][rotation[y].index(x)] = m["a_v"]
        for gv, ns in gadget_src.rot.rotation.items():
            name = g_name[gv]
            if name in ("u", "v"):
                continue
            rotation[m[name]] = [
                x if g_name[nb] == "u" else y if g_name[nb] == "v" else m[g_name[nb]]
                for nb in ns
            ]
        interior = {name: vid for name, vid in m.items() if name not in ("u", "v")}
        gadget_records[(x, y)] = {"a_u": m["a_u"], "a_v": m["a_v"], "interior": interior}

    w_map: Dict[int, int] = {}
    for v in sorted(stage.out_vertices()):
        w = pendant_map[v][0]
        w_map[v] = w
        builder.set_role(w, GATE)
        leaves = []
        for idx in range(k - 2):
            leaf = builder.add_vertex(PENDANT, f"w{v}.leaf{idx}")
            builder.add_edge(w, leaf)
            rotation[w].append(leaf)
            rotation[leaf] = [w]
            leaves.append(leaf)
        pendant_map[w] = leaves

    graph = builder.freeze()
    rot = RotationSystem(rotation)
    for v in range(h.n):
        if graph.degree(v) != k - 1:
            raise AssertionError("every former vertex must reach degree k-1")
    for w in w_map.values():
        if graph.degree(w) != k - 1:
            raise AssertionError("hub pendants must reach degree k-1")
    if input_planar and not verify_planar(graph, rot):
        raise AssertionError("instance graph failed the Euler check")
    return InstanceStage(
        graph=graph,
        rot=rot,
        k=k,
        h_vertex_count=h.n,
        gadget_records=gadget_records,
        pendant_map=pendant_map,
        w_map=w_map,
    )


def run_reduction(formula: Nae3SatFormula, k: int, stop_at: str = "instance") -> ReductionTrace:
    stages = ("cubic", "planar", "aux", "instance")
    if stop_at not in stages:
        raise ValidationError(f"unknown stage {stop_at!r}")
    trace = ReductionTrace(formula=formula, k=k, cubic=nae_to_cubic(formula))
    if stages.index(stop_at) >= 1:
        trace.planar = planarize(trace.cubic)
    if stages.index(stop_at) >= 2:
        trace.aux = build_auxiliary(trace.planar)
    if stages.index(stop_at) >= 3:
        trace.instance = build_instance(trace.aux, k)
    return trace


# ---------------------------------------------------------------------------
# Witness translations, forward
# ---------------------------------------------------------------------------


def assignment_to_matching(trace: ReductionTrace, assignment: Assignment) -> TwoColouring:
    """Colour literal ports by truth value, hubs by arm majority, then extend."""
    formula = trace.formula
    for idx, clause in enumerate(formula.clauses):
        values = [literal_value(l, assignment) for l in clause]
        if all(values) or not any(values):
            raise ValidationError(f"assignment does not NAE-satisfy clause {idx}: {clause}")
    planar = trace.planar
    pins: TwoColouring = {}
    for lit, vertices in planar.literal_vertices.items():
        colour = WHITE if literal_value(lit, assignment) else BLACK
        for v in vertices:
            pins[v] = colour
    for c, lits in enumerate(planar.arm_literals):
        arm_colours = [WHITE if literal_value(l, assignment) else BLACK for l in lits]
        majority = WHITE if arm_colours.count(WHITE) == 2 else BLACK
        pins[planar.a_vertices[c]] = majority
    colouring = solve_2cpm(planar.graph, pins)
    if colouring is None:
        raise AssertionError("a NAE-satisfying assignment must extend to a matching")
    if not verify_2cpm(planar.graph, colouring):
        raise AssertionError("extension failed verification")
    for u, v in planar.identifying_edges:
        if colouring[u] != colouring[v]:
            raise AssertionError("identifying edges must come out monochromatic")
    return colouring


def _dichromatic_partners(graph: Graph, colouring: TwoColouring, v: int) -> List[int]:
    return [u for u in graph.neighbours(v) if colouring[u] != colouring[v]]


def matching_to_good_orientation(trace: ReductionTrace, colouring: TwoColouring) -> ColouredOrientation:
    """Directed four-cycles on matched edges; out-to-in paths elsewhere.

    Paths run out-vertex -> bottom cycle vertex -> cycle vertex at the
    through-endpoint -> endpoint -> next gadget's near cycle vertex -> top
    cycle vertex -> in-vertex, and are scheduled so that at most one gadget
    is ever half coloured.
    """
    planar, aux = trace.planar, trace.aux
    if not verify_2cpm(planar.graph, colouring):
        raise ValidationError("input is not a two-coloured perfect matching")
    h = aux.graph
    colours: Dict[int, str] = {}
    orientation: Dict[Edge, str] = {e: UNORIENTED for e in h.sorted_edges()}
    for v in range(planar.graph.n):
        colours[v] = colouring[v]

    def orient(a: int, b: int) -> None:
        orientation[edge_key(a, b)] = FORWARD if a < b else BACKWARD

    dichromatic: List[Edge] = []
    for (x, y), m in sorted(aux.aux_records.items()):
        if colouring[x] == colouring[y]:
            same = colouring[x]
            opposite = WHITE if same == BLACK else BLACK
            colours[m["in"]] = same
            colours[m["out"]] = same
            for name in ("cu", "cin", "cv", "cout"):
                colours[m[name]] = opposite
            orient(m["cu"], m["cin"])
            orient(m["cin"], m["cv"])
            orient(m["cv"], m["cout"])
            orient(m["cout"], m["cu"])
        else:
            dichromatic.append((x, y))

    out_used: Set[Edge] = set()
    in_used: Set[Edge] = set()
    records = aux.aux_records

    def cycle_vertex_at(e: Edge, endpoint: int) -> int:
        m = records[e]
        return m["cu"] if endpoint == m["u"] else m["cv"]

    def other_endpoint(e: Edge, endpoint: int) -> int:
        return e[0] if e[1] == endpoint else e[1]

    def run_path(e: Edge, through: int) -> Optional[Tuple[Edge, int]]:
        m = records[e]
        shade = colouring[through]
        for vtx in (m["out"], m["cout"], cycle_vertex_at(e, through)):
            colours[vtx] = shade
        orient(m["out"], m["cout"])
        orient(m["cout"], cycle_vertex_at(e, through))
        orient(cycle_vertex_at(e, through), through)
        out_used.add(e)
        nxt = [d for d in _dichromatic_edges_at(through) if d != e]
        if len(nxt) != 1:
            raise AssertionError("a matched vertex has exactly two dichromatic edges")
        f = nxt[0]
        fm = records[f]
        for vtx in (cycle_vertex_at(f, through), fm["cin"], fm["in"]):
            colours[vtx] = shade
        orient(through, cycle_vertex_at(f, through))
        orient(cycle_vertex_at(f, through), fm["cin"])
        orient(fm["cin"], fm["in"])
        in_used.add(f)
        if f not in out_used:
            return f, other_endpoint(f, through)
        return None

    def _dichromatic_edges_at(v: int) -> List[Edge]:
        return [edge_key(v, u) for u in _dichromatic_partners(planar.graph, colouring, v)]

    pending: Optional[Tuple[Edge, int]] = None
    remaining = set(dichromatic)
    while remaining or pending:
        if pending is not None:
            e, through = pending
        else:
            e = min(
                (d for d in remaining if d not in out_used),
                key=lambda d: records[d]["out"],
            )
            x, y = e
            through = x if colouring[x] == BLACK else y
        pending = run_path(e, through)
        remaining.discard(e)

    co = ColouredOrientation(colours, orientation)
    if not is_good_orientation(h, co, aux.out_vertices()):
        raise AssertionError("the constructed orientation must be good")
    return co


def canonicalize_orientation(trace: ReductionTrace, co: ColouredOrientation) -> ColouredOrientation:
    """Normalize each uniform four-cycle's pendants; the result is good."""
    aux = trace.aux
    h = aux.graph
    if not verify_coloured_orientation(h, co, aux.out_vertices()):
        raise ValidationError("input is not a coloured orientation")
    colours = dict(co.colouring)
    orientation = dict(co.orientation)
    for (x, y), m in sorted(aux.aux_records.items()):
        cycle_colours = {colours[m[name]] for name in ("cu", "cin", "cout", "cv")}
        if len(cycle_colours) == 1:
            shade = cycle_colours.pop()
            opposite = WHITE if shade == BLACK else BLACK
            for pend, cyc in (("in", "cin"), ("out", "cout")):
                if colours[m[pend]] != opposite:
                    colours[m[pend]] = opposite
                orientation[edge_key(m[pend], m[cyc])] = UNORIENTED
    result = ColouredOrientation(colours, orientation)
    if not is_good_orientation(h, result, aux.out_vertices()):
        raise AssertionError("normalized orientation must be good")
    structure = oriented_component_structure(h, result, aux.out_vertices())
    if any(kind not in ("path", "circuit") for kind, _ in structure):
        raise AssertionError("oriented components must be paths or circuits")
    return result


def oriented_component_structure(
    graph: Graph, co: ColouredOrientation, out_vertices: Set[int]
) -> List[Tuple[str, List[int]]]:
    """Classify each component of the oriented subgraph.

    Returns (kind, sorted vertices) per non-trivial component, where kind is
    "path" (out-vertex to in-vertex), "circuit", or "other".
    """
    pairs = co.oriented_pairs()
    adj: Dict[int, List[int]] = {}
    indeg: Dict[int, int] = {}
    outdeg: Dict[int, int] = {}
    for tail, head in pairs:
        adj.setdefault(tail, []).append(head)
        adj.setdefault(head, []).append(tail)
        outdeg[tail] = outdeg.get(tail, 0) + 1
        indeg[head] = indeg.get(head, 0) + 1
    seen: Set[int] = set()
    out: List[Tuple[str, List[int]]] = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = [start]
        while queue:
            v = queue.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    comp.append(u)
                    queue.append(u)
        comp.sort()
        degrees = [(indeg.get(v, 0), outdeg.get(v, 0)) for v in comp]
        if all(d == (1, 1) for d in degrees):
            out.append(("circuit", comp))
            continue
        sources = [v for v in comp if indeg.get(v, 0) == 0 and outdeg.get(v, 0) == 1]
        sinks = [v for v in comp if indeg.get(v, 0) == 1 and outdeg.get(v, 0) == 0]
        middles = all(
            (indeg.get(v, 0), outdeg.get(v, 0)) == (1, 1)
            for v in comp
            if v not in sources and v not in sinks
        )
        if (
            len(sources) == 1
            and len(sinks) == 1
            and middles
            and sources[0] in out_vertices
            and graph.vertices[sinks[0]].role == IN_VERTEX
        ):
            out.append(("path", comp))
        else:
            out.append(("other", comp))
    return out


_GADGET_CACHE: Dict[int, GadgetInstance] = {}
_FILL_CACHE: Dict[Tuple[int, int, int, int, int], Dict[str, int]] = {}


def _gadget_for(k: int) -> GadgetInstance:
    if k not in _GADGET_CACHE:
        _GADGET_CACHE[k] = build_edge_gadget(k)
    return _GADGET_CACHE[k]


def _gadget_fill(k: int, lu: int, lv: int, lau: int, lav: int) -> Dict[str, int]:
    """Interior labels (by gadget vertex name) for one boundary tuple."""
    key = (k, lu, lv, lau, lav)
    if key not in _FILL_CACHE:
        inst = _gadget_for(k)
        pins = {
            inst.port("u"): lu,
            inst.port("v"): lv,
            inst.port("a_u"): lau,
            inst.port("a_v"): lav,
        }
        result = solve_labelling(inst.graph, k, pins)
        if not result.is_sat:
            raise AssertionError(f"boundary tuple {key} must be fillable")
        name_of = {v.id: v.name for v in inst.graph.vertices}
        _FILL_CACHE[key] = {
            name_of[v]: x
            for v, x in result.labelling.labels.items()
            if name_of[v] not in ("u", "v")
        }
    return _FILL_CACHE[key]


def _boundary_tuple(k: int, lu: int, lv: int, direction: str) -> Tuple[int, int]:
    """Labels (a_u, a_v) dictated by endpoint labels and edge orientation."""
    if lu != lv:  # dichromatic, never oriented
        return (k - 1, 1) if lu == 0 else (1, k - 1)
    if lu == 0:
        return (2, k) if direction == FORWARD else (k, 2)
    return (k - 2, 0) if direction == FORWARD else (0, k - 2)


def orientation_to_labelling(trace: ReductionTrace, co: ColouredOrientation, k: int) -> Labelling:
    """Execute the constructive labelling of the instance from a good
    coloured orientation."""
    aux, inst = trace.aux, trace.instance
    if inst is None or inst.k != k:
        raise ValidationError("trace does not carry an instance for this k")
    if not is_good_orientation(aux.graph, co, aux.out_vertices()):
        raise ValidationError("orientation is not good")
    labels: Dict[int, int] = {}
    for v in range(aux.graph.n):
        labels[v] = 0 if co.colouring[v] == WHITE else k
    for (x, y), record in sorted(inst.gadget_records.items()):
        lau, lav = _boundary_tuple(k, labels[x], labels[y], co.orientation[(x, y)])
        fill = _gadget_fill(k, labels[x], labels[y], lau, lav)
        for name, label in fill.items():
            labels[record["interior"][name]] = label
    for v, w in sorted(inst.w_map.items()):
        labels[w] = k - labels[v]
    for parent in sorted(inst.pendant_map):
        taken = {labels[u] for u in inst.graph.neighbours(parent) if u in labels}
        base = labels[parent]
        available = [
            x
            for x in range(k + 1)
            if abs(x - base) >= 2 and x not in taken
        ]
        leaves = [leaf for leaf in inst.pendant_map[parent] if leaf not in labels]
        if len(available) < len(leaves):
            raise AssertionError(f"not enough labels for the pendants of {parent}")
        for leaf, x in zip(sorted(leaves), available):
            labels[leaf] = x
    labelling = Labelling(k, labels)
    if not verify_labelling(inst.graph, labelling):
        raise AssertionError("constructed labelling failed verification")
    return labelling


# ---------------------------------------------------------------------------
# Witness translations, backward
# ---------------------------------------------------------------------------


def labelling_to_orientation(trace: ReductionTrace, labelling: Labelling) -> ColouredOrientation:
    """Read colours from {0,k} labels and orientations from the a-labels."""
    aux, inst = trace.aux, trace.instance
    k = inst.k
    if not verify_labelling(inst.graph, labelling):
        raise ValidationError("labelling is invalid on the instance")
    colours: Dict[int, str] = {}
    for v in range(aux.graph.n):
        x = labelling.labels[v]
        if x == 0:
            colours[v] = WHITE
        elif x == k:
            colours[v] = BLACK
        else:
            raise InconsistencyError(f"degree-(k-1) vertex {v} carries label {x}")
    orientation: Dict[Edge, str] = {}
    for (x, y), record in inst.gadget_records.items():
        lau = labelling.labels[record["a_u"]]
        lav = labelling.labels[record["a_v"]]
        forward = lav in (0, k)
        backward = lau in (0, k)
        if forward and backward:
            raise InconsistencyError(f"edge ({x},{y}) oriented both ways")
        orientation[(x, y)] = FORWARD if forward else BACKWARD if backward else UNORIENTED
    co = ColouredOrientation(colours, orientation)
    if not verify_coloured_orientation(aux.graph, co, aux.out_vertices()):
        raise AssertionError("derived orientation failed verification")
    return co


def orientation_to_matching(trace: ReductionTrace, co: ColouredOrientation) -> TwoColouring:
    """Restrict the colours to the vertices of the planar cubic graph."""
    aux, planar = trace.aux, trace.planar
    if not is_good_orientation(aux.graph, co, aux.out_vertices()):
        raise ValidationError("orientation is not good")
    colouring = {v: co.colouring[v] for v in range(planar.graph.n)}
    if not verify_2cpm(planar.graph, colouring):
        raise AssertionError("restriction must be a two-coloured perfect matching")
    return colouring


def matching_to_assignment(trace: ReductionTrace, colouring: TwoColouring) -> Assignment:
    """Literals coloured white become true; polarity conflicts are refused."""
    planar = trace.planar
    if not verify_2cpm(planar.graph, colouring):
        raise ValidationError("input is not a two-coloured perfect matching")
    for u, v in planar.identifying_edges:
        if colouring[u] != colouring[v]:
            raise ValidationError(f"identifying edge ({u},{v}) is dichromatic")
    literal_truth: Dict[int, bool] = {}
    for lit, vertices in sorted(planar.literal_vertices.items()):
        shades = {colouring[v] for v in vertices}
        if len(shades) != 1:
            raise InconsistencyError(f"vertices of literal {lit} are not monochromatic")
        literal_truth[lit] = shades.pop() == WHITE
    assignment: Assignment = {}
    for var in range(1, trace.formula.num_vars + 1):
        pos = literal_truth.get(var)
        neg = literal_truth.get(-var)
        if pos is not None and neg is not None and pos == neg:
            raise InconsistencyError(f"variable {var} receives contradictory values")
        if pos is not None:
            assignment[var] = pos
        elif neg is not None:
            assignment[var] = not neg
        else:
            assignment[var] = False
    if not check_nae(trace.formula, assignment):
        raise AssertionError("recovered assignment must NAE-satisfy the formula")
    return assignment


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------


def trace_manifest(trace: ReductionTrace) -> dict:
    doc = {
        "k": trace.k,
        "num_vars": trace.formula.num_vars,
        "clauses": [list(c) for c in trace.formula.clauses],
        "slots": [
            {"index": s.index, "clause": s.clause, "port": s.port, "attach": s.attach}
            for s in trace.cubic.chords.slots
        ],
        "chords": [
            {"slot_lo": c.slot_lo, "slot_hi": c.slot_hi, "literal": c.literal}
            for c in trace.cubic.chords.chords
        ],
        "literal_vertices": {str(l): vs for l, vs in trace.cubic.literal_vertices.items()},
        "identifying_edges_cubic": [list(e) for e in trace.cubic.identifying_edges],
    }
    if trace.planar is not None:
        doc["crossing_count"] = trace.planar.crossing_count
        doc["identifying_edges_planar"] = [list(e) for e in trace.planar.identifying_edges]
        doc["uncrossing_gadgets"] = trace.planar.uncross_maps
    if trace.aux is not None:
        doc["aux_records"] = {f"{x}-{y}": m for (x, y), m in sorted(trace.aux.aux_records.items())}
    if trace.instance is not None:
        doc["gadget_records"] = {
            f"{x}-{y}": {"a_u": r["a_u"], "a_v": r["a_v"], "interior": r["interior"]}
            for (x, y), r in sorted(trace.instance.gadget_records.items())
        }
        doc["pendants"] = {str(p): ls for p, ls in sorted(trace.instance.pendant_map.items())}
        doc["out_hubs"] = {str(v): w for v, w in sorted(trace.instance.w_map.items())}
    return doc


def write_trace(trace: ReductionTrace, outdir) -> List[str]:
    """Write one JSON file per constructed stage plus the manifest."""
    import pathlib

    outdir = pathlib.Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, text: str) -> None:
        (outdir / name).write_text(text)
        written.append(name)

    from .nae3sat import format_formula

    emit("formula.cnf", format_formula(trace.formula))
    emit("cubic.json", to_json(trace.cubic.graph))
    if trace.planar is not None:
        emit("planar.json", to_json(trace.planar.graph, trace.planar.rot))
    if trace.aux is not None:
        emit("aux.json", to_json(trace.aux.graph, trace.aux.rot))
    if trace.instance is not None:
        emit("instance.json", to_json(trace.instance.graph, trace.instance.rot, k=trace.instance.k))
    emit("manifest.json", json.dumps(trace_manifest(trace), sort_keys=True, separators=(",", ":")) + "\n")
    return written
