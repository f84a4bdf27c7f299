"""Fixed gadget builders and their exhaustive certifiers.

Every gadget figure is transcribed exactly once into the atlas below: named
vertices with drawing coordinates and an edge list.  Rotations come from the
coordinates (counterclockwise, exact rational comparisons), so each builder
ships its own planarity certificate.  The certifiers machine-check the gadget
lemmas by complete enumeration and report observed vs expected behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .colouring import (
    BLACK,
    WHITE,
    enumerate_almost_2cpm,
    solve_almost_2cpm,
)
from .errors import CapacityError, ValidationError
from .graphs import (
    GADGET_INTERNAL,
    GATE,
    IN_VERTEX,
    OUT_VERTEX,
    PORT,
    CYCLE_VERTEX,
    Graph,
    GraphBuilder,
    PortMap,
    RotationSystem,
    rotation_from_coordinates,
    verify_planar,
)
from .labelling import enumerate_boundary_behaviour, solve_labelling

F = Fraction

HPRIME_CERTIFY_MAX_K = 9
EDGE_GADGET_CERTIFY_MAX_K = 8


@dataclass(frozen=True)
class GadgetInstance:
    graph: Graph
    rot: RotationSystem
    ports: PortMap
    kind: str
    k: Optional[int] = None

    def port(self, name: str) -> int:
        return self.ports[name]


@dataclass(frozen=True)
class CertReport:
    kind: str
    k: Optional[int]
    observed: object
    expected: object
    passed: bool
    enumeration_count: int

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "observed": self.observed,
            "expected": self.expected,
            "pass": self.passed,
            "enumeration_count": self.enumeration_count,
        }


# ---------------------------------------------------------------------------
# Atlas: figure transcriptions.  Coordinates are the drawing positions; the
# rotation system is derived from them.
# ---------------------------------------------------------------------------

_H_COORDS = {
    "a": (F(5), F(7)),
    "b": (F(5), F(6)),
    "c": (F(3), F("5.3")),
    "d": (F(7), F("5.3")),
    "e": (F("2.5"), F("4.5")),
    "f": (F("3.5"), F("4.5")),
    "g": (F("6.5"), F("4.5")),
    "h": (F("7.5"), F("4.5")),
    "i": (F("2.5"), F("2.5")),
    "j": (F("3.5"), F("2.5")),
    "k": (F("6.5"), F("2.5")),
    "l": (F("7.5"), F("2.5")),
    "m": (F("1.5"), F("2.5")),
    "n": (F("8.5"), F("2.5")),
    "o": (F(3), F("1.5")),
    "p": (F(7), F("1.5")),
    "q": (F(3), F("0.5")),
    "r": (F(7), F("0.5")),
}

_H_EDGES = [
    ("a", "b"),
    ("b", "c"),
    ("b", "d"),
    ("c", "e"),
    ("c", "f"),
    ("d", "g"),
    ("d", "h"),
    ("e", "i"),
    ("f", "j"),
    ("g", "k"),
    ("h", "l"),
    ("e", "f"),
    ("g", "h"),
    ("i", "o"),
    ("j", "o"),
    ("o", "q"),
    ("p", "l"),
    ("k", "p"),
    ("p", "r"),
    ("m", "i"),
    ("n", "l"),
    ("j", "k"),
]

_H_PORTS = ["a", "b", "m", "n", "i", "l", "o", "p", "q", "r"]
_H_PENDANTS = {"a", "m", "n", "q", "r"}

_U_COORDS = {
    "z4": (F(4), F("0.5")),
    "z3": (F(4), F("1.5")),
    "u": (F(3), F("2.5")),
    "x": (F(5), F("2.5")),
    "n": (F(3), F("3.5")),
    "q": (F(5), F("3.5")),
    "l": (F("2.5"), F(4)),
    "m": (F("3.5"), F(4)),
    "p": (F("4.5"), F(4)),
    "r": (F("5.5"), F(4)),
    "v": (F("1.5"), F(5)),
    "w": (F("0.5"), F(5)),
    "k": (F(3), F("4.5")),
    "o": (F(5), F("4.5")),
    "f": (F(3), F("5.5")),
    "i": (F(5), F("5.5")),
    "e": (F("2.5"), F(6)),
    "d": (F("3.5"), F(6)),
    "h": (F("4.5"), F(6)),
    "j": (F("5.5"), F(6)),
    "c": (F(3), F("6.5")),
    "g": (F(5), F("6.5")),
    "b": (F(4), F("7.5")),
    "a": (F(4), F("8.5")),
    "s": (F("6.5"), F(6)),
    "t": (F("6.5"), F(4)),
    "z1": (F("7.5"), F(5)),
    "z2": (F("8.5"), F(5)),
}

_U_EDGES = [
    ("z4", "z3"),
    ("z3", "u"),
    ("z3", "x"),
    ("u", "x"),
    ("u", "n"),
    ("q", "x"),
    ("n", "l"),
    ("n", "m"),
    ("p", "q"),
    ("r", "q"),
    ("p", "m"),
    ("v", "l"),
    ("v", "w"),
    ("k", "l"),
    ("k", "m"),
    ("p", "o"),
    ("r", "o"),
    ("f", "k"),
    ("o", "i"),
    ("f", "e"),
    ("f", "d"),
    ("h", "i"),
    ("j", "i"),
    ("h", "d"),
    ("c", "e"),
    ("c", "d"),
    ("h", "g"),
    ("j", "g"),
    ("e", "v"),
    ("c", "b"),
    ("a", "b"),
    ("b", "g"),
    ("s", "t"),
    ("s", "j"),
    ("t", "r"),
    ("z1", "z2"),
    ("s", "z1"),
    ("t", "z1"),
]

_U_PENDANTS = {"a", "w", "z2", "z4"}
_U_GATES = {"b", "v", "z1", "z3"}

_G5_COORDS = {
    "u": (F("0.5"), F("3.5")),
    "a_u": (F("1.5"), F("3.5")),
    "a_v": (F("2.5"), F("3.5")),
    "v": (F("3.5"), F("3.5")),
    "b_u": (F("1.5"), F(3)),
    "b_v": (F("2.5"), F(3)),
    "c": (F(2), F("2.5")),
    "d": (F(2), F(2)),
    "e_3": (F("2.5"), F(2)),
    "e_1": (F("2.5"), F("1.5")),
    "e_2": (F("1.5"), F("1.5")),
    "f": (F(2), F(1)),
    "g_1": (F("1.5"), F("0.5")),
    "g_2": (F("2.5"), F("0.5")),
}

_G5_EDGES = [
    ("u", "a_u"),
    ("a_u", "a_v"),
    ("a_v", "v"),
    ("a_v", "b_v"),
    ("a_u", "b_u"),
    ("b_v", "c"),
    ("b_u", "c"),
    ("c", "d"),
    ("d", "e_3"),
    ("d", "e_1"),
    ("d", "e_2"),
    ("e_2", "f"),
    ("e_1", "f"),
    ("f", "g_1"),
    ("f", "g_2"),
]

_AUX_COORDS = {
    "u": (F("0.5"), F("7.5")),
    "cu": (F("3.5"), F("7.5")),
    "cin": (F("6.5"), F("10.5")),
    "cout": (F("6.5"), F("4.5")),
    "cv": (F("9.5"), F("7.5")),
    "v": (F("12.5"), F("7.5")),
    "in": (F("6.5"), F("13.5")),
    "out": (F("6.5"), F("1.5")),
}

_AUX_EDGES = [
    ("u", "cu"),
    ("cu", "cout"),
    ("cu", "cin"),
    ("cv", "cin"),
    ("cv", "cout"),
    ("cv", "v"),
    ("cin", "in"),
    ("cout", "out"),
]

_AUX_ROLES = {
    "u": PORT,
    "v": PORT,
    "in": IN_VERTEX,
    "out": OUT_VERTEX,
    "cu": CYCLE_VERTEX,
    "cin": CYCLE_VERTEX,
    "cout": CYCLE_VERTEX,
    "cv": CYCLE_VERTEX,
}


def _build_from_figure(coords, edges, roles, port_names, kind, k=None) -> GadgetInstance:
    builder = GraphBuilder()
    ids = {}
    for name in coords:
        ids[name] = builder.add_vertex(roles.get(name, GADGET_INTERNAL), name)
    for x, y in edges:
        builder.add_edge(ids[x], ids[y])
    graph = builder.freeze()
    rot = rotation_from_coordinates(graph, {ids[n]: xy for n, xy in coords.items()})
    ports = PortMap({name: ids[name] for name in port_names})
    instance = GadgetInstance(graph, rot, ports, kind, k)
    if not verify_planar(graph, rot):
        raise AssertionError(f"builder for {kind} produced a non-planar embedding")
    return instance


def build_H() -> GadgetInstance:
    """The 18-vertex base gadget whose almost-matchings carry one bit."""
    roles = {name: (PORT if name in _H_PENDANTS else GADGET_INTERNAL) for name in _H_COORDS}
    return _build_from_figure(_H_COORDS, _H_EDGES, roles, _H_PORTS, "H")


def h_rotation_names() -> Dict[str, List[str]]:
    """Rotation of H in vertex-name space; the clause builder splices it."""
    inst = build_H()
    id_to_name = {v.id: v.name for v in inst.graph.vertices}
    return {
        id_to_name[v]: [id_to_name[u] for u in ns]
        for v, ns in inst.rot.rotation.items()
    }


_COPY_LETTERS = ["b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "o", "p", "q", "r"]


def build_clause_gadget() -> GadgetInstance:
    """Three modified copies of H sharing the hub vertex a.

    The copies lose their m/n pendants; a ring of three edges
    l1-i2, l2-i3, l3-i1 replaces them.
    """
    builder = GraphBuilder()
    ids: Dict[str, int] = {"a": builder.add_vertex(GADGET_INTERNAL, "a")}
    for t in (1, 2, 3):
        for letter in _COPY_LETTERS:
            role = PORT if letter in ("q", "r") else GADGET_INTERNAL
            ids[f"{letter}{t}"] = builder.add_vertex(role, f"{letter}{t}")
    for t in (1, 2, 3):
        for x, y in _H_EDGES:
            if "m" in (x, y) or "n" in (x, y):
                continue
            xc = "a" if x == "a" else f"{x}{t}"
            yc = "a" if y == "a" else f"{y}{t}"
            builder.add_edge(ids[xc], ids[yc])
    ring = {1: 2, 2: 3, 3: 1}
    for t in (1, 2, 3):
        builder.add_edge(ids[f"l{t}"], ids[f"i{ring[t]}"])
    graph = builder.freeze()

    h_rot = h_rotation_names()
    rotation: Dict[int, List[int]] = {ids["a"]: [ids["b1"], ids["b2"], ids["b3"]]}
    back = {2: 1, 3: 2, 1: 3}
    for t in (1, 2, 3):
        for letter in _COPY_LETTERS:
            subst = []
            for nbr in h_rot[letter]:
                if nbr == "a":
                    subst.append("a")
                elif nbr == "m":
                    subst.append(f"l{back[t]}")  # ring edge into this copy's i
                elif nbr == "n":
                    subst.append(f"i{ring[t]}")  # ring edge out of this copy's l
                else:
                    subst.append(f"{nbr}{t}")
            rotation[ids[f"{letter}{t}"]] = [ids[s] for s in subst]
    rot = RotationSystem(rotation)

    port_names = {"a": ids["a"]}
    for t in (1, 2, 3):
        for letter in ("o", "p", "q", "r"):
            port_names[f"{letter}{t}"] = ids[f"{letter}{t}"]
    instance = GadgetInstance(graph, rot, PortMap(port_names), "ClauseK")
    if not verify_planar(graph, rot):
        raise AssertionError("clause gadget embedding is not planar")
    return instance


def build_uncrossing() -> GadgetInstance:
    """The 28-vertex crossing replacement gadget."""
    roles = {}
    for name in _U_COORDS:
        if name in _U_PENDANTS:
            roles[name] = PORT
        elif name in _U_GATES:
            roles[name] = GATE
        else:
            roles[name] = GADGET_INTERNAL
    return _build_from_figure(
        _U_COORDS, _U_EDGES, roles, sorted(_U_PENDANTS | _U_GATES), "UncrossU"
    )


def build_aux_edge() -> GadgetInstance:
    """Four-cycle with in/out pendants; replaces one edge of the cubic graph."""
    return _build_from_figure(_AUX_COORDS, _AUX_EDGES, _AUX_ROLES, ["u", "v", "in", "out"], "AuxEdge")


def build_Hprime(k: int) -> GadgetInstance:
    """Label-forcing side gadget: d and g of degree k-1 joined by k-3 paths."""
    if k < 6:
        raise ValidationError(f"H' needs k >= 6, got {k}")
    builder = GraphBuilder()
    ids = {}
    for name in ["c", "d", "e"] + [f"f{j}" for j in range(1, k - 2)] + ["g", "h", "i"]:
        role = PORT if name in ("c", "d") else GADGET_INTERNAL
        ids[name] = builder.add_vertex(role, name)
    builder.add_edge(ids["c"], ids["d"])
    builder.add_edge(ids["d"], ids["e"])
    builder.add_edge(ids["g"], ids["h"])
    builder.add_edge(ids["g"], ids["i"])
    for j in range(1, k - 2):
        builder.add_edge(ids["d"], ids[f"f{j}"])
        builder.add_edge(ids["g"], ids[f"f{j}"])
    graph = builder.freeze()
    rotation = {
        ids["c"]: [ids["d"]],
        ids["e"]: [ids["d"]],
        ids["h"]: [ids["g"]],
        ids["i"]: [ids["g"]],
        ids["d"]: [ids["e"], ids["c"]] + [ids[f"f{j}"] for j in range(k - 3, 0, -1)],
        ids["g"]: [ids[f"f{j}"] for j in range(1, k - 2)] + [ids["h"], ids["i"]],
    }
    for j in range(1, k - 2):
        rotation[ids[f"f{j}"]] = [ids["d"], ids["g"]]
    rot = RotationSystem(rotation)
    instance = GadgetInstance(graph, rot, PortMap({"c": ids["c"], "d": ids["d"]}), "Hprime", k)
    if not verify_planar(graph, rot):
        raise AssertionError("H' embedding is not planar")
    return instance


def build_edge_gadget(k: int) -> GadgetInstance:
    """The span-k edge gadget G_k with boundary path u, a_u, a_v, v.

    k=4 is the bare path, k=5 the fixed 14-vertex figure, and k >= 6 hangs
    k-5 middle vertices off the path, each carrying two H' copies.
    """
    if k < 4:
        raise ValidationError(f"edge gadget needs k >= 4, got {k}")
    if k == 4:
        builder = GraphBuilder()
        ids = {name: builder.add_vertex(PORT, name) for name in ("u", "a_u", "a_v", "v")}
        builder.add_edge(ids["u"], ids["a_u"])
        builder.add_edge(ids["a_u"], ids["a_v"])
        builder.add_edge(ids["a_v"], ids["v"])
        graph = builder.freeze()
        rot = RotationSystem(
            {
                ids["u"]: [ids["a_u"]],
                ids["a_u"]: [ids["u"], ids["a_v"]],
                ids["a_v"]: [ids["a_u"], ids["v"]],
                ids["v"]: [ids["a_v"]],
            }
        )
        ports = PortMap({name: ids[name] for name in ("u", "v", "a_u", "a_v")})
        return GadgetInstance(graph, rot, ports, "G4", 4)
    if k == 5:
        roles = {name: (PORT if name in ("u", "v", "a_u", "a_v") else GADGET_INTERNAL) for name in _G5_COORDS}
        return _build_from_figure(_G5_COORDS, _G5_EDGES, roles, ["u", "v", "a_u", "a_v"], "G5", 5)

    builder = GraphBuilder()
    ids = {}
    for name in ("u", "a_u", "a_v", "v"):
        ids[name] = builder.add_vertex(PORT, name)
    m = k - 5
    for i in range(1, m + 1):
        ids[f"b{i}"] = builder.add_vertex(GADGET_INTERNAL, f"b{i}")
    hp = build_Hprime(k)
    hp_names = [v.name for v in hp.graph.vertices]
    for i in range(1, m + 1):
        for side in ("l", "r"):
            for name in hp_names:
                ids[f"{name}.{side}{i}"] = builder.add_vertex(GADGET_INTERNAL, f"{name}.{side}{i}")
    builder.add_edge(ids["u"], ids["a_u"])
    builder.add_edge(ids["a_u"], ids["a_v"])
    builder.add_edge(ids["a_v"], ids["v"])
    hp_name_of = {v.id: v.name for v in hp.graph.vertices}
    for i in range(1, m + 1):
        builder.add_edge(ids[f"b{i}"], ids["a_u"])
        builder.add_edge(ids[f"b{i}"], ids["a_v"])
        for side in ("l", "r"):
            builder.add_edge(ids[f"b{i}"], ids[f"c.{side}{i}"])
            for x, y in hp.graph.sorted_edges():
                builder.add_edge(ids[f"{hp_name_of[x]}.{side}{i}"], ids[f"{hp_name_of[y]}.{side}{i}"])
    graph = builder.freeze()

    rotation = {
        ids["u"]: [ids["a_u"]],
        ids["v"]: [ids["a_v"]],
        ids["a_u"]: [ids["a_v"], ids["u"]] + [ids[f"b{i}"] for i in range(m, 0, -1)],
        ids["a_v"]: [ids["v"], ids["a_u"]] + [ids[f"b{i}"] for i in range(1, m + 1)],
    }
    for i in range(1, m + 1):
        rotation[ids[f"b{i}"]] = [ids["a_v"], ids["a_u"], ids[f"c.l{i}"], ids[f"c.r{i}"]]
        for side in ("l", "r"):
            for hv, ns in hp.rot.rotation.items():
                name = hp_name_of[hv]
                local = [ids[f"{hp_name_of[u]}.{side}{i}"] for u in ns]
                if name == "c":
                    local = local + [ids[f"b{i}"]]
                rotation[ids[f"{name}.{side}{i}"]] = local
    rot = RotationSystem(rotation)
    ports = PortMap({name: ids[name] for name in ("u", "v", "a_u", "a_v")})
    instance = GadgetInstance(graph, rot, ports, "Gk", k)
    if not verify_planar(graph, rot):
        raise AssertionError(f"G_{k} embedding is not planar")
    return instance


# ---------------------------------------------------------------------------
# Certifiers
# ---------------------------------------------------------------------------


def _names(instance: GadgetInstance) -> Dict[str, int]:
    return {v.name: v.id for v in instance.graph.vertices}


def certify_H() -> CertReport:
    """Exactly six almost-matchings, each with the three forced properties."""
    inst = build_H()
    ids = _names(inst)
    colourings = enumerate_almost_2cpm(inst.graph)

    def mono(col, x, y):
        return col[ids[x]] == col[ids[y]]

    all_one_special = True
    all_bil_same = True
    all_opqr_opposite = True
    all_oq_pr_mono = True
    encoded = set()
    for col in colourings:
        encoded.add(tuple(col[v] for v in range(inst.graph.n)))
        specials = sum(1 for x, y in (("a", "b"), ("m", "i"), ("l", "n")) if mono(col, x, y))
        all_one_special &= specials == 1
        all_bil_same &= col[ids["b"]] == col[ids["i"]] == col[ids["l"]]
        all_opqr_opposite &= all(col[ids[x]] != col[ids["b"]] for x in ("o", "p", "q", "r"))
        all_oq_pr_mono &= mono(col, "o", "q") and mono(col, "p", "r")
    swapped_closed = all(
        tuple(WHITE if c == BLACK else BLACK for c in enc) in encoded for enc in encoded
    )
    observed = {
        "count": len(colourings),
        "one_special_edge_monochromatic": all_one_special,
        "b_i_l_same_colour": all_bil_same,
        "o_p_q_r_opposite": all_opqr_opposite,
        "oq_pr_monochromatic": all_oq_pr_mono,
        "closed_under_colour_swap": swapped_closed,
    }
    expected = {
        "count": 6,
        "one_special_edge_monochromatic": True,
        "b_i_l_same_colour": True,
        "o_p_q_r_opposite": True,
        "oq_pr_monochromatic": True,
        "closed_under_colour_swap": True,
    }
    return CertReport("H", None, observed, expected, observed == expected, len(colourings))


_CLAUSE_BOUNDARY = ["a"] + [f"{letter}{t}" for t in (1, 2, 3) for letter in ("o", "p", "q", "r")]


def clause_boundary_condition(pattern: Dict[str, str]) -> bool:
    """The two-part extension condition: uniform arms, exactly two matching a."""
    arm_colours = []
    for t in (1, 2, 3):
        arm = {pattern[f"{letter}{t}"] for letter in ("o", "p", "q", "r")}
        if len(arm) != 1:
            return False
        arm_colours.append(arm.pop())
    return sum(1 for c in arm_colours if c == pattern["a"]) == 2


def certify_clause_gadget() -> CertReport:
    """Classify all 2^13 boundary colourings of the clause gadget."""
    inst = build_clause_gadget()
    ids = _names(inst)
    boundary = _CLAUSE_BOUNDARY
    observed_extendable = []
    expected_extendable = []
    for bits in range(1 << len(boundary)):
        pattern = {
            name: WHITE if (bits >> i) & 1 else BLACK for i, name in enumerate(boundary)
        }
        pins = {ids[name]: colour for name, colour in pattern.items()}
        if solve_almost_2cpm(inst.graph, pins) is not None:
            observed_extendable.append(bits)
        if clause_boundary_condition(pattern):
            expected_extendable.append(bits)
    return CertReport(
        "ClauseK",
        None,
        observed_extendable,
        expected_extendable,
        observed_extendable == expected_extendable,
        1 << len(boundary),
    )


_U_BOUNDARY = ["a", "b", "w", "v", "z1", "z2", "z3", "z4"]


def uncross_boundary_condition(pattern: Dict[str, str]) -> bool:
    return (
        pattern["w"] == pattern["v"] == pattern["z1"] == pattern["z2"]
        and pattern["a"] == pattern["b"] == pattern["z3"] == pattern["z4"]
    )


def certify_uncrossing() -> CertReport:
    """Classify all 2^8 boundary colourings of the uncrossing gadget."""
    inst = build_uncrossing()
    ids = _names(inst)
    observed = []
    expected = []
    for bits in range(1 << len(_U_BOUNDARY)):
        pattern = {
            name: WHITE if (bits >> i) & 1 else BLACK for i, name in enumerate(_U_BOUNDARY)
        }
        pins = {ids[name]: colour for name, colour in pattern.items()}
        if solve_almost_2cpm(inst.graph, pins) is not None:
            observed.append(bits)
        if uncross_boundary_condition(pattern):
            expected.append(bits)
    return CertReport("UncrossU", None, observed, expected, observed == expected, 256)


def certify_Hprime(k: int) -> CertReport:
    """Feasible (L(c), L(d)) pairs match the four-element table exactly."""
    if not (6 <= k <= HPRIME_CERTIFY_MAX_K):
        raise CapacityError(f"H' certification supports 6 <= k <= {HPRIME_CERTIFY_MAX_K}")
    inst = build_Hprime(k)
    c, d = inst.port("c"), inst.port("d")
    ids = _names(inst)
    pairs = []
    for xc in range(k + 1):
        for xd in range(k + 1):
            if solve_labelling(inst.graph, k, {c: xc, d: xd}).is_sat:
                pairs.append((xc, xd))
    expected_pairs = sorted({(0, k), (1, k), (k - 1, 0), (k, 0)})

    # witness-side forcings, checked by refuting every alternative
    g_forced = True
    fans_forced = True
    for xc, xd in pairs:
        required_g = k - xd if xd in (0, k) else None
        for xg in range(k + 1):
            if xg == required_g:
                continue
            if solve_labelling(inst.graph, k, {c: xc, d: xd, ids["g"]: xg}).is_sat:
                g_forced = False
        for j in range(1, k - 2):
            for xf in list(range(0, 2)) + list(range(k - 1, k + 1)):
                if solve_labelling(inst.graph, k, {c: xc, d: xd, ids[f"f{j}"]: xf}).is_sat:
                    fans_forced = False
    observed = {"pairs": sorted(pairs), "g_d_span_ends": g_forced, "fans_inside_2_km2": fans_forced}
    expected = {"pairs": expected_pairs, "g_d_span_ends": True, "fans_inside_2_km2": True}
    return CertReport("Hprime", k, observed, expected, observed == expected, (k + 1) ** 2)


def edge_gadget_expected_table(k: int) -> Set[Tuple[int, int, int, int]]:
    """The summary behaviour table of the edge gadget, deduplicated."""
    out = set()
    for au, av in ((2, k), (k, 2), (k - 2, k), (k, k - 2)):
        out.add((0, 0, au, av))
    for au, av in ((2, 0), (0, 2), (k - 2, 0), (0, k - 2)):
        out.add((k, k, au, av))
    out.add((k, 0, 1, k - 1))
    out.add((0, k, k - 1, 1))
    return out


def certify_edge_gadget(k: int) -> CertReport:
    """Boundary behaviour of G_k with ends pinned to {0,k} matches the table."""
    if not (4 <= k <= EDGE_GADGET_CERTIFY_MAX_K):
        raise CapacityError(
            f"edge gadget certification supports 4 <= k <= {EDGE_GADGET_CERTIFY_MAX_K}"
        )
    inst = build_edge_gadget(k)
    observed = enumerate_boundary_behaviour(inst.graph, inst.ports, k, {0, k})
    expected = edge_gadget_expected_table(k)
    return CertReport(
        "Gk",
        k,
        sorted(observed),
        sorted(expected),
        observed == expected,
        4 * (k + 1) ** 2,
    )
