"""Weighted character network and its DOT / GraphML / JSON serializations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence
from xml.etree import ElementTree as ET

from .coref import CharacterGroup
from .errors import InconsistentInput, UnsupportedFormat
from .interactions import InteractionRecord

FORMATS = ("dot", "graphml", "json")

# render hints scale linearly with weight, relative to the heaviest item
MAX_NODE_WIDTH = 2.0
MAX_EDGE_WIDTH = 5.0


@dataclass(frozen=True)
class Node:
    label: str
    weight: int
    gender: str = "U"


@dataclass
class CharacterNetwork:
    nodes: dict[int, Node] = field(default_factory=dict)
    edges: dict[tuple[int, int], int] = field(default_factory=dict)

    def node_size(self, gid: int) -> float:
        top = max(n.weight for n in self.nodes.values())
        return round(MAX_NODE_WIDTH * self.nodes[gid].weight / top, 4) if top else 0.0

    def edge_width(self, pair: tuple[int, int]) -> float:
        top = max(self.edges.values())
        return round(MAX_EDGE_WIDTH * self.edges[pair] / top, 4)

    def degree(self, gid: int) -> int:
        return sum(gid in pair for pair in self.edges)


def build_network(groups: Sequence[CharacterGroup], records: Sequence[InteractionRecord]) -> CharacterNetwork:
    net = CharacterNetwork()
    for g in sorted(groups, key=lambda g: g.group_id):
        net.nodes[g.group_id] = Node(g.representation, g.occurrence_count, g.gender)
    for r in records:
        if r.group_a not in net.nodes or r.group_b not in net.nodes:
            raise InconsistentInput(f"interaction ({r.group_a}, {r.group_b}) references an unknown group")
        if r.group_a == r.group_b or r.count < 1:
            raise InconsistentInput(f"invalid interaction record {r}")
        pair = (min(r.group_a, r.group_b), max(r.group_a, r.group_b))
        net.edges[pair] = net.edges.get(pair, 0) + r.count
    return net


def _dot_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: CharacterNetwork) -> str:
    lines = ["graph characters {"]
    for gid in sorted(net.nodes):
        n = net.nodes[gid]
        lines.append(
            f"  {gid} [label={_dot_str(n.label)}, weight={n.weight}, "
            f"gender={_dot_str(n.gender)}, width={net.node_size(gid)}];"
        )
    for (a, b) in sorted(net.edges):
        w = net.edges[(a, b)]
        width = net.edge_width((a, b))
        # graphviz draws penwidth; width is kept for renderers that read it
        lines.append(f"  {a} -- {b} [weight={w}, width={width}, penwidth={width}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def to_graphml(net: CharacterNetwork) -> str:
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element(f"{{{GRAPHML_NS}}}graphml")
    keys = [
        ("label", "node", "string"),
        ("weight", "node", "int"),
        ("gender", "node", "string"),
        ("size", "node", "double"),
        ("weight", "edge", "int"),
        ("width", "edge", "double"),
    ]
    for name, domain, typ in keys:
        ET.SubElement(root, f"{{{GRAPHML_NS}}}key", {
            "id": f"{domain[0]}_{name}", "for": domain, "attr.name": name, "attr.type": typ,
        })
    graph = ET.SubElement(root, f"{{{GRAPHML_NS}}}graph", {"id": "characters", "edgedefault": "undirected"})

    def data(parent, key, value):
        ET.SubElement(parent, f"{{{GRAPHML_NS}}}data", {"key": key}).text = str(value)

    for gid in sorted(net.nodes):
        n = net.nodes[gid]
        el = ET.SubElement(graph, f"{{{GRAPHML_NS}}}node", {"id": f"n{gid}"})
        data(el, "n_label", n.label)
        data(el, "n_weight", n.weight)
        data(el, "n_gender", n.gender)
        data(el, "n_size", net.node_size(gid))
    for (a, b) in sorted(net.edges):
        el = ET.SubElement(graph, f"{{{GRAPHML_NS}}}edge", {"source": f"n{a}", "target": f"n{b}"})
        data(el, "e_weight", net.edges[(a, b)])
        data(el, "e_width", net.edge_width((a, b)))
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def to_json_dict(net: CharacterNetwork) -> dict:
    return {
        "nodes": [
            {"id": gid, "label": n.label, "weight": n.weight, "gender": n.gender, "size": net.node_size(gid)}
            for gid, n in sorted(net.nodes.items())
        ],
        "edges": [
            {"source": a, "target": b, "weight": w, "width": net.edge_width((a, b))}
            for (a, b), w in sorted(net.edges.items())
        ],
    }


def export_graph(net: CharacterNetwork, fmt: str) -> str:
    if fmt == "dot":
        return to_dot(net)
    if fmt == "graphml":
        return to_graphml(net)
    if fmt == "json":
        return json.dumps(to_json_dict(net), ensure_ascii=False, indent=2) + "\n"
    raise UnsupportedFormat(f"unknown graph format {fmt!r}; expected one of {', '.join(FORMATS)}")


def parse_json(content: str) -> CharacterNetwork:
    data = json.loads(content)
    net = CharacterNetwork()
    for n in data["nodes"]:
        net.nodes[int(n["id"])] = Node(n["label"], int(n["weight"]), n.get("gender", "U"))
    for e in data["edges"]:
        a, b = int(e["source"]), int(e["target"])
        if a not in net.nodes or b not in net.nodes:
            raise InconsistentInput(f"edge ({a}, {b}) references an unknown node")
        net.edges[(min(a, b), max(a, b))] = int(e["weight"])
    return net
