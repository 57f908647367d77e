"""JSON serialization for models and potentials.

Schemas
-------
SFT:       { "symbols": ["name", ...], "transitions": [[0|1, ...], ...] }
           (symbol names are presentation-only; indices are canonical)
Roof:      { "roof": [r_0, ..., r_{n-1}] }
Graph:     { "vertices": n, "edges": [{"from": i, "to": j, "length": q}] }
           with lengths as decimal strings parsed exactly when rational
Potential: { "type": "cylinder", "width": w, "table": {"word": value} }
           or { "type": "distance", "reference": <point>, "scale": s }
Point:     { "left_tail", "core", "right_tail", "origin", "height" }
"""

from __future__ import annotations

import json
from fractions import Fraction

from .sft import BiWord, Sft
from .suspension import Roof, SuspPoint
from .thermo import CylinderPotential, DistancePotential, zero_potential

__all__ = [
    "load_sft",
    "dump_sft",
    "load_roof",
    "load_graph",
    "load_potential",
    "load_point",
    "dump_point",
    "parse_length",
]


def load_sft(obj) -> tuple:
    """(Sft, symbol names) from the schema dict."""
    trans = obj["transitions"]
    sft = Sft(trans)
    names = obj.get("symbols") or [str(i) for i in range(sft.n_symbols)]
    if len(names) != sft.n_symbols:
        raise ValueError("symbols length does not match transitions")
    return sft, list(names)


def dump_sft(sft: Sft, names=None) -> dict:
    return {
        "symbols": list(names) if names
        else [str(i) for i in range(sft.n_symbols)],
        "transitions": [list(map(int, row)) for row in sft.transitions],
    }


def load_roof(obj) -> Roof:
    return Roof([float(v) for v in obj["roof"]])


def parse_length(q) -> Fraction:
    """Edge length from a decimal string (exact) or a number."""
    if isinstance(q, str):
        return Fraction(q)
    if isinstance(q, int):
        return Fraction(q)
    return Fraction(q).limit_denominator(10 ** 9)


def load_graph(obj):
    from .graph import MetricGraph
    edges = [(e["from"], e["to"], parse_length(e["length"]))
             for e in obj["edges"]]
    return MetricGraph(int(obj["vertices"]), edges)


def dump_graph(g) -> dict:
    return {
        "vertices": g.n_vertices,
        "edges": [{"from": a, "to": b, "length": str(l)}
                  for (a, b, l) in g.und_edges],
    }


def load_point(obj) -> SuspPoint:
    base = BiWord.from_json(obj)
    return SuspPoint(base, float(obj.get("height", 0.0)))


def dump_point(p: SuspPoint) -> dict:
    out = p.base.to_json()
    out["height"] = p.height
    return out


def load_potential(obj, graph=None):
    kind = obj.get("type", "cylinder")
    if kind == "cylinder":
        table = {}
        for key, val in obj["table"].items():
            word = tuple(int(c) for c in key.split(",")) \
                if "," in key else tuple(int(c) for c in key)
            table[word] = float(val)
        if not table and int(obj.get("width", 1)) == 1:
            return zero_potential()
        return CylinderPotential(int(obj["width"]), table)
    if kind == "distance":
        if graph is None:
            raise ValueError("distance potential needs a graph model")
        from .graph import Geodesic
        ref = Geodesic(graph, load_point(obj["reference"]))
        return DistancePotential(ref, float(obj["scale"]))
    if kind == "zero":
        return zero_potential()
    raise ValueError(f"unknown potential type {kind!r}")


def dump_potential(phi) -> dict:
    if isinstance(phi, CylinderPotential):
        return {
            "type": "cylinder",
            "width": phi.width,
            "table": {",".join(map(str, w)): v
                      for w, v in phi.table.items()},
        }
    if isinstance(phi, DistancePotential):
        return {
            "type": "distance",
            "reference": dump_point(phi.reference.susp),
            "scale": phi.scale,
        }
    raise TypeError(f"unsupported potential {type(phi).__name__}")


def read_json(path):
    with open(path) as f:
        return json.load(f)
