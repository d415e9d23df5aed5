"""Instance and solution files: exact-rational JSON with stable digests.

Numbers that may be non-integers travel as strings like "3/2" (integers
may omit the denominator); floats never appear in machine output.  Files
are serialized canonically (sorted keys, compact separators, trailing
newline) so identical inputs produce byte-identical files, and an
instance's digest is the sha256 of that canonical form.

Schemas:

* tour instance: {"kind": "mvtsp", "n": int, "costs": [[p/q, ...], ...],
  "requests": [int, ...]} with a full symmetric matrix including the
  diagonal of self-loop costs;
* bounded-degree instance: {"kind": "bdgpe", "ground": [names, ...],
  "p": {mask: value}, "b": {mask: value}, "costs": [p/q, ...],
  "hyperedges": [{"members": [...], "m": [...], "f": int|null,
  "g": int|null}, ...], "regime": "both"|"lower"|"upper"} where masks are
  decimal subset encodings under the declared element order and border
  values are decimal integers or "-inf"/"inf";
* solution: {"kind": "tour", "instance_digest": hex,
  "edges": {"u-v": int, ...}} with self-loops as "v-v".
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from . import gpoly, mvtsp, rounding

REGIME_NAMES = {"both": "both", "lower": "lower_only", "upper": "upper_only"}
REGIME_FLAGS = {v: k for k, v in REGIME_NAMES.items()}


class FormatError(Exception):
    pass


def format_rational(value) -> str:
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"not a rational: {text!r}") from exc


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def digest_of(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()


def mvtsp_to_obj(inst: mvtsp.MvtspInstance) -> dict:
    return {
        "kind": "mvtsp",
        "n": inst.n,
        "costs": [[format_rational(inst.cost(u, v)) for v in range(inst.n)]
                  for u in range(inst.n)],
        "requests": list(inst.requests),
    }


def obj_to_mvtsp(obj) -> mvtsp.MvtspInstance:
    if obj.get("kind") != "mvtsp":
        raise FormatError("not a tour instance file")
    try:
        costs = [[parse_rational(c) for c in row] for row in obj["costs"]]
        return mvtsp.MvtspInstance(n=int(obj["n"]), costs=costs,
                                   requests=tuple(int(r) for r in obj["requests"]))
    except (KeyError, TypeError, mvtsp.MvtspError) as exc:
        raise FormatError(f"malformed tour instance: {exc}") from exc


def _border_value(v, side):
    if v is None:
        return "-inf" if side == "p" else "inf"
    return str(int(v))


def _parse_border_value(text, side):
    if text in ("inf", "+inf"):
        if side == "p":
            raise FormatError("p cannot be +inf")
        return None
    if text == "-inf":
        if side == "b":
            raise FormatError("b cannot be -inf")
        return None
    try:
        return int(text)
    except ValueError as exc:
        raise FormatError(f"bad border value {text!r}") from exc


def bdgpe_to_obj(inst: rounding.BdgpeInstance) -> dict:
    pair = inst.pair
    k = pair.size
    return {
        "kind": "bdgpe",
        "ground": list(pair.ground.elements),
        "p": {str(m): _border_value(pair.p_of(m), "p") for m in range(1 << k)},
        "b": {str(m): _border_value(pair.b_of(m), "b") for m in range(1 << k)},
        "costs": [format_rational(c) for c in inst.costs],
        "hyperedges": [
            {"members": list(e.members), "m": list(e.multiplicity),
             "f": e.lower, "g": e.upper}
            for e in inst.constraints.edges
        ],
        "regime": REGIME_FLAGS[inst.regime],
    }


def obj_to_bdgpe(obj) -> rounding.BdgpeInstance:
    if obj.get("kind") != "bdgpe":
        raise FormatError("not a bounded-degree instance file")
    try:
        ground = gpoly.GroundSet(tuple(obj["ground"]))
        n = 1 << ground.size
        p = [None] * n
        b = [None] * n
        for m_str, v in obj["p"].items():
            p[int(m_str)] = _parse_border_value(v, "p")
        for m_str, v in obj["b"].items():
            b[int(m_str)] = _parse_border_value(v, "b")
        pair = gpoly.make_explicit(ground, p, b)
        edges = tuple(
            rounding.Hyperedge(
                members=tuple(e["members"]),
                multiplicity=tuple(int(m) for m in e["m"]),
                lower=None if e.get("f") is None else int(e["f"]),
                upper=None if e.get("g") is None else int(e["g"]))
            for e in obj["hyperedges"])
        regime = REGIME_NAMES.get(obj["regime"])
        if regime is None:
            raise FormatError(f"unknown regime {obj['regime']!r}")
        costs = tuple(parse_rational(c) for c in obj["costs"])
        return rounding.BdgpeInstance(
            pair=pair, costs=costs,
            constraints=rounding.HypergraphConstraints(edges), regime=regime)
    except (KeyError, TypeError, IndexError, gpoly.GpolyError,
            rounding.RoundingError) as exc:
        raise FormatError(f"malformed bounded-degree instance: {exc}") from exc


def tour_to_obj(instance_digest: str, z: dict) -> dict:
    return {
        "kind": "tour",
        "instance_digest": instance_digest,
        "edges": {f"{u}-{v}": int(m) for (u, v), m in sorted(z.items()) if m},
    }


def obj_to_tour(obj):
    if obj.get("kind") != "tour":
        raise FormatError("not a tour solution file")
    try:
        z = {}
        for key, m in obj["edges"].items():
            u_s, v_s = key.split("-")
            e = mvtsp.edge_key(int(u_s), int(v_s))
            z[e] = z.get(e, 0) + int(m)
        return str(obj["instance_digest"]), z
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed tour solution: {exc}") from exc


def load_obj(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def save_obj(path, obj) -> None:
    data = canonical_dumps(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data)


def load_instance(path):
    """Either instance kind, dispatched on the file's kind field."""
    obj = load_obj(path)
    kind = obj.get("kind")
    if kind == "mvtsp":
        return obj_to_mvtsp(obj), obj
    if kind == "bdgpe":
        return obj_to_bdgpe(obj), obj
    raise FormatError(f"unknown instance kind {kind!r}")
