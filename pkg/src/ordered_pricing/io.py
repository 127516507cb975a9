"""JSON documents for instances, pricings, menus and graphs."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from . import scalar
from .model import UNIT_DEMAND, BuyerType, Lottery, PricingInstance


class FormatError(ValueError):
    """Malformed input document; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _scalar(value, mode, path):
    try:
        return scalar.parse(value, mode)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(path, f"bad scalar {value!r} ({exc})") from None


def instance_from_dict(doc: dict) -> PricingInstance:
    if not isinstance(doc, dict):
        raise FormatError("$", "instance must be a JSON object")
    if "instance" in doc and "types" not in doc:
        doc = doc["instance"]
    mode = doc.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise FormatError("mode", f"unknown mode {mode!r}")
    kind = doc.get("kind", UNIT_DEMAND)
    raw_types = doc.get("types")
    if not isinstance(raw_types, list):
        raise FormatError("types", "expected a list of types")
    types = []
    for k, t in enumerate(raw_types):
        if not isinstance(t, dict) or "values" not in t or "prob" not in t:
            raise FormatError(f"types[{k}]", "expected an object with 'prob' and 'values'")
        values = tuple(_scalar(v, mode, f"types[{k}].values[{i}]") for i, v in enumerate(t["values"]))
        types.append(BuyerType(values, _scalar(t["prob"], mode, f"types[{k}].prob"), t.get("kind", kind)))
    n = doc.get("n", types[0].n if types else 0)
    if not isinstance(n, int):
        raise FormatError("n", "item count must be an integer")
    return PricingInstance(tuple(types), kind, mode, n)


def instance_to_dict(instance: PricingInstance) -> dict:
    return {
        "n": instance.n,
        "kind": instance.kind,
        "mode": instance.mode,
        "types": [
            {"prob": scalar.dump(t.prob), "values": [scalar.dump(v) for v in t.values]}
            for t in instance.types
        ],
    }


def pricing_from_json(doc: Any, mode: str = "exact") -> tuple:
    """Accept a list, ``{"prices": [...]}``, or a comma-separated string."""
    if isinstance(doc, dict):
        if "pricing" in doc:
            doc = doc["pricing"]
        doc = doc.get("prices", doc) if isinstance(doc, dict) else doc
    if isinstance(doc, str):
        doc = [part for part in doc.strip().strip("()[]").split(",") if part.strip()]
    if not isinstance(doc, list):
        raise FormatError("prices", "expected a list of prices")
    return tuple(_scalar(p, mode, f"prices[{i}]") for i, p in enumerate(doc))


def pricing_to_json(pricing) -> list:
    return [scalar.dump(p) for p in pricing]


def menu_from_dict(doc: dict, mode: str = "exact") -> tuple:
    if isinstance(doc, dict) and "menu" in doc and "options" not in doc:
        doc = doc["menu"]
    if not isinstance(doc, dict) or not isinstance(doc.get("options"), list):
        raise FormatError("options", "expected an object with an 'options' list")
    menu = []
    for k, opt in enumerate(doc["options"]):
        if not isinstance(opt, dict) or "alloc" not in opt or "price" not in opt:
            raise FormatError(f"options[{k}]", "expected an object with 'alloc' and 'price'")
        alloc = tuple(_scalar(x, mode, f"options[{k}].alloc[{i}]") for i, x in enumerate(opt["alloc"]))
        menu.append(Lottery(alloc, _scalar(opt["price"], mode, f"options[{k}].price")))
    return tuple(menu)


def menu_to_dict(menu) -> dict:
    return {
        "options": [
            {"alloc": [scalar.dump(x) for x in lot.allocation], "price": scalar.dump(lot.price)}
            for lot in menu
        ]
    }


def parse_graph(text: str):
    """Parse ``"n m"`` followed by ``m`` lines ``"i j"`` (1-based vertices)."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise FormatError("line 1", "expected 'n m'")
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
    except ValueError:
        raise FormatError("line 1", "expected two integers") from None
    if len(lines) - 1 != m:
        raise FormatError("edges", f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    for k, parts in enumerate(lines[1:], start=2):
        if len(parts) != 2:
            raise FormatError(f"line {k}", "expected 'i j'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FormatError(f"line {k}", "expected two integers") from None
    return n, edges


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def as_fraction_list(xs) -> list:
    return [Fraction(x) for x in xs]
