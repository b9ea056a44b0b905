"""Translate model documents into expression-language programs.

Supported kinds: decision_tree (nested ite), rule_list (left-leaning ite
chain), linear_regression (weighted sum), linear_classifier (thresholded
score), decision_forest (thresholded weighted sum of tree expressions).

A model document is JSON with top-level `kind`, `features` and
`payload`; see data/model_doc.schema.json for the exact shape.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

from .errors import EmptyModel, IoError, UnknownFeature
from .lang import expr as E
from .lang.expr import Bin, Bool, Expr, Ite, NAry, Not, Real, Rel, Var
from .lang.program import Program

_REL_NAMES = {"le", "lt", "eq", "ge", "gt"}


def load_model_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read model document: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"bad JSON in model document: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise IoError("model document must be an object with a 'kind' field")
    return doc


def translate(doc: Mapping[str, Any]) -> Program:
    kind = doc.get("kind")
    features = tuple(doc.get("features") or ())
    if not features:
        raise EmptyModel("model document lists no features")
    payload = doc.get("payload") or {}
    if kind == "decision_tree":
        body = _tree(payload.get("tree"), features)
    elif kind == "rule_list":
        body = _rule_list(payload, features)
    elif kind == "linear_regression":
        body = _linear_score(payload, features)
    elif kind == "linear_classifier":
        body = Ite(Rel("ge", _linear_score(payload, features), Real(0.0)),
                   Real(1.0), Real(0.0))
    elif kind == "decision_forest":
        body = _forest(payload, features)
    else:
        raise EmptyModel(f"unknown model kind {kind!r}")
    return Program(features, body)


def _feature(name: str, features: tuple[str, ...]) -> Var:
    if name not in features:
        raise UnknownFeature(f"feature {name!r} not declared")
    return Var(name)


def _guard(node: Mapping[str, Any], features) -> Expr:
    op = node.get("op", "le")
    if op not in _REL_NAMES:
        raise EmptyModel(f"bad relational operator {op!r}")
    return Rel(op, _feature(node["feature"], features),
               Real(float(node["threshold"])))


def _tree(node, features) -> Expr:
    if node is None:
        raise EmptyModel("decision tree payload has no root")
    if "value" in node:
        return Real(float(node["value"]))
    return Ite(_guard(node, features),
               _tree(node.get("left"), features),
               _tree(node.get("right"), features))


def _rule_list(payload, features) -> Expr:
    rules = payload.get("rules") or []
    if "default" not in payload:
        raise EmptyModel("rule list needs a default value")
    body: Expr = Real(float(payload["default"]))
    for rule in reversed(rules):
        conds = rule.get("conditions") or [rule]
        guards = [_guard(c, features) for c in conds]
        guard = guards[0] if len(guards) == 1 else NAry("and", tuple(guards))
        body = Ite(guard, Real(float(rule["value"])), body)
    return body


def _linear_score(payload, features) -> Expr:
    weights = payload.get("weights")
    if weights is None:
        raise EmptyModel("linear model needs weights")
    if isinstance(weights, list):
        if len(weights) != len(features):
            raise EmptyModel("weight list length must match features")
        weights = dict(zip(features, weights))
    terms: list[Expr] = []
    for name, w in weights.items():
        if name not in features:
            raise UnknownFeature(f"feature {name!r} not declared")
        w = float(w)
        if w == 0.0:
            continue
        terms.append(NAry("mul", (Real(w), Var(name))))
    bias = float(payload.get("bias", 0.0))
    if not terms:
        return Real(bias)
    if bias != 0.0:
        terms.append(Real(bias))
    return terms[0] if len(terms) == 1 else NAry("add", tuple(terms))


def _forest(payload, features) -> Expr:
    trees = payload.get("trees") or []
    if not trees:
        raise EmptyModel("forest has no trees")
    weights = payload.get("weights")
    if weights is not None and len(weights) != len(trees):
        raise EmptyModel("forest weight list length must match trees")
    bodies = [_tree(t, features) for t in trees]
    if weights is None:
        threshold = float(payload.get("threshold",
                                      math.ceil(len(trees) / 2)))
        terms = bodies
    else:
        threshold = float(payload.get("threshold", 0.0))
        terms = [NAry("mul", (Real(float(w)), b))
                 for w, b in zip(weights, bodies)]
    score = terms[0] if len(terms) == 1 else NAry("add", tuple(terms))
    return Ite(Rel("ge", score, Real(threshold)), Real(1.0), Real(0.0))


# ---------------------------------------------------------------------------
# Program <-> tree-structured document

def expr_to_json(e: Expr) -> dict:
    if isinstance(e, Real):
        return {"node": "real", "value": e.value}
    if isinstance(e, Bool):
        return {"node": "bool", "value": e.value}
    if isinstance(e, Var):
        return {"node": "var", "name": e.name}
    if isinstance(e, NAry):
        return {"node": e.op, "children": [expr_to_json(a) for a in e.args]}
    if isinstance(e, Bin):
        return {"node": e.op, "children": [expr_to_json(e.left),
                                           expr_to_json(e.right)]}
    if isinstance(e, Not):
        return {"node": "not", "children": [expr_to_json(e.inner)]}
    if isinstance(e, Rel):
        return {"node": e.op, "children": [expr_to_json(e.left),
                                           expr_to_json(e.right)]}
    if isinstance(e, Ite):
        return {"node": "ite", "children": [expr_to_json(c)
                                            for c in e.children()]}
    raise TypeError(f"unknown node {e!r}")  # pragma: no cover


def json_to_expr(d: Mapping[str, Any]) -> Expr:
    node = d.get("node")
    kids = [json_to_expr(c) for c in d.get("children", [])]
    if node == "real":
        return Real(float(d["value"]))
    if node == "bool":
        return Bool(bool(d["value"]))
    if node == "var":
        return Var(d["name"])
    if node in E.ASSOC_OPS:
        return NAry(node, tuple(kids))
    if node in E.BIN_OPS:
        return Bin(node, kids[0], kids[1])
    if node == "not":
        return Not(kids[0])
    if node in E.REL_OPS:
        return Rel(node, kids[0], kids[1])
    if node == "ite":
        return Ite(kids[0], kids[1], kids[2])
    raise IoError(f"unknown expression node kind {node!r}")


def program_to_json(p: Program) -> dict:
    return {"kind": "program", "params": list(p.params),
            "var_types": dict(p.var_types), "body": expr_to_json(p.body)}


def json_to_program(d: Mapping[str, Any]) -> Program:
    return Program(tuple(d["params"]), json_to_expr(d["body"]),
                   dict(d.get("var_types", {})))
