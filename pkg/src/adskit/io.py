"""JSON encoding of exact data and the polynomial mini-grammar."""

from __future__ import annotations

import ast
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._exact import frac
from .decomp import BruhatFactors, SekiguchiFactors
from .grp import GroupElement
from .liealg import AlgebraElement, FormalDelta, WeightLabel
from .weylalg import Poly, Space

SCHEMA = 1


class InputError(ValueError):
    """Malformed or out-of-contract input."""


def encode_scalar(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return float(v)


def decode_scalar(v, exact: bool = True):
    if isinstance(v, bool):
        raise InputError("booleans are not numbers")
    if isinstance(v, str):
        try:
            return frac(v)
        except (ValueError, ZeroDivisionError) as err:
            raise InputError(f"bad rational {v!r}") from err
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if exact:
            raise InputError("floating-point entry in exact input")
        return v
    raise InputError(f"expected a number, got {v!r}")


def encode_group(g: GroupElement) -> dict:
    return {
        "q": g.q,
        "mode": g.mode,
        "entries": [[encode_scalar(v) for v in row] for row in g.entries],
    }


def decode_group(data) -> GroupElement:
    if not isinstance(data, dict):
        raise InputError("group element must be a JSON object")
    try:
        q = data["q"]
        rows = data["entries"]
    except KeyError as err:
        raise InputError(f"missing field {err}") from None
    mode = data.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise InputError(f"unknown mode {mode!r}")
    if not isinstance(q, int) or q < 1:
        raise InputError("q must be a positive integer")
    if not isinstance(rows, list) or len(rows) != q + 2 or any(
        not isinstance(r, list) or len(r) != q + 2 for r in rows
    ):
        raise InputError(f"entries must be a {q + 2}x{q + 2} array")
    exact = mode == "exact"
    vals = [[decode_scalar(v, exact) for v in row] for row in rows]
    if not exact:
        vals = [[float(v) for v in row] for row in vals]
    try:
        return GroupElement(q, vals, mode)
    except ValueError as err:
        raise InputError(str(err)) from None


def encode_algebra(X: AlgebraElement) -> dict:
    return {"q": X.q, "entries": [[encode_scalar(v) for v in row] for row in X.entries]}


def decode_algebra(data) -> AlgebraElement:
    try:
        return AlgebraElement(data["q"], [[decode_scalar(v) for v in row] for row in data["entries"]])
    except (KeyError, TypeError, ValueError) as err:
        raise InputError(f"bad algebra element: {err}") from None


def encode_weight(w: WeightLabel) -> dict:
    delta = (
        {"formal": True, "offset": str(w.delta.offset), "scale": str(w.delta.scale)}
        if isinstance(w.delta, FormalDelta)
        else str(w.delta)
    )
    return {"q": w.q, "lambda": [str(v) for v in w.lam], "delta": delta}


def decode_weight(data) -> WeightLabel:
    try:
        d = data["delta"]
        if isinstance(d, dict):
            delta = FormalDelta(frac(d.get("offset", "0")), frac(d.get("scale", "1")))
        else:
            delta = decode_scalar(d)
        return WeightLabel(data["q"], tuple(decode_scalar(v) for v in data["lambda"]), delta)
    except (KeyError, TypeError) as err:
        raise InputError(f"bad weight: {err}") from None


def encode_factors(f: SekiguchiFactors | BruhatFactors) -> dict:
    p = f.point
    if isinstance(f, SekiguchiFactors):
        residuals = {"h": encode_group(f.h), "sign": f.sign}
    else:
        residuals = {
            "m": encode_group(f.m),
            "ntilde": encode_group(f.ntilde),
            "ntilde_params": [encode_scalar(v) for v in f.ntilde_params],
            "sign": f.sign,
        }
    return {
        "chart": p.chart,
        "in_cell": True,
        "x": [encode_scalar(v) for v in p.x],
        "y": encode_scalar(p.y),
        "residuals": residuals,
    }


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: invalid JSON ({err.msg})") from None


# ---------------------------------------------------------------------------
# polynomial expressions


def parse_poly(text: str, space: Space) -> Poly:
    """Parse ``+ - * ^`` (and ``/`` by constants) over x0.., y, z0.. and rationals."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as err:
        raise InputError(f"cannot parse polynomial {text!r}") from err
    return _eval(tree.body, space)


def _eval(node, space: Space) -> Poly:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise InputError(f"only integer literals are allowed, got {node.value!r}")
        return space.const(node.value)
    if isinstance(node, ast.Name):
        if node.id == "Delta":
            raise InputError("Delta is not a field variable")
        try:
            return space.var(space.index(node.id))
        except KeyError as err:
            raise InputError(str(err)) from None
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _eval(node.operand, space)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, space)
        if isinstance(node.op, ast.Pow):
            exp = _eval(node.right, space)
            k = exp.terms.get(space.zero_exps(), Fraction(0))
            if exp.variables() or k.denominator != 1 or k < 0:
                raise InputError("exponents must be non-negative integers")
            return left ** int(k)
        right = _eval(node.right, space)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.variables() or not right:
                raise InputError("division is only allowed by non-zero constants")
            return left * (1 / right.terms[space.zero_exps()])
    raise InputError(f"unsupported syntax: {ast.dump(node)[:40]}")
