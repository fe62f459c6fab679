"""Text formats for tensors and polynomials, plus JSON report helpers.

Tensor files:           Polynomial files:
    tensor <m> <n>          poly <m> <n>
    i1 i2 ... im value      coeff a1 a2 ... an

Indices in files are 1-based (any permutation is accepted; a canonical index
given twice is an error); the programmatic API is 0-based.  Values may be
integers, `p/q` rationals, or floats; exact values round-trip exactly.
Lines starting with `#` and blank lines are ignored.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Tuple, Union

import numpy as np

from .tensor import HomogeneousPolynomial, Number, SymmetricTensor, TensorError


class ParseError(ValueError):
    pass


def parse_value(token: str) -> Number:
    try:
        return int(token)
    except ValueError:
        pass
    if "/" in token:
        num, _, den = token.partition("/")
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {token!r}") from exc
    try:
        return float(token)
    except ValueError as exc:
        raise ParseError(f"bad numeric literal {token!r}") from exc


def format_value(v: Number) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) and v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _data_lines(text: str) -> List[List[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(line.split())
    return out


def parse_tensor(text: str) -> SymmetricTensor:
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty tensor file")
    head = lines[0]
    if head[0] != "tensor" or len(head) != 3:
        raise ParseError(f"expected header 'tensor <m> <n>', got {' '.join(head)!r}")
    try:
        order, dim = int(head[1]), int(head[2])
    except ValueError as exc:
        raise ParseError("non-integer order/dimension in header") from exc
    if order < 1 or dim < 1:
        raise ParseError("order and dimension must be positive")
    items: List[Tuple[Tuple[int, ...], Number]] = []
    for tok in lines[1:]:
        if len(tok) != order + 1:
            raise ParseError(
                f"expected {order} indices and a value, got {' '.join(tok)!r}"
            )
        try:
            idx = tuple(int(t) - 1 for t in tok[:order])
        except ValueError as exc:
            raise ParseError(f"non-integer index in {' '.join(tok)!r}") from exc
        if any(not 0 <= i < dim for i in idx):
            raise ParseError(f"index out of range in {' '.join(tok)!r}")
        items.append((idx, parse_value(tok[order])))
    try:
        return SymmetricTensor.from_entries(order, dim, items, accumulate=False)
    except TensorError as exc:
        raise ParseError(str(exc)) from exc


def format_tensor(A: SymmetricTensor, comment: str = "") -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"# {part}")
    lines.append(f"tensor {A.order} {A.dim}")
    for idx in sorted(A.entries):
        v = A.entries[idx]
        ones = " ".join(str(i + 1) for i in idx)
        lines.append(f"{ones} {format_value(v)}")
    return "\n".join(lines) + "\n"


def parse_polynomial(text: str) -> HomogeneousPolynomial:
    lines = _data_lines(text)
    if not lines:
        raise ParseError("empty polynomial file")
    head = lines[0]
    if head[0] != "poly" or len(head) != 3:
        raise ParseError(f"expected header 'poly <m> <n>', got {' '.join(head)!r}")
    try:
        degree, dim = int(head[1]), int(head[2])
    except ValueError as exc:
        raise ParseError("non-integer degree/dimension in header") from exc
    terms = {}
    for tok in lines[1:]:
        if len(tok) != dim + 1:
            raise ParseError(
                f"expected a coefficient and {dim} exponents, got {' '.join(tok)!r}"
            )
        coeff = parse_value(tok[0])
        try:
            alpha = tuple(int(t) for t in tok[1:])
        except ValueError as exc:
            raise ParseError(f"non-integer exponent in {' '.join(tok)!r}") from exc
        if sum(alpha) != degree or any(e < 0 for e in alpha):
            raise ParseError(f"exponents {alpha} are not degree {degree}")
        if alpha in terms:
            raise ParseError(f"duplicate exponent vector {alpha}")
        terms[alpha] = coeff
    return HomogeneousPolynomial(degree, dim, terms)


def format_polynomial(f: HomogeneousPolynomial, comment: str = "") -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"# {part}")
    lines.append(f"poly {f.degree} {f.dim}")
    for alpha in sorted(f.terms, reverse=True):
        exps = " ".join(str(e) for e in alpha)
        lines.append(f"{format_value(f.terms[alpha])} {exps}")
    return "\n".join(lines) + "\n"


def read_tensor(path: str) -> SymmetricTensor:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tensor(fh.read())


def write_tensor(path: str, A: SymmetricTensor, comment: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_tensor(A, comment))


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [float(v) for v in obj]
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, default=_json_default, sort_keys=True)
