"""Canonical S-expression syntax for terms.

    (lambda (x y) body)          (forall d:degree body)     (exists (x:entity e:event) body)
    (and a b ...) (or ...) (implies a b) (iff a b) (not a)
    (gt e1 e2) (ge ..) (lt ..) (le ..) (eq ..)
    (+ base 5 delta_heavy (* 2 delta_fast))  (- base 5)  (neg d)   70  -1/2
    (pair at_issue presupposition)   TRUE   (f a b)   ?free_variable

Identifiers bound by an enclosing binder read as variables, all others
as constants. Whitespace is insignificant.
"""
import logging
import re
from fractions import Fraction

from src.logic.terms import (
    ARITH_OPS, CONNECTIVES, QUANTIFIERS, SORTS, TRUE, Abstraction, Application, ArithAtom,
    Connective, Constant, DegreeExpr, Pair, Quantifier, Term, TermError, Variable, spine,
)

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")
_NUMBER_RE = re.compile(r"^-?\d+(?:\.\d+)?(?:/\d+)?$")
_FUNCTION_SYMBOLS = {"Nom", "Acc"}
_DEGREE_HEADS = {"+", "-", "neg"}


class TermSyntaxError(TermError):
    pass


def parse_term(text: str) -> Term:
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise TermSyntaxError("empty term")
    tree, position = _read(tokens, 0)
    if position != len(tokens):
        raise TermSyntaxError(f"trailing input after term: {' '.join(tokens[position:])}")
    return _build(tree, frozenset(), head=False)


def _read(tokens: list[str], position: int):
    token = tokens[position]
    if token == "(":
        items = []
        position += 1
        while True:
            if position >= len(tokens):
                raise TermSyntaxError("unbalanced parentheses")
            if tokens[position] == ")":
                return items, position + 1
            item, position = _read(tokens, position)
            items.append(item)
    if token == ")":
        raise TermSyntaxError("unexpected ')'")
    return token, position + 1


def _constant_kind(name: str, head: bool) -> str:
    if name == "TRUE":
        return "truth"
    if name == "theta" or name.startswith("theta_"):
        return "theta"
    if name == "delta" or name.startswith("delta_"):
        return "delta"
    if name in _FUNCTION_SYMBOLS:
        return "function"
    return "predicate" if head else "entity"


def _build(tree, bound: frozenset[str], head: bool) -> Term:
    if isinstance(tree, str):
        if _NUMBER_RE.match(tree):
            return DegreeExpr(None, Fraction(tree))
        if tree.startswith("?"):
            return Variable(tree[1:])
        if tree in bound:
            return Variable(tree)
        if tree == "TRUE":
            return TRUE
        return Constant(tree, _constant_kind(tree, head))
    if not tree:
        raise TermSyntaxError("empty list")
    first = tree[0]
    if isinstance(first, str):
        if first == "lambda":
            return _build_lambda(tree, bound)
        if first in QUANTIFIERS:
            return _build_quantifier(tree, bound)
        if first in CONNECTIVES:
            args = tuple(_build(t, bound, False) for t in tree[1:])
            if first == "not" and len(args) != 1:
                raise TermSyntaxError("not takes exactly one argument")
            if first in ("implies", "iff") and len(args) != 2:
                raise TermSyntaxError(f"{first} takes exactly two arguments")
            return Connective(first, args)
        if first in ARITH_OPS:
            if len(tree) != 3:
                raise TermSyntaxError(f"{first} takes exactly two arguments")
            return ArithAtom(first, _build(tree[1], bound, False), _build(tree[2], bound, False))
        if first == "pair":
            if len(tree) != 3:
                raise TermSyntaxError("pair takes exactly two arguments")
            return Pair(_build(tree[1], bound, False), _build(tree[2], bound, False))
        if first in _DEGREE_HEADS and first not in bound:
            return _build_degree(tree, bound)
    if len(tree) == 1:
        raise TermSyntaxError(f"application without arguments: {first}")
    result = _build(first, bound, head=True)
    for arg in tree[1:]:
        result = Application(result, _build(arg, bound, False))
    return result


def _build_lambda(tree, bound):
    if len(tree) != 3:
        raise TermSyntaxError("lambda takes a parameter list and a body")
    params = tree[1] if isinstance(tree[1], list) else [tree[1]]
    inner = bound | set(params)
    body = _build(tree[2], inner, False)
    for param in reversed(params):
        body = Abstraction(param, body)
    return body


def _build_quantifier(tree, bound):
    if len(tree) != 3:
        raise TermSyntaxError(f"{tree[0]} takes a binder and a body")
    binders = tree[1] if isinstance(tree[1], list) else [tree[1]]
    parsed = []
    for binder in binders:
        name, _, sort = binder.partition(":")
        sort = sort or "entity"
        if sort not in SORTS:
            raise TermSyntaxError(f"unknown sort {sort!r}")
        parsed.append((name, sort))
    body = _build(tree[2], bound | {name for name, _ in parsed}, False)
    for name, sort in reversed(parsed):
        body = Quantifier(tree[0], name, sort, body)
    return body


def _build_degree(tree, bound):
    head = tree[0]
    if head == "neg":
        if len(tree) != 2:
            raise TermSyntaxError("neg takes exactly one argument")
        return DegreeExpr(_build(tree[1], bound, False), Fraction(0), True)
    if len(tree) < 2:
        raise TermSyntaxError(f"{head} needs a base")
    base = _build(tree[1], bound, False)
    sign = 1 if head == "+" else -1
    offset = Fraction(0)
    margins: list[tuple[Term, Fraction]] = []
    if isinstance(base, DegreeExpr) and base.base is None and not base.margins:
        offset, base = base.offset, None
    for part in tree[2:]:
        if isinstance(part, str) and _NUMBER_RE.match(part):
            offset += sign * Fraction(part)
        elif isinstance(part, list) and part and part[0] == "*":
            if len(part) != 3:
                raise TermSyntaxError("(* coefficient term) expected")
            margins.append((_build(part[2], bound, False), sign * Fraction(part[1])))
        else:
            margins.append((_build(part, bound, False), Fraction(sign)))
    return DegreeExpr(base, offset, False, tuple(margins))


def format_term(term: Term) -> str:
    return _fmt(term, frozenset())


def _fmt_number(value: Fraction) -> str:
    return str(value)


def _fmt(term: Term, bound: frozenset[str]) -> str:
    if isinstance(term, Variable):
        return term.name if term.name in bound else f"?{term.name}"
    if isinstance(term, Constant):
        return term.name
    if isinstance(term, Abstraction):
        params = []
        body: Term = term
        inner = bound
        while isinstance(body, Abstraction):
            params.append(body.param)
            inner = inner | {body.param}
            body = body.body
        header = params[0] if len(params) == 1 else "(" + " ".join(params) + ")"
        return f"(lambda {header} {_fmt(body, inner)})"
    if isinstance(term, Application):
        head, args = spine(term)
        parts = [_fmt(head, bound)] + [_fmt(a, bound) for a in args]
        return "(" + " ".join(parts) + ")"
    if isinstance(term, Connective):
        return "(" + " ".join([term.op] + [_fmt(a, bound) for a in term.args]) + ")"
    if isinstance(term, Quantifier):
        return f"({term.q} {term.var}:{term.sort} {_fmt(term.body, bound | {term.var})})"
    if isinstance(term, ArithAtom):
        return f"({term.op} {_fmt(term.lhs, bound)} {_fmt(term.rhs, bound)})"
    if isinstance(term, Pair):
        return f"(pair {_fmt(term.at_issue, bound)} {_fmt(term.presupposition, bound)})"
    if isinstance(term, DegreeExpr):
        return _fmt_degree(term, bound)
    raise TypeError(f"not a term: {term!r}")


def _fmt_degree(term: DegreeExpr, bound: frozenset[str]) -> str:
    if term.base is None:
        base = "0"
        if not term.margins:
            return _fmt_number(term.offset)
    else:
        base = _fmt(term.base, bound)
        if term.negated_scale:
            base = f"(neg {base})"
    parts = []
    if term.offset:
        parts.append(_fmt_number(term.offset))
    for margin, coef in term.margins:
        text = _fmt(margin, bound)
        parts.append(text if coef == 1 else f"(* {_fmt_number(coef)} {text})")
    if not parts:
        return base
    return "(+ " + " ".join([base] + parts) + ")"
