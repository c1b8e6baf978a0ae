import logging
from fractions import Fraction

from src.core.config import DEFAULT_STEP_BUDGET
from src.logic.terms import (
    EQUALITY, TRUE, Abstraction, Application, ArithAtom, Connective, Constant, DegreeExpr,
    NonTerminating, Pair, Quantifier, Term, Variable, children, conj, free_vars, spine, substitute,
)

logger = logging.getLogger(__name__)

LEFTMOST_OUTERMOST = "leftmost-outermost"
RIGHTMOST_INNERMOST = "rightmost-innermost"

_SORT_STEMS = {"degree": "d", "entity": "x", "event": "e"}
_INDEXED_CONSTANTS = {"theta", "delta"}


def beta_normalize(
    term: Term,
    budget: int = DEFAULT_STEP_BUDGET,
    strategy: str = LEFTMOST_OUTERMOST,
) -> Term:
    """Reduces `term` to normal form and renames every binder apart.

    Besides beta, the reduction relation lifts presupposition pairs,
    flattens conjunctions, folds degree arithmetic, indexes theta/delta
    by lemma and applies the one-point rule for existentials.
    """
    if strategy not in (LEFTMOST_OUTERMOST, RIGHTMOST_INNERMOST):
        raise ValueError(f"unknown reduction strategy {strategy!r}")
    current = term
    steps = 0
    while True:
        reduced = _step(current, strategy == LEFTMOST_OUTERMOST)
        if reduced is None:
            break
        steps += 1
        if steps > budget:
            logger.warning("Normalization budget of %d steps exhausted", budget)
            raise NonTerminating(budget)
        current = reduced
    return rename_bound(current)


def _step(term: Term, outermost: bool) -> Term | None:
    if outermost:
        contracted = _contract(term)
        if contracted is not None:
            return contracted
    kids = list(children(term))
    order = range(len(kids)) if outermost else range(len(kids) - 1, -1, -1)
    for index in order:
        reduced = _step(kids[index], outermost)
        if reduced is not None:
            kids[index] = reduced
            return rebuild(term, kids)
    if not outermost:
        return _contract(term)
    return None


def rebuild(term: Term, kids: list[Term]) -> Term:
    if isinstance(term, Abstraction):
        return Abstraction(term.param, kids[0])
    if isinstance(term, Application):
        return Application(kids[0], kids[1])
    if isinstance(term, Connective):
        return Connective(term.op, tuple(kids))
    if isinstance(term, Quantifier):
        return Quantifier(term.q, term.var, term.sort, kids[0])
    if isinstance(term, ArithAtom):
        return ArithAtom(term.op, kids[0], kids[1])
    if isinstance(term, Pair):
        return Pair(kids[0], kids[1])
    if isinstance(term, DegreeExpr):
        if term.base is not None:
            base, rest = kids[0], kids[1:]
        else:
            base, rest = None, kids
        margins = tuple((m, c) for m, (_, c) in zip(rest, term.margins))
        return DegreeExpr(base, term.offset, term.negated_scale, margins)
    raise TypeError(f"cannot rebuild {term!r}")


def _contract(term: Term) -> Term | None:
    if isinstance(term, Application):
        return _contract_application(term)
    if isinstance(term, Abstraction):
        body = term.body
        if isinstance(body, Pair) and term.param not in free_vars(body.presupposition):
            return Pair(Abstraction(term.param, body.at_issue), body.presupposition)
        return None
    if isinstance(term, Quantifier):
        return _contract_quantifier(term)
    if isinstance(term, Connective):
        return _contract_connective(term)
    if isinstance(term, Pair):
        if isinstance(term.at_issue, Pair):
            inner = term.at_issue
            return Pair(inner.at_issue, conj(inner.presupposition, term.presupposition))
        if isinstance(term.presupposition, Pair):
            inner = term.presupposition
            return Pair(term.at_issue, conj(inner.at_issue, inner.presupposition))
        return None
    if isinstance(term, ArithAtom):
        if term.op == "lt":
            return ArithAtom("gt", term.rhs, term.lhs)
        if term.op == "le":
            return ArithAtom("ge", term.rhs, term.lhs)
        return None
    if isinstance(term, DegreeExpr):
        return _contract_degree(term)
    return None


def _contract_application(term: Application) -> Term | None:
    fun, arg = term.fun, term.arg
    if isinstance(fun, Abstraction):
        return substitute(fun.body, fun.param, arg)
    if isinstance(fun, Pair):
        return Pair(Application(fun.at_issue, arg), fun.presupposition)
    if isinstance(arg, Pair):
        return Pair(Application(fun, arg.at_issue), arg.presupposition)
    if isinstance(fun, Constant) and fun.name in _INDEXED_CONSTANTS and isinstance(arg, Constant):
        return Constant(f"{fun.name}_{arg.name}", fun.kind)
    return None


def _contract_quantifier(term: Quantifier) -> Term | None:
    body = term.body
    if isinstance(body, Pair) and term.var not in free_vars(body.presupposition):
        return Pair(Quantifier(term.q, term.var, term.sort, body.at_issue), body.presupposition)
    if term.q != "exists":
        return None
    conjuncts = list(body.args) if isinstance(body, Connective) and body.op == "and" else [body]
    for index, candidate in enumerate(conjuncts):
        value = _one_point_value(candidate, term.var)
        if value is not None:
            rest = conjuncts[:index] + conjuncts[index + 1:]
            return substitute(conj(*rest), term.var, value)
    return None


def _one_point_value(candidate: Term, var: str) -> Term | None:
    head, args = spine(candidate)
    if not (isinstance(head, Constant) and head.name == EQUALITY and len(args) == 2):
        return None
    lhs, rhs = args
    if lhs == Variable(var) and var not in free_vars(rhs):
        return rhs
    if rhs == Variable(var) and var not in free_vars(lhs):
        return lhs
    return None


def _contract_connective(term: Connective) -> Term | None:
    if any(isinstance(a, Pair) for a in term.args):
        at_issue = tuple(a.at_issue if isinstance(a, Pair) else a for a in term.args)
        presuppositions = [a.presupposition for a in term.args if isinstance(a, Pair)]
        return Pair(Connective(term.op, at_issue), conj(*presuppositions))
    if term.op not in ("and", "or"):
        return None
    flat: list[Term] = []
    changed = False
    for arg in term.args:
        if isinstance(arg, Connective) and arg.op == term.op:
            flat.extend(arg.args)
            changed = True
        elif term.op == "and" and arg == TRUE:
            changed = True
        else:
            flat.append(arg)
    if len(flat) <= 1:
        return flat[0] if flat else TRUE
    return Connective(term.op, tuple(flat)) if changed else None


def _contract_degree(term: DegreeExpr) -> Term | None:
    base = term.base
    if isinstance(base, DegreeExpr):
        sign = -1 if term.negated_scale else 1
        margins = tuple((m, sign * c) for m, c in base.margins) + term.margins
        return DegreeExpr(
            base.base,
            sign * base.offset + term.offset,
            base.negated_scale != term.negated_scale,
            margins,
        )
    if base is None and term.negated_scale:
        return DegreeExpr(None, term.offset, False, term.margins)
    margins = _canonical_margins(term.margins)
    offset = term.offset
    if margins is not None:
        folded, margins = margins
        offset += folded
        if margins != term.margins or folded:
            return DegreeExpr(base, offset, term.negated_scale, margins)
    if base is not None and not offset and not term.negated_scale and not term.margins:
        return base
    return None


def _canonical_margins(
    margins: tuple[tuple[Term, Fraction], ...],
) -> tuple[Fraction, tuple[tuple[Term, Fraction], ...]] | None:
    if not margins:
        return None
    folded = Fraction(0)
    totals: dict[Term, Fraction] = {}
    for margin, coef in margins:
        if isinstance(margin, DegreeExpr) and margin.base is None and not margin.margins:
            folded += coef * margin.offset
            continue
        totals[margin] = totals.get(margin, Fraction(0)) + coef
    ordered = tuple(sorted(((m, c) for m, c in totals.items() if c), key=lambda mc: str(mc[0])))
    return folded, ordered


def rename_bound(term: Term) -> Term:
    """Gives every binder a distinct name (d1, x1, e1, ...), avoiding free variables."""
    used = set(free_vars(term))
    counters: dict[str, int] = {}

    def fresh(stem: str) -> str:
        n = counters.get(stem, 0)
        while True:
            n += 1
            name = f"{stem}{n}"
            if name not in used:
                break
        counters[stem] = n
        used.add(name)
        return name

    def walk(t: Term, env: dict[str, str]) -> Term:
        if isinstance(t, Variable):
            return Variable(env.get(t.name, t.name))
        if isinstance(t, Abstraction):
            new = fresh(t.param.rstrip("0123456789") or "v")
            return Abstraction(new, walk(t.body, {**env, t.param: new}))
        if isinstance(t, Quantifier):
            new = fresh(_SORT_STEMS.get(t.sort, "v"))
            return Quantifier(t.q, new, t.sort, walk(t.body, {**env, t.var: new}))
        kids = list(children(t))
        if not kids:
            return t
        return rebuild(t, [walk(k, env) for k in kids])

    return walk(term, {})
