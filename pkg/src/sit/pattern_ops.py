"""The three pattern operations: binding collection, pattern-to-term
conversion, and the three-outcome matcher.

Matching is purely syntactic over weak-head-normal constructor spines; the
matcher never reduces. Callers normalize the terms they hand in.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .core import (
    BindPat,
    ConCall,
    ConPat,
    ImpossiblePat,
    Pattern,
    Substitution,
    Telescope,
    Term,
    Var,
    VarCall,
    disjoint_union,
)
from .diagnostics import InternalError


@dataclass(frozen=True)
class Matched:
    """Positive success; the substitution binds exactly the catch-all vars."""

    sub: Substitution


@dataclass(frozen=True)
class Mismatch:
    """Negative success: distinct constructor heads, no match possible."""


@dataclass(frozen=True)
class Stuck:
    """Cannot decide: position of the term whose head blocks matching."""

    position: int


MatchOutcome = Union[Matched, Mismatch, Stuck]

# Optional observer for every list-matching call; the CLI wires --trace-match here.
trace_hook: Optional[Callable[[Sequence[Term], Sequence[Pattern], MatchOutcome], None]] = None


def vars_tele(tele: Telescope) -> list[Var]:
    """The binders of a telescope, in order."""
    return [x for x, _ in tele]


def vars_pats(pats: Sequence[Pattern]) -> Telescope:
    """All catch-all bindings in the patterns, left to right, depth first.

    Requires checked patterns: every binding carries the type stored by
    pattern checking. Impossible patterns contribute nothing.
    """
    out: list[tuple[Var, Term]] = []
    for p in pats:
        _vars_pat(p, out)
    return Telescope(tuple(out))


def _vars_pat(p: Pattern, out: list[tuple[Var, Term]]) -> None:
    match p:
        case BindPat(x, ty):
            if ty is None:
                raise InternalError(f"binding {x!r} has no type; pattern not checked")
            out.append((x, ty))
        case ConPat(_, args):
            for q in args:
                _vars_pat(q, out)
        case ImpossiblePat():
            pass


def to_term(p: Pattern) -> Term:
    """The term that matches exactly this pattern.

    Undefined on impossible sub-patterns, which match no term at all.
    """
    match p:
        case BindPat(x, _):
            return VarCall(x)
        case ConPat(name, args):
            return ConCall(name, tuple(to_term(q) for q in args))
        case ImpossiblePat():
            raise ValueError("impossible patterns have no matching term")
    raise InternalError(f"unexpected pattern {p!r}")


def to_terms(pats: Sequence[Pattern]) -> list[Term]:
    return [to_term(p) for p in pats]


def match_terms(terms: Sequence[Term], pats: Sequence[Pattern]) -> MatchOutcome:
    """Match a list of terms against a list of patterns.

    Per position: a binding matches anything; equal constructor heads recurse;
    distinct constructor heads are a Mismatch; a constructor pattern against
    any non-constructor head (neutral variable or function call, lambda, Pi,
    Type, a data type) is Stuck. A Mismatch anywhere decides the whole list
    negatively even if another position is Stuck; otherwise any Stuck position
    makes the list Stuck; otherwise the per-position substitutions are joined.
    """
    if len(terms) != len(pats):
        raise InternalError(
            f"matching {len(terms)} terms against {len(pats)} patterns"
        )
    outcome = _match_list(terms, pats)
    if trace_hook is not None:
        trace_hook(terms, pats, outcome)
    return outcome


def _match_list(terms: Sequence[Term], pats: Sequence[Pattern]) -> MatchOutcome:
    stuck_at: Optional[int] = None
    sub = Substitution()
    for i, (u, p) in enumerate(zip(terms, pats)):
        out = _match_one(u, p)
        match out:
            case Mismatch():
                return Mismatch()
            case Stuck():
                if stuck_at is None:
                    stuck_at = i
            case Matched(s):
                sub = disjoint_union(sub, s)
    if stuck_at is not None:
        return Stuck(stuck_at)
    return Matched(sub)


def _match_one(u: Term, p: Pattern) -> MatchOutcome:
    match p:
        case BindPat(x, _):
            return Matched(Substitution.of((x, u)))
        case ImpossiblePat():
            return Mismatch()
        case ConPat(name, qs):
            match u:
                case ConCall(name2, us):
                    if name2 != name:
                        return Mismatch()
                    if len(us) != len(qs):
                        raise InternalError(
                            f"constructor {name} matched with wrong arity"
                        )
                    return _match_list(us, qs)
                case _:
                    return Stuck(0)
    raise InternalError(f"unexpected pattern {p!r}")
