"""Shared test machinery: corpus loading, term builders, enumerators for
closed well-typed terms, a random pattern-row generator, and a brute-force
first-order unification oracle kept independent of the matcher it checks."""
from __future__ import annotations

import itertools
import random
from pathlib import Path
from typing import Iterator

from sit.core import (
    BindPat,
    ConCall,
    ConPat,
    DataCall,
    DataDecl,
    FnCall,
    Pattern,
    Signature,
    Substitution,
    Telescope,
    Term,
    Univ,
    Var,
    VarCall,
    subst,
    subst_telescope,
)
from sit.coverage import Available, available_ctors, first_matching_row, instantiate_fields
from sit.evaluator import index_normal_form
from sit.frontend import parse_file, resolve
from sit.pattern_ops import to_term
from sit.typecheck import check_signature

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def load_corpus(name: str) -> Signature:
    path = CORPUS / f"{name}.sit"
    decls = resolve(parse_file(path.read_text(encoding="utf-8"), str(path)))
    return check_signature(decls)


def check_source(text: str, coverage: bool = True) -> Signature:
    """Parse, resolve, and check a program given as a string."""
    return check_signature(resolve(parse_file(text, "<test>")), coverage=coverage)


# Term builders.


def con(name: str, *args: Term) -> Term:
    return ConCall(name, tuple(args))


def dat(name: str, *args: Term) -> Term:
    return DataCall(name, tuple(args))


def fn(name: str, *args: Term) -> Term:
    return FnCall(name, tuple(args))


def ref(v: Var, *args: Term) -> Term:
    return VarCall(v, tuple(args))


def nat_lit(n: int) -> Term:
    t = con("zero")
    for _ in range(n):
        t = con("suc", t)
    return t


# ---------------------------------------------------------------------------
# Enumeration of closed well-typed terms


def enumerate_terms(sig: Signature, ty: Term, depth: int) -> Iterator[Term]:
    """All closed constructor terms of `ty` whose nesting height is <= depth.

    Type-valued positions enumerate the signature's unparameterized data
    types; function types and neutral types have no closed enumeration.
    """
    if depth <= 0:
        return
    ty = index_normal_form(sig, ty)
    match ty:
        case Univ():
            for decl in sig.decls:
                if isinstance(decl, DataDecl) and not decl.telescope:
                    yield DataCall(decl.name, ())
        case DataCall(name, args):
            indices = [index_normal_form(sig, a) for a in args]
            av = available_ctors(sig, name, indices)
            if not isinstance(av, Available):
                return
            decl = sig.data(name)
            for ctor in dict.fromkeys(av.rows):
                status, row, sub, _ = first_matching_row(sig, decl, ctor, indices)
                assert status == "matched"
                fields = instantiate_fields(decl, row, indices, sub)
                for tup in enumerate_tuples(sig, fields, depth - 1):
                    yield ConCall(ctor, tup)
        case _:
            return


def enumerate_tuples(
    sig: Signature, tele: Telescope, depth: int
) -> Iterator[tuple[Term, ...]]:
    """All closed instantiations of a telescope, entry types refined left to
    right by the choices already made."""
    if not tele:
        yield ()
        return
    (x, ty), rest = tele.entries[0], Telescope(tele.entries[1:])
    for t in enumerate_terms(sig, ty, depth):
        refined = subst_telescope(rest, Substitution.of((x, t)))
        for more in enumerate_tuples(sig, refined, depth):
            yield (t,) + more


def index_tuples_with_one_var(
    sig: Signature, tele: Telescope, depth: int
) -> Iterator[tuple[Term, ...]]:
    """Closed telescope instantiations with one subterm replaced by a fresh
    free variable, at the top level or one constructor layer down."""
    for tup in enumerate_tuples(sig, tele, depth):
        for i, t in enumerate(tup):
            hole = VarCall(Var.fresh("k"))
            yield tup[:i] + (hole,) + tup[i + 1 :]
            if isinstance(t, ConCall):
                for j in range(len(t.args)):
                    poked = ConCall(
                        t.name, t.args[:j] + (hole,) + t.args[j + 1 :]
                    )
                    yield tup[:i] + (poked,) + tup[i + 1 :]


# ---------------------------------------------------------------------------
# Random pattern rows


class RowGen:
    """Generates well-typed pattern rows against telescopes of a signature."""

    def __init__(self, sig: Signature, rng: random.Random, con_prob: float = 0.6):
        self.sig = sig
        self.rng = rng
        self.con_prob = con_prob
        self._counter = itertools.count()

    def _fresh_name(self) -> str:
        return f"v{next(self._counter)}"

    def row(self, tele: Telescope, depth: int = 3) -> list[Pattern]:
        acc = Substitution()
        pats: list[Pattern] = []
        for x, ty in tele:
            p = self.pattern(subst(ty, acc), depth)
            pats.append(p)
            acc = Substitution(acc.pairs + ((x, to_term(p)),))
        return pats

    def pattern(self, ty: Term, depth: int) -> Pattern:
        ty = index_normal_form(self.sig, ty)
        if depth > 0 and isinstance(ty, DataCall) and self.rng.random() < self.con_prob:
            indices = [index_normal_form(self.sig, a) for a in ty.args]
            av = available_ctors(self.sig, ty.name, indices)
            if isinstance(av, Available) and av.rows:
                ctor = self.rng.choice(sorted(set(av.rows)))
                decl = self.sig.data(ty.name)
                status, row, sub, _ = first_matching_row(
                    self.sig, decl, ctor, indices
                )
                assert status == "matched"
                fields = instantiate_fields(decl, row, indices, sub)
                acc = Substitution()
                args: list[Pattern] = []
                for w, fty in fields:
                    q = self.pattern(subst(fty, acc), depth - 1)
                    args.append(q)
                    acc = Substitution(acc.pairs + ((w, to_term(q)),))
                return ConPat(ctor, tuple(args))
        return BindPat(Var.fresh(self._fresh_name()))


def corpus_telescopes(sig: Signature) -> list[Telescope]:
    """Every nonempty telescope declared in the signature."""
    return [d.telescope for d in sig.decls if d.telescope]


# ---------------------------------------------------------------------------
# First-order unification oracle (used only by tests)


def oracle_unify(
    scrutinee: list[Term], pattern_terms: list[Term], flexible: set[Var]
) -> tuple:
    """Unify scrutinee terms against pattern terms, solving only for the
    pattern's variables.

    Processed as an equation worklist: a rigid head clash anywhere refutes
    the whole problem even if another equation is undecided; a constructor
    equated with any non-constructor rigid term (a variable of the
    scrutinee, a stuck call, a lambda, ...) is undecided. Returns
    ("unifies", solution), ("clash",), or ("stuck",).
    """
    eqs: list[tuple[Term, Term]] = list(zip(pattern_terms, scrutinee))
    solution: dict[Var, Term] = {}
    undecided = False
    while eqs:
        p, u = eqs.pop(0)
        if isinstance(p, VarCall) and not p.args and p.var in flexible:
            assert p.var not in solution, "patterns are linear"
            solution[p.var] = u
            continue
        if isinstance(p, ConCall):
            if isinstance(u, ConCall):
                if u.name != p.name:
                    return ("clash",)
                assert len(u.args) == len(p.args)
                eqs.extend(zip(p.args, u.args))
            else:
                undecided = True
            continue
        raise AssertionError(f"unexpected pattern-side term {p!r}")
    if undecided:
        return ("stuck",)
    return ("unifies", solution)
