"""Core term language: spine-normal terms, telescopes, patterns, declarations,
signatures, and capture-avoiding substitution.

Every head symbol (function, data type, constructor) is fully applied to its
declared arity; partial application only exists for variables, whose spines
may grow. Binders are globally unique `Var`s carrying a surface name for
printing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .diagnostics import InternalError, SourceSpan

_uid = itertools.count(1)


@dataclass(frozen=True)
class Var:
    """A binder identity: surface text plus a globally unique id."""

    text: str
    uid: int

    @staticmethod
    def fresh(text: str = "x") -> Var:
        return Var(text, next(_uid))

    def __repr__(self) -> str:
        return f"{self.text}#{self.uid}"


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class FnCall:
    """A function applied to exactly its telescope."""

    name: str
    args: tuple[Term, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class VarCall:
    """A variable applied to a (possibly empty) spine of arguments."""

    var: Var
    args: tuple[Term, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DataCall:
    """An inductive type applied to exactly its telescope."""

    name: str
    args: tuple[Term, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ConCall:
    """A constructor applied to exactly its field telescope."""

    name: str
    args: tuple[Term, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pi:
    binder: Var
    domain: Term
    codomain: Term
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lam:
    binder: Var
    body: Term
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Univ:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


Term = Union[FnCall, VarCall, DataCall, ConCall, Pi, Lam, Univ]

UNIV = Univ()


# ---------------------------------------------------------------------------
# Telescopes


@dataclass(frozen=True)
class Telescope:
    """An ordered list of typed bindings; later types may mention earlier vars."""

    entries: tuple[tuple[Var, Term], ...] = ()

    @staticmethod
    def of(*entries: tuple[Var, Term]) -> Telescope:
        return Telescope(tuple(entries))

    def extended(self, var: Var, ty: Term) -> Telescope:
        return Telescope(self.entries + ((var, ty),))

    def __iter__(self) -> Iterator[tuple[Var, Term]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


EMPTY_TELESCOPE = Telescope()


# ---------------------------------------------------------------------------
# Patterns


@dataclass(frozen=True)
class BindPat:
    """A catch-all pattern; its type is filled in by pattern checking."""

    var: Var
    ty: Optional[Term] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ConPat:
    name: str
    args: tuple[Pattern, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ImpossiblePat:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


Pattern = Union[BindPat, ConPat, ImpossiblePat]


def pattern_has_impossible(p: Pattern) -> bool:
    match p:
        case ImpossiblePat():
            return True
        case ConPat(_, args):
            return any(pattern_has_impossible(q) for q in args)
        case _:
            return False


# ---------------------------------------------------------------------------
# Declarations and signatures


@dataclass(frozen=True)
class CtorRow:
    """One constructor of a data declaration.

    `patterns` is None for a plain constructor; a pattern row selects the
    constructor only at instantiations its patterns match.
    """

    name: str
    fields: Telescope
    patterns: Optional[tuple[Pattern, ...]] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Clause:
    """One function clause; the body is absent iff a pattern is impossible."""

    patterns: tuple[Pattern, ...]
    body: Optional[Term]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DataDecl:
    name: str
    telescope: Telescope
    ctors: tuple[CtorRow, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FuncDecl:
    name: str
    telescope: Telescope
    result: Term
    clauses: tuple[Clause, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


Declaration = Union[DataDecl, FuncDecl]


@dataclass
class Signature:
    """An ordered list of declarations with name lookup tables.

    Treat instances as immutable: `extended` returns a new signature. Data,
    function, and constructor names share one global namespace, except that a
    data declaration may repeat a constructor name across several of its own
    rows (each row is an alternative selection of the same constructor).
    """

    decls: tuple[Declaration, ...] = ()

    def __post_init__(self) -> None:
        self._datas: dict[str, DataDecl] = {}
        self._funcs: dict[str, FuncDecl] = {}
        self._ctor_owner: dict[str, DataDecl] = {}
        for decl in self.decls:
            if isinstance(decl, DataDecl):
                self._datas[decl.name] = decl
                for row in decl.ctors:
                    self._ctor_owner[row.name] = decl
            else:
                self._funcs[decl.name] = decl

    def extended(self, decl: Declaration) -> Signature:
        return Signature(self.decls + (decl,))

    def data(self, name: str) -> Optional[DataDecl]:
        return self._datas.get(name)

    def func(self, name: str) -> Optional[FuncDecl]:
        return self._funcs.get(name)

    def ctor_owner(self, name: str) -> Optional[DataDecl]:
        """The data declaration that introduces constructor `name`."""
        return self._ctor_owner.get(name)

    def ctor_rows(self, name: str) -> tuple[CtorRow, ...]:
        owner = self._ctor_owner.get(name)
        if owner is None:
            return ()
        return tuple(row for row in owner.ctors if row.name == name)

    def declares(self, name: str) -> bool:
        return name in self._datas or name in self._funcs or name in self._ctor_owner


# ---------------------------------------------------------------------------
# Substitution


@dataclass(frozen=True)
class Substitution:
    """A list of single replacements, applied left to right."""

    pairs: tuple[tuple[Var, Term], ...] = ()

    @staticmethod
    def of(*pairs: tuple[Var, Term]) -> Substitution:
        return Substitution(tuple(pairs))

    def domain(self) -> tuple[Var, ...]:
        return tuple(x for x, _ in self.pairs)

    def __bool__(self) -> bool:
        return bool(self.pairs)


EMPTY_SUBST = Substitution()


def free_vars(t: Term) -> set[Var]:
    match t:
        case VarCall(x, args):
            out = {x}
            for a in args:
                out |= free_vars(a)
            return out
        case FnCall(_, args) | DataCall(_, args) | ConCall(_, args):
            out = set()
            for a in args:
                out |= free_vars(a)
            return out
        case Pi(x, dom, cod):
            return free_vars(dom) | (free_vars(cod) - {x})
        case Lam(x, body):
            return free_vars(body) - {x}
        case Univ():
            return set()
    raise InternalError(f"unexpected term {t!r}")


def apply_spine(t: Term, args: tuple[Term, ...]) -> Term:
    """Apply a term to extra arguments, staying inside the spine-normal grammar.

    Variables grow their spine and lambdas beta-reduce; any other head cannot
    take arguments, which elaboration is responsible for ruling out.
    """
    if not args:
        return t
    match t:
        case VarCall(x, spine):
            return VarCall(x, spine + args)
        case Lam(x, body):
            return apply_spine(_subst_one(body, x, args[0]), args[1:])
        case _:
            raise InternalError(f"cannot apply {t!r} to arguments")


def _subst_one(t: Term, x: Var, v: Term) -> Term:
    match t:
        case VarCall(y, args):
            new_args = tuple(_subst_one(a, x, v) for a in args)
            if y == x:
                return apply_spine(v, new_args)
            return VarCall(y, new_args)
        case FnCall(name, args):
            return FnCall(name, tuple(_subst_one(a, x, v) for a in args))
        case DataCall(name, args):
            return DataCall(name, tuple(_subst_one(a, x, v) for a in args))
        case ConCall(name, args):
            return ConCall(name, tuple(_subst_one(a, x, v) for a in args))
        case Pi(y, dom, cod):
            new_dom = _subst_one(dom, x, v)
            if y == x or x not in free_vars(cod):
                return Pi(y, new_dom, cod)
            if y in free_vars(v):
                # The replacement would be captured: rename the binder first.
                fresh = Var.fresh(y.text)
                cod = _subst_one(cod, y, VarCall(fresh))
                return Pi(fresh, new_dom, _subst_one(cod, x, v))
            return Pi(y, new_dom, _subst_one(cod, x, v))
        case Lam(y, body):
            if y == x or x not in free_vars(body):
                return t
            if y in free_vars(v):
                fresh = Var.fresh(y.text)
                body = _subst_one(body, y, VarCall(fresh))
                return Lam(fresh, _subst_one(body, x, v))
            return Lam(y, _subst_one(body, x, v))
        case Univ():
            return t
    raise InternalError(f"unexpected term {t!r}")


def subst(t: Term, s: Substitution) -> Term:
    """Apply each replacement in order, avoiding capture by renaming binders."""
    for x, v in s.pairs:
        t = _subst_one(t, x, v)
    return t


def subst_telescope(tele: Telescope, s: Substitution) -> Telescope:
    return Telescope(tuple((x, subst(ty, s)) for x, ty in tele))


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """The substitution acting as s1 followed by s2.

    Replacements apply sequentially, so composition is concatenation:
    subst(u, compose(s1, s2)) == subst(subst(u, s1), s2) for every u.
    """
    return Substitution(s1.pairs + s2.pairs)


def disjoint_union(c1, c2):
    """Concatenate two telescopes or substitutions whose domains are disjoint.

    Overlap means pattern linearity was violated upstream, which is a bug,
    not a user error.
    """
    if isinstance(c1, Telescope) and isinstance(c2, Telescope):
        seen = {x for x, _ in c1}
        for x, _ in c2:
            if x in seen:
                raise InternalError(f"binding {x!r} occurs on both sides")
        return Telescope(c1.entries + c2.entries)
    if isinstance(c1, Substitution) and isinstance(c2, Substitution):
        seen = set(c1.domain())
        for x in c2.domain():
            if x in seen:
                raise InternalError(f"variable {x!r} occurs on both sides")
        return Substitution(c1.pairs + c2.pairs)
    raise InternalError(f"cannot join {type(c1).__name__} with {type(c2).__name__}")


# ---------------------------------------------------------------------------
# Alpha equality and printing


def alpha_eq(u: Term, v: Term) -> bool:
    """Structural equality up to renaming of bound variables (no eta)."""
    return _alpha(u, v, {})


def _alpha(u: Term, v: Term, env: dict[Var, Var]) -> bool:
    match u, v:
        case VarCall(x, us), VarCall(y, vs):
            return env.get(x, x) == y and _alpha_list(us, vs, env)
        case FnCall(f, us), FnCall(g, vs):
            return f == g and _alpha_list(us, vs, env)
        case DataCall(f, us), DataCall(g, vs):
            return f == g and _alpha_list(us, vs, env)
        case ConCall(f, us), ConCall(g, vs):
            return f == g and _alpha_list(us, vs, env)
        case Pi(x, a, b), Pi(y, c, d):
            return _alpha(a, c, env) and _alpha(b, d, {**env, x: y})
        case Lam(x, a), Lam(y, b):
            return _alpha(a, b, {**env, x: y})
        case Univ(), Univ():
            return True
        case _:
            return False


def _alpha_list(us, vs, env) -> bool:
    return len(us) == len(vs) and all(_alpha(u, v, env) for u, v in zip(us, vs))


def pretty(t: Term) -> str:
    """Render a term for diagnostics and output; binders print by surface text."""
    match t:
        case VarCall(x, args):
            return _pretty_app(x.text, args)
        case FnCall(name, args) | DataCall(name, args) | ConCall(name, args):
            return _pretty_app(name, args)
        case Pi(x, dom, cod):
            if x in free_vars(cod):
                return f"({x.text} : {pretty(dom)}) → {pretty(cod)}"
            return f"{_pretty_arrow_operand(dom)} → {pretty(cod)}"
        case Lam(x, body):
            return f"fn {x.text} => {pretty(body)}"
        case Univ():
            return "Type"
    raise InternalError(f"unexpected term {t!r}")


def _pretty_app(head: str, args) -> str:
    if not args:
        return head
    return " ".join([head] + [_pretty_atom(a) for a in args])


def _pretty_atom(t: Term) -> str:
    s = pretty(t)
    match t:
        case Univ() | VarCall(_, ()) | FnCall(_, ()) | DataCall(_, ()) | ConCall(_, ()):
            return s
        case _:
            return f"({s})"


def _pretty_arrow_operand(t: Term) -> str:
    s = pretty(t)
    if isinstance(t, (Pi, Lam)):
        return f"({s})"
    return s


def pretty_pattern(p: Pattern) -> str:
    match p:
        case BindPat(x, _):
            return x.text
        case ImpossiblePat():
            return "impossible"
        case ConPat(name, args):
            if not args:
                return name
            parts = [name]
            for q in args:
                s = pretty_pattern(q)
                parts.append(f"({s})" if isinstance(q, ConPat) and q.args else s)
            return " ".join(parts)
    raise InternalError(f"unexpected pattern {p!r}")
