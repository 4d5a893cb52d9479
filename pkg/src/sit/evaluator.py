"""Weak-head and full normalization plus definitional equality.

Function calls unfold by first-match clause dispatch: clauses are tried top
to bottom, the first positive match fires, and a stuck match freezes the
call as a neutral term. There is no termination checker; a step budget turns
runaway evaluation into an error instead of a hang.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ConCall,
    DataCall,
    FnCall,
    Lam,
    Pi,
    Signature,
    Term,
    Univ,
    Var,
    VarCall,
    subst,
)
from .diagnostics import FuelError, InternalError
from .pattern_ops import BindPat, Matched, Mismatch, Stuck, match_terms

DEFAULT_FUEL = 1_000_000


@dataclass
class Fuel:
    """A mutable budget of reduction steps shared across one evaluation."""

    limit: int = DEFAULT_FUEL
    used: int = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise FuelError(self.limit)


def whnf(sig: Signature, t: Term, fuel: Fuel | None = None) -> Term:
    """Reduce until the head is a value or a neutral.

    Function calls whose dispatch is stuck, or which no clause matches, are
    returned as neutral heads.
    """
    fuel = fuel if fuel is not None else Fuel()
    while isinstance(t, FnCall):
        func = sig.func(t.name)
        if func is None:
            raise InternalError(f"call to undeclared function {t.name}")
        args = _dispatch_args(sig, func, t.args, fuel)
        reduct = None
        for clause in func.clauses:
            out = match_terms(args, clause.patterns)
            match out:
                case Matched(s):
                    if clause.body is None:
                        raise InternalError(
                            f"matched a bodiless clause of {func.name}"
                        )
                    fuel.spend()
                    reduct = subst(clause.body, s)
                    break
                case Stuck():
                    return FnCall(t.name, args)
                case Mismatch():
                    continue
        if reduct is None:
            return FnCall(t.name, args)
        t = reduct
    return t


def _dispatch_args(sig, func, args, fuel) -> tuple[Term, ...]:
    # Normalize only the columns some clause actually inspects; pure catch-all
    # columns are substituted into bodies untouched.
    inspected = [
        any(
            i < len(cl.patterns) and not isinstance(cl.patterns[i], BindPat)
            for cl in func.clauses
        )
        for i in range(len(args))
    ]
    return tuple(
        index_normal_form(sig, a, fuel) if hot else a
        for a, hot in zip(args, inspected)
    )


def index_normal_form(sig: Signature, t: Term, fuel: Fuel | None = None) -> Term:
    """Weak-head normalize, recursing into constructor arguments only.

    This is exactly the shape the matcher inspects, so matching after this
    never sticks on an unreduced redex.
    """
    fuel = fuel if fuel is not None else Fuel()
    t = whnf(sig, t, fuel)
    if isinstance(t, ConCall):
        return ConCall(t.name, tuple(index_normal_form(sig, a, fuel) for a in t.args))
    return t


def normalize(sig: Signature, t: Term, fuel: Fuel | None = None) -> Term:
    """Fully normalize; idempotent."""
    fuel = fuel if fuel is not None else Fuel()
    t = whnf(sig, t, fuel)
    match t:
        case FnCall(name, args):
            return FnCall(name, tuple(normalize(sig, a, fuel) for a in args))
        case VarCall(x, args):
            return VarCall(x, tuple(normalize(sig, a, fuel) for a in args))
        case DataCall(name, args):
            return DataCall(name, tuple(normalize(sig, a, fuel) for a in args))
        case ConCall(name, args):
            return ConCall(name, tuple(normalize(sig, a, fuel) for a in args))
        case Pi(x, dom, cod):
            return Pi(x, normalize(sig, dom, fuel), normalize(sig, cod, fuel))
        case Lam(x, body):
            return Lam(x, normalize(sig, body, fuel))
        case Univ():
            return t
    raise InternalError(f"unexpected term {t!r}")


def convertible(sig: Signature, u: Term, v: Term, fuel: Fuel | None = None) -> bool:
    """Definitional equality: normal forms alpha-equal, with eta for lambdas."""
    fuel = fuel if fuel is not None else Fuel()
    return _conv(normalize(sig, u, fuel), normalize(sig, v, fuel), {})


def _conv(u: Term, v: Term, env: dict[Var, Var]) -> bool:
    match u, v:
        case Lam(x, a), Lam(y, b):
            return _conv(a, b, {**env, x: y})
        case Lam(x, a), VarCall(_, _):
            # fn x => f x is equal to f: compare the body with f applied to x.
            return _conv(a, VarCall(v.var, v.args + (VarCall(x),)), {**env, x: x})
        case VarCall(_, _), Lam(y, b):
            return _conv(VarCall(u.var, u.args + (VarCall(y),)), b, {**env, y: y})
        case VarCall(x, us), VarCall(y, vs):
            return env.get(x, x) == y and _conv_list(us, vs, env)
        case FnCall(f, us), FnCall(g, vs):
            return f == g and _conv_list(us, vs, env)
        case DataCall(f, us), DataCall(g, vs):
            return f == g and _conv_list(us, vs, env)
        case ConCall(f, us), ConCall(g, vs):
            return f == g and _conv_list(us, vs, env)
        case Pi(x, a, b), Pi(y, c, d):
            return _conv(a, c, env) and _conv(b, d, {**env, x: y})
        case Univ(), Univ():
            return True
        case _:
            return False


def _conv_list(us, vs, env) -> bool:
    return len(us) == len(vs) and all(_conv(u, v, env) for u, v in zip(us, vs))
