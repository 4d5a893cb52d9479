"""Constructor availability and exhaustiveness checking.

Coverage builds a case-splitting tree over a function's telescope. A column
is split when some clause constrains it with a constructor or impossible
pattern; the split enumerates the constructors available at the column's
type, decided by matching its (normalized) index terms against each
constructor row. Every leaf must be claimed by a clause, except leaves whose
tuple type is uninhabited.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    BindPat,
    ConCall,
    ConPat,
    CtorRow,
    DataCall,
    DataDecl,
    FuncDecl,
    ImpossiblePat,
    Signature,
    Substitution,
    Telescope,
    Term,
    Var,
    VarCall,
    pretty,
    subst,
    subst_telescope,
)
from .diagnostics import (
    CANNOT_SPLIT,
    MISSING_CASE,
    UNREACHABLE_CLAUSE,
    CoverageError,
    InternalError,
    Warning,
)
from .evaluator import Fuel, index_normal_form, whnf
from .pattern_ops import Matched, Mismatch, Stuck, match_terms, vars_tele


@dataclass(frozen=True)
class Available:
    """Constructor rows selectable at an instantiation, in declaration order.

    A name repeats when several rows for the same constructor match.
    """

    rows: tuple[str, ...]


@dataclass(frozen=True)
class Undecidable:
    """Some row's match is stuck, so availability cannot be decided."""

    ctor: str
    position: int


Availability = Union[Available, Undecidable]


def available_ctors(sig: Signature, data_name: str, args: list[Term]) -> Availability:
    """Which constructors of a data type are available at these arguments."""
    decl = sig.data(data_name)
    if decl is None:
        raise InternalError(f"unknown data type {data_name}")
    fuel = Fuel()
    args = [index_normal_form(sig, a, fuel) for a in args]
    names: list[str] = []
    for row in decl.ctors:
        if row.patterns is None:
            names.append(row.name)
            continue
        match match_terms(args, row.patterns):
            case Matched(_):
                names.append(row.name)
            case Stuck(pos):
                return Undecidable(row.name, pos)
            case Mismatch():
                pass
    return Available(tuple(names))


def first_matching_row(
    sig: Signature, decl: DataDecl, ctor: str, args: list[Term]
) -> tuple[str, Optional[CtorRow], Optional[Substitution], int]:
    """Resolve which row of `ctor` applies at these (normalized) arguments.

    Returns ("matched", row, sub, _), ("mismatch", None, None, _) when no row
    applies, or ("stuck", None, None, position) when a row cannot be decided
    before any row matches.
    """
    for row in decl.ctors:
        if row.name != ctor:
            continue
        if row.patterns is None:
            return "matched", row, None, -1
        match match_terms(args, row.patterns):
            case Matched(s):
                return "matched", row, s, -1
            case Stuck(pos):
                return "stuck", None, None, pos
            case Mismatch():
                continue
    return "mismatch", None, None, -1


def instantiate_fields(
    decl: DataDecl, row: CtorRow, args: list[Term], sub: Optional[Substitution]
) -> Telescope:
    """The field telescope of a row at a concrete instantiation of the data.

    Pattern rows substitute the match result first; either way the data
    telescope's variables are then replaced by the arguments.
    """
    fields = row.fields
    if sub is not None:
        fields = subst_telescope(fields, sub)
    data_sub = Substitution(tuple(zip(vars_tele(decl.telescope), args)))
    return subst_telescope(fields, data_sub)


# ---------------------------------------------------------------------------
# Exhaustiveness


@dataclass
class _Column:
    var: Var
    ty: Term


def check_coverage(sig: Signature, func: FuncDecl) -> list[Warning]:
    """Certify that the clauses cover every constructor form of the telescope.

    Raises CoverageError with a concrete uncovered pattern stack, or when a
    needed split has undecidable availability. Returns warnings for clauses
    no leaf selects.
    """
    columns = [_Column(x, ty) for x, ty in func.telescope]
    rows = [(i, list(cl.patterns)) for i, cl in enumerate(func.clauses)]
    shapes: list[Term] = [VarCall(x) for x, _ in func.telescope]
    hole_vars = {x for x, _ in func.telescope}
    used: set[int] = set()
    _cover(sig, func, columns, rows, shapes, hole_vars, used)
    warnings = []
    for i, cl in enumerate(func.clauses):
        if i not in used:
            warnings.append(
                Warning(
                    UNREACHABLE_CLAUSE,
                    f"clause {i + 1} of {func.name} is selected by no case",
                    cl.span,
                )
            )
    return warnings


def _cover(sig, func, columns, rows, shapes, hole_vars, used) -> None:
    if not rows:
        # Unclaimed leaf: fine only if some remaining column type is empty.
        for col in columns:
            ty = whnf(sig, col.ty)
            if isinstance(ty, DataCall):
                av = available_ctors(sig, ty.name, list(ty.args))
                if isinstance(av, Available) and not av.rows:
                    return
        raise CoverageError(
            MISSING_CASE,
            f"missing case in {func.name}: {_render_stack(shapes, hole_vars)}",
            func.span,
        )

    split_at = None
    for j in range(len(columns)):
        if any(not isinstance(pats[j], BindPat) for _, pats in rows):
            split_at = j
            break
    if split_at is None:
        # Every surviving row is all catch-alls; the first one claims the leaf.
        used.add(rows[0][0])
        return

    col = columns[split_at]
    ty = whnf(sig, col.ty)
    if not isinstance(ty, DataCall):
        raise InternalError(f"splitting non-data column {pretty(col.ty)}")
    fuel = Fuel()
    indices = [index_normal_form(sig, a, fuel) for a in ty.args]
    av = available_ctors(sig, ty.name, indices)
    if isinstance(av, Undecidable):
        raise CoverageError(
            CANNOT_SPLIT,
            f"cannot split on {col.var.text} : {pretty(ty)} in {func.name}: "
            f"availability of constructor {av.ctor} is undecidable",
            func.span,
        )
    decl = sig.data(ty.name)

    if not av.rows:
        # Empty split: impossible patterns here claim the vacuous case.
        for i, pats in rows:
            if isinstance(pats[split_at], ImpossiblePat):
                used.add(i)
        return

    seen: set[str] = set()
    for ctor in av.rows:
        if ctor in seen:
            continue
        seen.add(ctor)
        status, row, sub, _ = first_matching_row(sig, decl, ctor, indices)
        if status != "matched":
            raise InternalError(f"availability and row resolution disagree on {ctor}")
        fields = instantiate_fields(decl, row, indices, sub)
        field_vars = [Var.fresh(x.text) for x, _ in fields]
        rename = Substitution(
            tuple((x, VarCall(w)) for (x, _), w in zip(fields, field_vars))
        )
        field_cols = [
            _Column(w, subst(ty_i, rename))
            for w, (_, ty_i) in zip(field_vars, fields)
        ]
        case_term = ConCall(ctor, tuple(VarCall(w) for w in field_vars))
        refine = Substitution.of((col.var, case_term))

        new_columns = (
            [_Column(c.var, c.ty) for c in columns[:split_at]]
            + field_cols
            + [_Column(c.var, subst(c.ty, refine)) for c in columns[split_at + 1 :]]
        )
        new_shapes = [subst(s, refine) for s in shapes]
        new_holes = (hole_vars - {col.var}) | set(field_vars)

        new_rows = []
        for i, pats in rows:
            p = pats[split_at]
            match p:
                case BindPat(_, _):
                    sub_pats = [BindPat(w) for w in field_vars]
                case ConPat(name, qs):
                    if name != ctor:
                        continue
                    if len(qs) != len(field_vars):
                        raise InternalError(
                            f"pattern arity for {name} disagrees with the "
                            f"row selected at this split"
                        )
                    sub_pats = list(qs)
                case ImpossiblePat():
                    continue
            new_rows.append((i, pats[:split_at] + sub_pats + pats[split_at + 1 :]))

        _cover(sig, func, new_columns, new_rows, new_shapes, new_holes, used)


def _render_stack(shapes: list[Term], hole_vars: set[Var]) -> str:
    return ", ".join(_render_shape(s, hole_vars) for s in shapes)


def _render_shape(t: Term, hole_vars: set[Var]) -> str:
    match t:
        case VarCall(x, ()) if x in hole_vars:
            return "_"
        case ConCall(name, args):
            if not args:
                return name
            parts = [name]
            for a in args:
                s = _render_shape(a, hole_vars)
                parts.append(f"({s})" if " " in s else s)
            return " ".join(parts)
        case _:
            return pretty(t)
