"""Type checking: terms, patterns, clauses, constructor rows, and signatures.

Constructor calls are checked against the expected data type by matching its
(normalized) arguments against the constructor's pattern row; a positive
match instantiates the field types, a negative match means the constructor
is unavailable, and a stuck match is its own hard error. Signature formation
folds declarations left to right, so every name refers to an earlier
declaration (or to the one being checked, for recursion).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import coverage as coverage_mod
from .core import (
    BindPat,
    Clause,
    ConCall,
    ConPat,
    CtorRow,
    DataCall,
    DataDecl,
    Declaration,
    FnCall,
    FuncDecl,
    ImpossiblePat,
    Lam,
    Pattern,
    Pi,
    Signature,
    Substitution,
    Telescope,
    Term,
    Univ,
    UNIV,
    Var,
    VarCall,
    disjoint_union,
    pattern_has_impossible,
    pretty,
    subst,
)
from .diagnostics import (
    ARITY_MISMATCH,
    CTOR_STUCK,
    CTOR_UNAVAILABLE,
    DUPLICATE_NAME,
    DUPLICATE_PATTERN_VAR,
    IMPOSSIBLE_HAS_BODY,
    IMPOSSIBLE_REJECTED,
    MISSING_BODY,
    NOT_A_DATA_TYPE,
    STRICT_FIELD_SCOPE,
    TYPE_MISMATCH,
    UNEXPECTED_FORM,
    UNKNOWN_NAME,
    WRONG_DATA_TYPE,
    SourceSpan,
    TypeCheckError,
    Warning,
)
from .evaluator import DEFAULT_FUEL, Fuel, convertible, index_normal_form, whnf
from .pattern_ops import to_term, to_terms, vars_tele


@dataclass(frozen=True)
class Context:
    """The in-scope bindings, oldest first."""

    entries: tuple[tuple[Var, Term], ...] = ()

    def extended(self, var: Var, ty: Term) -> Context:
        return Context(self.entries + ((var, ty),))

    def extended_tele(self, tele: Telescope) -> Context:
        return Context(self.entries + tele.entries)

    def lookup(self, var: Var) -> Optional[Term]:
        for x, ty in reversed(self.entries):
            if x == var:
                return ty
        return None


EMPTY_CONTEXT = Context()


@dataclass
class TypeChecker:
    """Checks terms and declarations against a signature.

    `strict_row_fields` additionally re-checks pattern-row constructor fields
    under the data telescope scope and reports any disagreement as a warning.
    """

    sig: Signature = dc_field(default_factory=Signature)
    fuel_limit: int = DEFAULT_FUEL
    strict_row_fields: bool = False
    warnings: list[Warning] = dc_field(default_factory=list)

    # -- helpers ------------------------------------------------------------

    def _fuel(self) -> Fuel:
        return Fuel(self.fuel_limit)

    def _whnf(self, t: Term) -> Term:
        return whnf(self.sig, t, self._fuel())

    def _index_nf(self, ts: Sequence[Term]) -> list[Term]:
        fuel = self._fuel()
        return [index_normal_form(self.sig, t, fuel) for t in ts]

    def _convertible(self, u: Term, v: Term) -> bool:
        return convertible(self.sig, u, v, self._fuel())

    def _require_type(self, actual: Term, expected: Term, span: Optional[SourceSpan]):
        if not self._convertible(actual, expected):
            raise TypeCheckError(
                TYPE_MISMATCH,
                f"expected {pretty(expected)}, got {pretty(actual)}",
                span,
                expected=pretty(expected),
                actual=pretty(actual),
            )

    # -- terms --------------------------------------------------------------

    def check_term(self, ctx: Context, term: Term, expected: Term) -> None:
        """Check `term` against the (well-formed) type `expected`."""
        span = term.span
        match term:
            case Univ():
                self._require_type(UNIV, expected, span)
            case Pi(x, dom, cod):
                self.check_term(ctx, dom, UNIV)
                self.check_term(ctx.extended(x, dom), cod, UNIV)
                self._require_type(UNIV, expected, span)
            case Lam(x, body):
                exp = self._whnf(expected)
                if not isinstance(exp, Pi):
                    raise TypeCheckError(
                        UNEXPECTED_FORM,
                        f"lambda cannot have type {pretty(expected)}",
                        span,
                    )
                cod = subst(exp.codomain, Substitution.of((exp.binder, VarCall(x))))
                self.check_term(ctx.extended(x, exp.domain), body, cod)
            case VarCall(x, args):
                ty = ctx.lookup(x)
                if ty is None:
                    raise TypeCheckError(
                        UNKNOWN_NAME, f"unbound variable {x.text}", span
                    )
                for arg in args:
                    ty = self._whnf(ty)
                    if not isinstance(ty, Pi):
                        raise TypeCheckError(
                            UNEXPECTED_FORM,
                            f"cannot apply {x.text} at non-function type {pretty(ty)}",
                            span,
                        )
                    self.check_term(ctx, arg, ty.domain)
                    ty = subst(ty.codomain, Substitution.of((ty.binder, arg)))
                self._require_type(ty, expected, span)
            case FnCall(name, args):
                func = self.sig.func(name)
                if func is None:
                    raise TypeCheckError(
                        UNKNOWN_NAME, f"unknown function {name}", span
                    )
                self.check_args(ctx, args, func.telescope, span)
                result = subst(
                    func.result,
                    Substitution(tuple(zip(vars_tele(func.telescope), args))),
                )
                self._require_type(result, expected, span)
            case DataCall(name, args):
                decl = self.sig.data(name)
                if decl is None:
                    raise TypeCheckError(
                        UNKNOWN_NAME, f"unknown data type {name}", span
                    )
                self.check_args(ctx, args, decl.telescope, span)
                self._require_type(UNIV, expected, span)
            case ConCall(name, args):
                self._check_con_call(ctx, name, args, expected, span)
            case _:
                raise TypeCheckError(
                    UNEXPECTED_FORM, f"malformed term {term!r}", span
                )

    def _check_con_call(self, ctx, name, args, expected, span) -> None:
        exp = self._whnf(expected)
        if not isinstance(exp, DataCall):
            raise TypeCheckError(
                NOT_A_DATA_TYPE,
                f"constructor {name} cannot have non-data type {pretty(expected)}",
                span,
            )
        owner = self.sig.ctor_owner(name)
        if owner is None:
            raise TypeCheckError(UNKNOWN_NAME, f"unknown constructor {name}", span)
        if owner.name != exp.name:
            raise TypeCheckError(
                WRONG_DATA_TYPE,
                f"constructor {name} belongs to {owner.name}, not {exp.name}",
                span,
            )
        indices = self._index_nf(exp.args)
        status, row, sub, _ = coverage_mod.first_matching_row(
            self.sig, owner, name, indices
        )
        if status == "mismatch":
            raise TypeCheckError(
                CTOR_UNAVAILABLE,
                f"constructor {name} is not available at {pretty(exp)}",
                span,
            )
        if status == "stuck":
            raise TypeCheckError(
                CTOR_STUCK,
                f"cannot decide availability of constructor {name} "
                f"at {pretty(exp)}",
                span,
            )
        fields = coverage_mod.instantiate_fields(owner, row, indices, sub)
        self.check_args(ctx, args, fields, span)

    def check_args(
        self,
        ctx: Context,
        args: Sequence[Term],
        tele: Telescope,
        span: Optional[SourceSpan] = None,
    ) -> None:
        """Check that the arguments instantiate the telescope, left to right."""
        if len(args) != len(tele):
            raise TypeCheckError(
                ARITY_MISMATCH,
                f"expected {len(tele)} arguments, got {len(args)}",
                span,
            )
        acc = Substitution()
        for arg, (x, ty) in zip(args, tele):
            self.check_term(ctx, arg, subst(ty, acc))
            acc = Substitution(acc.pairs + ((x, arg),))

    def check_telescope(self, ctx: Context, tele: Telescope) -> Context:
        """Check each entry's type is a type; returns the extended context."""
        for x, ty in tele:
            self.check_term(ctx, ty, UNIV)
            ctx = ctx.extended(x, ty)
        return ctx

    # -- patterns -----------------------------------------------------------

    def check_pattern(
        self, ctx: Context, pat: Pattern, ty: Term, lenient: bool = False
    ) -> tuple[Pattern, Telescope]:
        """Check one pattern against a type.

        Returns the pattern with binding types filled in, plus the telescope
        of its bindings. `lenient` applies after an impossible pattern made
        the remaining types opaque: stuck availability is then tolerated.
        """
        match pat:
            case BindPat(x, _):
                return BindPat(x, ty, pat.span), Telescope.of((x, ty))
            case ConPat(name, qs):
                return self._check_con_pattern(ctx, pat, name, qs, ty, lenient)
            case ImpossiblePat():
                self._check_impossible(pat, ty, lenient)
                return pat, Telescope()
        raise TypeCheckError(UNEXPECTED_FORM, f"malformed pattern {pat!r}", pat.span)

    def _check_con_pattern(self, ctx, pat, name, qs, ty, lenient):
        owner = self.sig.ctor_owner(name)
        if owner is None:
            raise TypeCheckError(
                UNKNOWN_NAME, f"unknown constructor {name}", pat.span
            )
        scrutinee = self._whnf(ty)
        if not isinstance(scrutinee, DataCall):
            if lenient:
                return self._lenient_pattern(pat)
            raise TypeCheckError(
                NOT_A_DATA_TYPE,
                f"constructor pattern {name} at non-data type {pretty(ty)}",
                pat.span,
            )
        if owner.name != scrutinee.name:
            raise TypeCheckError(
                WRONG_DATA_TYPE,
                f"constructor {name} belongs to {owner.name}, not {scrutinee.name}",
                pat.span,
            )
        indices = self._index_nf(scrutinee.args)
        status, row, sub, _ = coverage_mod.first_matching_row(
            self.sig, owner, name, indices
        )
        if status == "mismatch":
            raise TypeCheckError(
                CTOR_UNAVAILABLE,
                f"constructor {name} is not available at {pretty(scrutinee)}",
                pat.span,
            )
        if status == "stuck":
            if lenient:
                return self._lenient_pattern(pat)
            raise TypeCheckError(
                CTOR_STUCK,
                f"cannot decide availability of constructor {name} "
                f"at {pretty(scrutinee)}",
                pat.span,
            )
        fields = coverage_mod.instantiate_fields(owner, row, indices, sub)
        if len(qs) != len(fields):
            raise TypeCheckError(
                ARITY_MISMATCH,
                f"constructor {name} has {len(fields)} fields, "
                f"pattern has {len(qs)}",
                pat.span,
            )
        typed_qs, theta = self.check_patterns(ctx, qs, fields, lenient)
        return ConPat(name, typed_qs, pat.span), theta

    def _check_impossible(self, pat, ty, lenient) -> None:
        scrutinee = self._whnf(ty)
        if not isinstance(scrutinee, DataCall):
            if lenient:
                return
            raise TypeCheckError(
                NOT_A_DATA_TYPE,
                f"impossible pattern at non-data type {pretty(ty)}",
                pat.span,
            )
        decl = self.sig.data(scrutinee.name)
        indices = self._index_nf(scrutinee.args)
        av = coverage_mod.available_ctors(self.sig, scrutinee.name, indices)
        if isinstance(av, coverage_mod.Undecidable):
            if lenient:
                return
            raise TypeCheckError(
                IMPOSSIBLE_REJECTED,
                f"impossible pattern at {pretty(scrutinee)}: availability of "
                f"constructor {av.ctor} is stuck, emptiness cannot be certified",
                pat.span,
            )
        if av.rows:
            raise TypeCheckError(
                IMPOSSIBLE_REJECTED,
                f"impossible pattern at {pretty(scrutinee)}: "
                f"constructor {av.rows[0]} is available",
                pat.span,
            )

    def _lenient_pattern(self, pat: Pattern) -> tuple[Pattern, Telescope]:
        # Under an opaque type nothing can be verified; bindings get opaque
        # placeholder types. Only reachable in bodiless (impossible) clauses.
        match pat:
            case BindPat(x, _):
                ty = VarCall(Var.fresh("_ty"))
                return BindPat(x, ty, pat.span), Telescope.of((x, ty))
            case ImpossiblePat():
                return pat, Telescope()
            case ConPat(name, qs):
                if self.sig.ctor_owner(name) is None:
                    raise TypeCheckError(
                        UNKNOWN_NAME, f"unknown constructor {name}", pat.span
                    )
                theta = Telescope()
                typed = []
                for q in qs:
                    tq, th = self._lenient_pattern(q)
                    typed.append(tq)
                    theta = disjoint_union(theta, th)
                return ConPat(name, tuple(typed), pat.span), theta

    def check_patterns(
        self,
        ctx: Context,
        pats: Sequence[Pattern],
        tele: Telescope,
        lenient: bool = False,
    ) -> tuple[tuple[Pattern, ...], Telescope]:
        """Check a pattern row against a telescope.

        Each checked pattern's term form is substituted into the remaining
        entry types; a pattern containing `impossible` has no term form, so a
        fresh opaque variable stands in and the rest of the row is checked
        leniently.
        """
        if len(pats) != len(tele):
            raise TypeCheckError(
                ARITY_MISMATCH,
                f"row has {len(pats)} patterns for {len(tele)} telescope entries",
                pats[0].span if pats else None,
            )
        self._check_linear(pats)
        acc = Substitution()
        theta = Telescope()
        typed: list[Pattern] = []
        for pat, (x, ty) in zip(pats, tele):
            typed_p, th = self.check_pattern(ctx, pat, subst(ty, acc), lenient)
            typed.append(typed_p)
            theta = disjoint_union(theta, th)
            if pattern_has_impossible(typed_p):
                stand_in = VarCall(Var.fresh("_abs"))
                acc = Substitution(acc.pairs + ((x, stand_in),))
                lenient = True
            else:
                acc = Substitution(acc.pairs + ((x, to_term(typed_p)),))
        return tuple(typed), theta

    def _check_linear(self, pats: Sequence[Pattern]) -> None:
        seen: dict[str, Pattern] = {}

        def walk(p: Pattern) -> None:
            match p:
                case BindPat(x, _):
                    if x.text in seen:
                        raise TypeCheckError(
                            DUPLICATE_PATTERN_VAR,
                            f"pattern variable {x.text} bound twice in one row",
                            p.span,
                        )
                    seen[x.text] = p
                case ConPat(_, qs):
                    for q in qs:
                        walk(q)
                case ImpossiblePat():
                    pass

        for p in pats:
            walk(p)

    # -- clauses and rows ---------------------------------------------------

    def check_clause(
        self, ctx: Context, tele: Telescope, result: Term, clause: Clause
    ) -> Clause:
        """Check one function clause; returns it with typed patterns."""
        typed, theta = self.check_patterns(ctx, clause.patterns, tele)
        has_impossible = any(pattern_has_impossible(p) for p in typed)
        if has_impossible and clause.body is not None:
            raise TypeCheckError(
                IMPOSSIBLE_HAS_BODY,
                "clause with an impossible pattern cannot have a body",
                clause.span,
            )
        if not has_impossible and clause.body is None:
            raise TypeCheckError(
                MISSING_BODY,
                "clause without an impossible pattern needs a body",
                clause.span,
            )
        if clause.body is not None:
            expected = subst(
                result,
                Substitution(tuple(zip(vars_tele(tele), to_terms(typed)))),
            )
            self.check_term(ctx.extended_tele(theta), clause.body, expected)
        return Clause(typed, clause.body, clause.span)

    def check_ctor_row(
        self, ctx: Context, tele: Telescope, row: CtorRow
    ) -> CtorRow:
        """Check one constructor row; returns it with typed patterns."""
        if row.patterns is None:
            self.check_telescope(ctx.extended_tele(tele), row.fields)
            return row
        typed, theta = self.check_patterns(ctx, row.patterns, tele)
        self.check_telescope(ctx.extended_tele(theta), row.fields)
        if self.strict_row_fields:
            try:
                self.check_telescope(ctx.extended_tele(tele), row.fields)
            except TypeCheckError as err:
                self.warnings.append(
                    Warning(
                        STRICT_FIELD_SCOPE,
                        f"fields of constructor {row.name} do not check under "
                        f"the data telescope alone: {err.message}",
                        row.span,
                    )
                )
        return CtorRow(row.name, row.fields, typed, row.span)

    # -- signatures ----------------------------------------------------------

    def check_signature(
        self, decls: Sequence[Declaration], coverage: bool = True
    ) -> Signature:
        """Fold the declarations into a checked signature."""
        sig = self.sig
        for decl in decls:
            if sig.declares(decl.name):
                raise TypeCheckError(
                    DUPLICATE_NAME, f"duplicate name {decl.name}", decl.span
                )
            if isinstance(decl, DataDecl):
                sig = self._check_data(sig, decl)
            else:
                sig = self._check_func(sig, decl, coverage)
            self.sig = sig
        return sig

    def _check_data(self, sig: Signature, decl: DataDecl) -> Signature:
        self.sig = sig
        self.check_telescope(EMPTY_CONTEXT, decl.telescope)
        for row in decl.ctors:
            if row.name == decl.name or sig.declares(row.name):
                raise TypeCheckError(
                    DUPLICATE_NAME,
                    f"constructor name {row.name} is already declared",
                    row.span,
                )
        # Rows may mention the data type (and earlier rows) recursively.
        self.sig = sig.extended(decl)
        rows = tuple(
            self.check_ctor_row(EMPTY_CONTEXT, decl.telescope, row)
            for row in decl.ctors
        )
        return sig.extended(DataDecl(decl.name, decl.telescope, rows, decl.span))

    def _check_func(self, sig: Signature, decl: FuncDecl, coverage: bool) -> Signature:
        self.sig = sig
        ctx = self.check_telescope(EMPTY_CONTEXT, decl.telescope)
        self.check_term(ctx, decl.result, UNIV)
        # Clauses may call the function being defined.
        self.sig = sig.extended(decl)
        clauses = tuple(
            self.check_clause(EMPTY_CONTEXT, decl.telescope, decl.result, cl)
            for cl in decl.clauses
        )
        checked = FuncDecl(decl.name, decl.telescope, decl.result, clauses, decl.span)
        out = sig.extended(checked)
        if coverage:
            self.sig = out
            self.warnings.extend(coverage_mod.check_coverage(out, checked))
        return out


# Module-level entry points over an explicit signature.


def check_term(sig: Signature, ctx: Context, term: Term, expected: Term) -> None:
    TypeChecker(sig).check_term(ctx, term, expected)


def check_args(sig: Signature, ctx: Context, args: Sequence[Term], tele: Telescope) -> None:
    TypeChecker(sig).check_args(ctx, args, tele)


def check_pattern(
    sig: Signature, ctx: Context, pat: Pattern, ty: Term
) -> tuple[Pattern, Telescope]:
    return TypeChecker(sig).check_pattern(ctx, pat, ty)


def check_patterns(
    sig: Signature, ctx: Context, pats: Sequence[Pattern], tele: Telescope
) -> tuple[tuple[Pattern, ...], Telescope]:
    return TypeChecker(sig).check_patterns(ctx, pats, tele)


def check_clause(
    sig: Signature, ctx: Context, tele: Telescope, result: Term, clause: Clause
) -> Clause:
    return TypeChecker(sig).check_clause(ctx, tele, result, clause)


def check_ctor_row(
    sig: Signature, ctx: Context, tele: Telescope, row: CtorRow
) -> CtorRow:
    return TypeChecker(sig).check_ctor_row(ctx, tele, row)


def check_signature(
    decls: Sequence[Declaration],
    coverage: bool = True,
    strict_row_fields: bool = False,
    fuel_limit: int = DEFAULT_FUEL,
    warnings: Optional[list[Warning]] = None,
) -> Signature:
    checker = TypeChecker(
        fuel_limit=fuel_limit, strict_row_fields=strict_row_fields
    )
    sig = checker.check_signature(decls, coverage=coverage)
    if warnings is not None:
        warnings.extend(checker.warnings)
    return sig
