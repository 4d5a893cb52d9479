"""Surface syntax: lexer, recursive-descent parser, printer, and resolver.

Concrete grammar (line comments start with `--`, `->` is right-associative,
application binds tighter than `->`):

    file    ::= decl*
    decl    ::= "data" ID tele ":" "Type" ctorRow*
              | "def" ID tele ":" expr clause*
    ctorRow ::= "|" (patList "=>")? ID tele
    clause  ::= "|" patList ("=>" expr)?
    patList ::= pat ("," pat)*
    pat     ::= ID patAtom* | "impossible"
    patAtom ::= ID | "impossible" | "(" pat ")"
    tele    ::= ("(" ID+ ":" expr ")")*
    expr    ::= "fn" ID "=>" expr | "(" ID ":" expr ")" "->" expr
              | expr1 ("->" expr)?
    expr1   ::= atom+
    atom    ::= ID | "Type" | "(" expr ")"

The resolver turns surface declarations into core ones: pattern identifiers
naming a declared constructor become constructor patterns, all other
identifiers bind; expression heads resolve to local binders, then functions,
then data types, then constructors. Under-applied heads are expanded to
lambdas over their missing parameters, so core terms stay fully applied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

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
    Telescope,
    Term,
    Univ,
    Var,
    VarCall,
    apply_spine,
)
from .diagnostics import (
    BAD_APPLICATION,
    DUPLICATE_DECL,
    LEX_ERROR,
    PARSE_ERROR,
    SHADOWS_CTOR,
    UNKNOWN_IDENT,
    InternalError,
    LexError,
    ParseError,
    ResolveError,
    SourceSpan,
)

KEYWORDS = {"data", "def", "fn", "impossible", "Type"}


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, one of KEYWORDS, LPAREN, RPAREN, COLON, COMMA, BAR, FATARROW, ARROW, EOF
    text: str
    span: SourceSpan


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c in "_'"


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)

    def span(l0, c0, l1, c1):
        return SourceSpan(file, l0, c0, l1, c1)

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            col += 1
            i += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            col += j - i
            i = j
            kind = word if word in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, span(start_line, start_col, line, col - 1)))
            continue
        if c == "(":
            tokens.append(Token("LPAREN", c, span(line, col, line, col)))
        elif c == ")":
            tokens.append(Token("RPAREN", c, span(line, col, line, col)))
        elif c == ":":
            tokens.append(Token("COLON", c, span(line, col, line, col)))
        elif c == ",":
            tokens.append(Token("COMMA", c, span(line, col, line, col)))
        elif c == "|":
            tokens.append(Token("BAR", c, span(line, col, line, col)))
        elif c == "=" and text.startswith("=>", i):
            tokens.append(Token("FATARROW", "=>", span(line, col, line, col + 1)))
            col += 1
            i += 1
        elif c == "-" and text.startswith("->", i):
            tokens.append(Token("ARROW", "->", span(line, col, line, col + 1)))
            col += 1
            i += 1
        else:
            raise LexError(
                LEX_ERROR, f"unexpected character {c!r}", span(line, col, line, col)
            )
        col += 1
        i += 1
    tokens.append(Token("EOF", "", span(line, col, line, col)))
    return tokens


# ---------------------------------------------------------------------------
# Surface trees (spans never participate in equality)


@dataclass(frozen=True)
class SRef:
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SUniv:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SApp:
    head: SExpr
    args: tuple[SExpr, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SArrow:
    domain: SExpr
    codomain: SExpr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SPi:
    binder: str
    domain: SExpr
    codomain: SExpr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SFn:
    binder: str
    body: SExpr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


SExpr = Union[SRef, SUniv, SApp, SArrow, SPi, SFn]


@dataclass(frozen=True)
class SPatApp:
    name: str
    args: tuple[SPat, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SPatImpossible:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


SPat = Union[SPatApp, SPatImpossible]

STeleGroup = tuple[tuple[str, ...], SExpr]


@dataclass(frozen=True)
class SCtorRow:
    patterns: Optional[tuple[SPat, ...]]
    name: str
    tele: tuple[STeleGroup, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SClause:
    patterns: tuple[SPat, ...]
    body: Optional[SExpr]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SData:
    name: str
    tele: tuple[STeleGroup, ...]
    rows: tuple[SCtorRow, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SDef:
    name: str
    tele: tuple[STeleGroup, ...]
    result: SExpr
    clauses: tuple[SClause, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


SDecl = Union[SData, SDef]


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def accept(self, kind: str) -> Optional[Token]:
        if self.at(kind):
            return self.next()
        return None

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            got = tok.text or "end of input"
            raise ParseError(PARSE_ERROR, f"expected {what}, found {got!r}", tok.span)
        return self.next()

    # declarations

    def file(self) -> list[SDecl]:
        decls = []
        while not self.at("EOF"):
            decls.append(self.decl())
        return decls

    def decl(self) -> SDecl:
        tok = self.peek()
        if tok.kind == "data":
            return self.data_decl()
        if tok.kind == "def":
            return self.def_decl()
        raise ParseError(
            PARSE_ERROR, f"expected a declaration, found {tok.text!r}", tok.span
        )

    def data_decl(self) -> SData:
        start = self.expect("data", "'data'")
        name = self.expect("IDENT", "a data type name")
        tele = self.tele()
        self.expect("COLON", "':'")
        self.expect("Type", "'Type'")
        rows = []
        while self.at("BAR"):
            rows.append(self.ctor_row())
        end = rows[-1].span if rows else name.span
        return SData(name.text, tele, tuple(rows), start.span.to(end))

    def def_decl(self) -> SDef:
        start = self.expect("def", "'def'")
        name = self.expect("IDENT", "a function name")
        tele = self.tele()
        self.expect("COLON", "':'")
        result = self.expr()
        clauses = []
        while self.at("BAR"):
            clauses.append(self.clause())
        end = clauses[-1].span if clauses else _sspan(result)
        return SDef(name.text, tele, result, tuple(clauses), start.span.to(end))

    def ctor_row(self) -> SCtorRow:
        bar = self.expect("BAR", "'|'")
        saved = self.pos
        try:
            pats = self.pat_list()
            if self.accept("FATARROW"):
                name = self.expect("IDENT", "a constructor name")
                tele = self.tele()
                return SCtorRow(tuple(pats), name.text, tele, bar.span.to(name.span))
        except ParseError:
            pass
        self.pos = saved
        name = self.expect("IDENT", "a constructor name")
        tele = self.tele()
        return SCtorRow(None, name.text, tele, bar.span.to(name.span))

    def clause(self) -> SClause:
        bar = self.expect("BAR", "'|'")
        pats = self.pat_list()
        body = None
        end = bar.span
        if self.accept("FATARROW"):
            body = self.expr()
            end = _sspan(body) or end
        return SClause(tuple(pats), body, bar.span.to(end))

    def tele(self) -> tuple[STeleGroup, ...]:
        groups = []
        # A telescope group and a Pi type both start with "(" IDENT; the ":"
        # after one or more names settles it, and result types following a
        # telescope always sit behind an explicit ":".
        while self.at("LPAREN"):
            save = self.pos
            self.next()
            names = []
            while self.at("IDENT"):
                names.append(self.next().text)
            if not names or not self.at("COLON"):
                self.pos = save
                break
            self.next()
            ty = self.expr()
            self.expect("RPAREN", "')'")
            groups.append((tuple(names), ty))
        return tuple(groups)

    # patterns

    def pat_list(self) -> list[SPat]:
        pats = [self.pattern()]
        while self.accept("COMMA"):
            pats.append(self.pattern())
        return pats

    def pattern(self) -> SPat:
        tok = self.peek()
        if tok.kind == "impossible":
            self.next()
            return SPatImpossible(tok.span)
        head = self.expect("IDENT", "a pattern")
        args = []
        while True:
            atom = self.pat_atom()
            if atom is None:
                break
            args.append(atom)
        end = args[-1].span if args else head.span
        return SPatApp(head.text, tuple(args), head.span.to(end))

    def pat_atom(self) -> Optional[SPat]:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.next()
            return SPatApp(tok.text, (), tok.span)
        if tok.kind == "impossible":
            self.next()
            return SPatImpossible(tok.span)
        if tok.kind == "LPAREN":
            self.next()
            p = self.pattern()
            close = self.expect("RPAREN", "')'")
            return _with_span(p, tok.span.to(close.span))
        return None

    # expressions

    def expr(self) -> SExpr:
        tok = self.peek()
        if tok.kind == "fn":
            self.next()
            binder = self.expect("IDENT", "a binder name")
            self.expect("FATARROW", "'=>'")
            body = self.expr()
            return SFn(binder.text, body, tok.span.to(_sspan(body)))
        if (
            tok.kind == "LPAREN"
            and self.peek(1).kind == "IDENT"
            and self.peek(2).kind == "COLON"
        ):
            self.next()
            binder = self.next()
            self.next()
            domain = self.expr()
            self.expect("RPAREN", "')'")
            self.expect("ARROW", "'->'")
            codomain = self.expr()
            return SPi(binder.text, domain, codomain, tok.span.to(_sspan(codomain)))
        head = self.expr1()
        if self.accept("ARROW"):
            codomain = self.expr()
            return SArrow(head, codomain, _sspan(head).to(_sspan(codomain)))
        return head

    def expr1(self) -> SExpr:
        head = self.atom()
        args = []
        while self.peek().kind in ("IDENT", "Type", "LPAREN"):
            # "(x :" here can only open a Pi argument's parentheses.
            args.append(self.atom())
        if not args:
            return head
        return SApp(head, tuple(args), _sspan(head).to(_sspan(args[-1])))

    def atom(self) -> SExpr:
        tok = self.next()
        if tok.kind == "IDENT":
            return SRef(tok.text, tok.span)
        if tok.kind == "Type":
            return SUniv(tok.span)
        if tok.kind == "LPAREN":
            e = self.expr()
            close = self.expect("RPAREN", "')'")
            return _with_span(e, tok.span.to(close.span))
        raise ParseError(
            PARSE_ERROR, f"expected an expression, found {tok.text or 'end of input'!r}", tok.span
        )


def _with_span(node, span):
    return type(node)(**{**{f: getattr(node, f) for f in node.__dataclass_fields__ if f != "span"}, "span": span})


def _sspan(node) -> SourceSpan:
    return node.span


def parse_file(text: str, file: str = "<input>") -> list[SDecl]:
    """Parse a whole compilation unit."""
    return _Parser(tokenize(text, file)).file()


def parse_expression(text: str, file: str = "<expr>") -> SExpr:
    parser = _Parser(tokenize(text, file))
    e = parser.expr()
    parser.expect("EOF", "end of input")
    return e


# ---------------------------------------------------------------------------
# Surface printer


def print_surface(decls: list[SDecl]) -> str:
    return "\n".join(_print_decl(d) for d in decls)


def _print_decl(d: SDecl) -> str:
    match d:
        case SData(name, tele, rows):
            header = f"data {name}{_print_tele(tele)} : Type"
            lines = [header] + [f"  | {_print_row(r)}" for r in rows]
            return "\n".join(lines) + "\n"
        case SDef(name, tele, result, clauses):
            header = f"def {name}{_print_tele(tele)} : {print_expr(result)}"
            lines = [header] + [f"  | {_print_clause(c)}" for c in clauses]
            return "\n".join(lines) + "\n"
    raise InternalError(f"unexpected declaration {d!r}")


def _print_tele(tele: tuple[STeleGroup, ...]) -> str:
    return "".join(f" ({' '.join(names)} : {print_expr(ty)})" for names, ty in tele)


def _print_row(r: SCtorRow) -> str:
    head = "" if r.patterns is None else f"{_print_pats(r.patterns)} => "
    return f"{head}{r.name}{_print_tele(r.tele)}"


def _print_clause(c: SClause) -> str:
    if c.body is None:
        return _print_pats(c.patterns)
    return f"{_print_pats(c.patterns)} => {print_expr(c.body)}"


def _print_pats(pats) -> str:
    return ", ".join(_print_pat(p) for p in pats)


def _print_pat(p: SPat) -> str:
    match p:
        case SPatImpossible():
            return "impossible"
        case SPatApp(name, args):
            parts = [name]
            for a in args:
                s = _print_pat(a)
                parts.append(f"({s})" if isinstance(a, SPatApp) and a.args else s)
            return " ".join(parts)
    raise InternalError(f"unexpected pattern {p!r}")


def print_expr(e: SExpr) -> str:
    match e:
        case SRef(name):
            return name
        case SUniv():
            return "Type"
        case SApp(head, args):
            return " ".join([_print_atom(head)] + [_print_atom(a) for a in args])
        case SArrow(dom, cod):
            left = print_expr(dom)
            if isinstance(dom, (SArrow, SPi, SFn)):
                left = f"({left})"
            return f"{left} -> {print_expr(cod)}"
        case SPi(x, dom, cod):
            return f"({x} : {print_expr(dom)}) -> {print_expr(cod)}"
        case SFn(x, body):
            return f"fn {x} => {print_expr(body)}"
    raise InternalError(f"unexpected expression {e!r}")


def _print_atom(e: SExpr) -> str:
    s = print_expr(e)
    if isinstance(e, (SRef, SUniv)):
        return s
    return f"({s})"


# ---------------------------------------------------------------------------
# Resolver


@dataclass
class _Global:
    kind: str  # "data" | "func" | "ctor"
    arity: int
    hints: tuple[str, ...] = ()
    # constructors only:
    fields_arity: int = 0
    owner: str = ""


class Resolver:
    """Resolves surface declarations into core ones, in order.

    Later declarations see earlier ones; a declaration also sees itself (for
    recursive fields and clauses).
    """

    def __init__(self) -> None:
        self.globals: dict[str, _Global] = {}

    def run(self, decls: list[SDecl]) -> list[Declaration]:
        return [self._decl(d) for d in decls]

    # declarations

    def _declare(self, name: str, entry: _Global, span, *, same_data_ok: str = "") -> None:
        existing = self.globals.get(name)
        if existing is not None:
            if existing.kind == "ctor" and existing.owner == same_data_ok:
                return  # another selection row for the same constructor
            raise ResolveError(DUPLICATE_DECL, f"duplicate name {name}", span)
        self.globals[name] = entry

    def _decl(self, d: SDecl) -> Declaration:
        match d:
            case SData(name, stele, rows):
                scope: dict[str, Var] = {}
                tele = self._tele(stele, scope, d.span)
                self._declare(
                    name,
                    _Global("data", len(tele), tuple(x.text for x, _ in tele)),
                    d.span,
                )
                core_rows = tuple(self._row(name, tele, scope, r) for r in rows)
                return DataDecl(name, tele, core_rows, d.span)
            case SDef(name, stele, sresult, sclauses):
                scope = {}
                tele = self._tele(stele, scope, d.span)
                result = self._expr(sresult, [scope])
                self._declare(
                    name,
                    _Global("func", len(tele), tuple(x.text for x, _ in tele)),
                    d.span,
                )
                clauses = tuple(self._clause(c) for c in sclauses)
                return FuncDecl(name, tele, result, clauses, d.span)
        raise InternalError(f"unexpected declaration {d!r}")

    def _tele(self, groups, scope: dict[str, Var], span) -> Telescope:
        entries: list[tuple[Var, Term]] = []
        for names, sty in groups:
            ty = self._expr(sty, [scope])
            for n in names:
                var = self._bind(n, span)
                if n in scope:
                    raise ResolveError(
                        DUPLICATE_DECL, f"duplicate telescope binder {n}", span
                    )
                scope[n] = var
                entries.append((var, ty))
        return Telescope(tuple(entries))

    def _row(self, data_name, data_tele, data_scope, r: SCtorRow) -> CtorRow:
        if r.patterns is None:
            fields_scope = dict(data_scope)
            fields = self._tele(r.tele, fields_scope, r.span)
            pats = None
            binds = len(data_tele)
        else:
            pat_scope: dict[str, Var] = {}
            pats = tuple(self._pattern(p, pat_scope) for p in r.patterns)
            binds = len(pat_scope)
            fields_scope = pat_scope
            fields = self._tele(r.tele, fields_scope, r.span)
        self._declare(
            r.name,
            _Global(
                "ctor",
                binds + len(fields),
                tuple(fields_scope.keys()),
                fields_arity=len(fields),
                owner=data_name,
            ),
            r.span,
            same_data_ok=data_name,
        )
        return CtorRow(r.name, fields, pats, r.span)

    def _clause(self, c: SClause) -> Clause:
        # Clause bodies see the pattern bindings only; the telescope's
        # variables are substituted away by the checker.
        pat_scope: dict[str, Var] = {}
        pats = tuple(self._pattern(p, pat_scope) for p in c.patterns)
        body = self._expr(c.body, [pat_scope]) if c.body is not None else None
        return Clause(pats, body, c.span)

    # patterns

    def _pattern(self, p: SPat, scope: dict[str, Var]) -> Pattern:
        match p:
            case SPatImpossible():
                return ImpossiblePat(p.span)
            case SPatApp(name, args):
                entry = self.globals.get(name)
                if entry is not None and entry.kind == "ctor":
                    return ConPat(
                        name,
                        tuple(self._pattern(a, scope) for a in args),
                        p.span,
                    )
                if args:
                    raise ResolveError(
                        UNKNOWN_IDENT, f"unknown constructor {name}", p.span
                    )
                var = Var.fresh(name)
                scope[name] = var
                return BindPat(var, None, p.span)
        raise InternalError(f"unexpected pattern {p!r}")

    # expressions

    def _bind(self, name: str, span) -> Var:
        entry = self.globals.get(name)
        if entry is not None and entry.kind == "ctor":
            raise ResolveError(
                SHADOWS_CTOR, f"binder {name} shadows a constructor", span
            )
        return Var.fresh(name)

    def _lookup_local(self, scopes, name) -> Optional[Var]:
        for frame in reversed(scopes):
            if name in frame:
                return frame[name]
        return None

    def _expr(self, e: SExpr, scopes: list[dict[str, Var]]) -> Term:
        match e:
            case SUniv():
                return Univ(e.span)
            case SRef(_):
                return self._apply(e, [], scopes, e.span)
            case SApp(head, sargs):
                args = [self._expr(a, scopes) for a in sargs]
                return self._apply(head, args, scopes, e.span)
            case SArrow(sdom, scod):
                dom = self._expr(sdom, scopes)
                cod = self._expr(scod, scopes)
                return Pi(Var.fresh("_"), dom, cod, e.span)
            case SPi(name, sdom, scod):
                dom = self._expr(sdom, scopes)
                var = self._bind(name, e.span)
                cod = self._expr(scod, scopes + [{name: var}])
                return Pi(var, dom, cod, e.span)
            case SFn(name, sbody):
                var = self._bind(name, e.span)
                body = self._expr(sbody, scopes + [{name: var}])
                return Lam(var, body, e.span)
        raise InternalError(f"unexpected expression {e!r}")

    def _apply(self, head: SExpr, args: list[Term], scopes, span) -> Term:
        if isinstance(head, SRef):
            var = self._lookup_local(scopes, head.name)
            if var is not None:
                return VarCall(var, tuple(args), span)
            entry = self.globals.get(head.name)
            if entry is None:
                raise ResolveError(
                    UNKNOWN_IDENT, f"unknown identifier {head.name}", head.span
                )
            return self._apply_global(head.name, entry, args, span)
        inner = self._expr(head, scopes)
        try:
            return apply_spine(inner, tuple(args))
        except InternalError:
            raise ResolveError(
                BAD_APPLICATION, "this expression cannot take arguments", span
            ) from None

    def _apply_global(self, name: str, entry: _Global, args, span) -> Term:
        n = len(args)
        if entry.kind == "ctor":
            if n == entry.fields_arity:
                return ConCall(name, tuple(args), span)
            if n == 0:
                return self._expand_ctor(name, entry, span)
            raise ResolveError(
                BAD_APPLICATION,
                f"constructor {name} takes {entry.fields_arity} arguments "
                f"(or none), got {n}",
                span,
            )
        if n > entry.arity:
            raise ResolveError(
                BAD_APPLICATION,
                f"{name} takes {entry.arity} arguments, got {n}",
                span,
            )
        hints = list(entry.hints[n:entry.arity])
        while len(hints) < entry.arity - n:
            hints.append("x")
        missing = [Var.fresh(h) for h in hints]
        full = tuple(args) + tuple(VarCall(v) for v in missing)
        call: Term = (
            FnCall(name, full, span)
            if entry.kind == "func"
            else DataCall(name, full, span)
        )
        for v in reversed(missing):
            call = Lam(v, call, span)
        return call

    def _expand_ctor(self, name: str, entry: _Global, span) -> Term:
        # A bare constructor reference stands for a function over all its
        # synthesized parameters; only the trailing field parameters feed the
        # actual call.
        hints = entry.hints or tuple(f"x{i}" for i in range(entry.arity))
        params = [Var.fresh(h) for h in hints[: entry.arity]]
        while len(params) < entry.arity:
            params.append(Var.fresh("x"))
        field_params = params[len(params) - entry.fields_arity :]
        call: Term = ConCall(name, tuple(VarCall(v) for v in field_params), span)
        for v in reversed(params):
            call = Lam(v, call, span)
        return call

    def resolve_expression(self, e: SExpr) -> Term:
        """Resolve a standalone expression against the declared globals."""
        return self._expr(e, [{}])


def resolve(decls: list[SDecl]) -> list[Declaration]:
    """Resolve a parsed file into core declarations."""
    return Resolver().run(decls)
