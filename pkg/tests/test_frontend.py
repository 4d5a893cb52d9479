from __future__ import annotations

import pytest

from sit.core import (
    BindPat,
    ConCall,
    ConPat,
    DataDecl,
    FnCall,
    FuncDecl,
    Lam,
    Pi,
    VarCall,
)
from sit.diagnostics import ParseError, ResolveError
from sit.frontend import (
    Resolver,
    SApp,
    SArrow,
    SClause,
    SCtorRow,
    SData,
    SFn,
    SPatApp,
    SPatImpossible,
    SPi,
    SRef,
    SUniv,
    parse_expression,
    parse_file,
    print_surface,
    resolve,
)

from support import CORPUS


NAT = """
data Nat : Type
  | zero
  | suc (n : Nat)
"""


class TestParser:
    def test_plain_data(self):
        decls = parse_file("data Nat : Type | zero | suc (n : Nat)")
        assert decls == [
            SData(
                "Nat",
                (),
                (
                    SCtorRow(None, "zero", ()),
                    SCtorRow(None, "suc", ((("n",), SRef("Nat")),)),
                ),
            )
        ]

    def test_pattern_row(self):
        decls = parse_file(
            "data Vec (A : Type) (n : Nat) : Type\n"
            "  | A, zero => vnil\n"
            "  | A, suc m => vcons (x : A) (xs : Vec A m)\n"
        )
        rows = decls[0].rows
        assert rows[0] == SCtorRow((SPatApp("A"), SPatApp("zero")), "vnil", ())
        assert rows[1].patterns == (SPatApp("A"), SPatApp("suc", (SPatApp("m"),)))
        assert rows[1].name == "vcons"

    def test_nested_and_impossible_patterns(self):
        decls = parse_file(
            "def f (a : Nat) : Nat\n"
            "  | suc (suc m) => m\n"
            "  | impossible\n"
        )
        clauses = decls[0].clauses
        assert clauses[0].patterns == (
            SPatApp("suc", (SPatApp("suc", (SPatApp("m"),)),)),
        )
        assert clauses[1] == SClause((SPatImpossible(),), None)

    def test_arrows_are_right_associative(self):
        e = parse_expression("Nat -> Nat -> Nat")
        assert e == SArrow(SRef("Nat"), SArrow(SRef("Nat"), SRef("Nat")))

    def test_application_binds_tighter_than_arrow(self):
        e = parse_expression("Vec A n -> Type")
        assert e == SArrow(SApp(SRef("Vec"), (SRef("A"), SRef("n"))), SUniv())

    def test_dependent_function_type(self):
        e = parse_expression("(n : Nat) -> Fin n")
        assert e == SPi("n", SRef("Nat"), SApp(SRef("Fin"), (SRef("n"),)))

    def test_lambda(self):
        e = parse_expression("fn x => suc x")
        assert e == SFn("x", SApp(SRef("suc"), (SRef("x"),)))

    def test_missing_clause_body_is_an_error(self):
        with pytest.raises(ParseError):
            parse_file("def f (x : Nat) : Nat | zero =>")

    def test_unterminated_group(self):
        with pytest.raises(ParseError):
            parse_expression("(Nat")

    def test_comments_and_crlf(self):
        decls = parse_file(
            "-- a comment\r\ndata Nat : Type -- trailing\r\n  | zero\r\n"
        )
        assert decls[0].name == "Nat"
        assert decls[0].rows[0].name == "zero"

    def test_spans_are_recorded(self):
        decls = parse_file("data Nat : Type\n  | zero\n", file="demo.sit")
        span = decls[0].span
        assert span.file == "demo.sit"
        assert (span.start_line, span.start_col) == (1, 1)


class TestRoundTrip:
    @pytest.mark.parametrize(
        "name", ["nat.sit", "list.sit", "vec.sit", "fin.sit", "normalize.sit"]
    )
    def test_corpus_print_parse(self, name):
        text = (CORPUS / name).read_text(encoding="utf-8")
        parsed = parse_file(text, name)
        printed = print_surface(parsed)
        assert parse_file(printed, name) == parsed

    def test_printing_is_stable(self):
        parsed = parse_file(NAT)
        printed = print_surface(parsed)
        assert print_surface(parse_file(printed)) == printed


class TestResolver:
    def test_constructor_pattern(self):
        decls = resolve(
            parse_file(NAT + "def f (a : Nat) : Nat\n  | suc m => m\n")
        )
        clause = decls[1].clauses[0]
        pat = clause.patterns[0]
        assert isinstance(pat, ConPat) and pat.name == "suc"
        assert isinstance(pat.args[0], BindPat)

    def test_non_constructor_name_binds(self):
        decls = resolve(parse_file(NAT + "def f (a : Nat) : Nat\n  | m => m\n"))
        pat = decls[1].clauses[0].patterns[0]
        assert isinstance(pat, BindPat) and pat.var.text == "m"

    def test_body_sees_pattern_binding(self):
        decls = resolve(parse_file(NAT + "def f (a : Nat) : Nat\n  | m => m\n"))
        clause = decls[1].clauses[0]
        assert clause.body == VarCall(clause.patterns[0].var)

    def test_bare_constructor_expands_to_lambda(self):
        decls = resolve(
            parse_file(NAT + "def f (a : Nat) : Nat -> Nat\n  | a => suc\n")
        )
        body = decls[1].clauses[0].body
        assert isinstance(body, Lam)
        assert body.body == ConCall("suc", (VarCall(body.binder),))

    def test_bare_indexed_constructor_quantifies_pattern_bindings(self):
        src = (
            NAT
            + """
data Vec (A : Type) (n : Nat) : Type
  | A, zero => vnil
  | A, suc m => vcons (x : A) (xs : Vec A m)

def f (a : Nat) : Nat
  | a => a
"""
        )
        resolver = Resolver()
        resolver.run(parse_file(src))
        term = resolver.resolve_expression(parse_expression("vcons"))
        # fn A => fn m => fn x => fn xs => vcons x xs
        binders = []
        while isinstance(term, Lam):
            binders.append(term.binder)
            term = term.body
        assert [b.text for b in binders] == ["A", "m", "x", "xs"]
        assert term == ConCall("vcons", (VarCall(binders[2]), VarCall(binders[3])))

    def test_underapplied_function_expands(self):
        resolver = Resolver()
        resolver.run(
            parse_file(
                NAT
                + "def plus (a : Nat) (b : Nat) : Nat\n"
                + "  | zero, b => b\n  | suc a, b => suc (plus a b)\n"
            )
        )
        term = resolver.resolve_expression(parse_expression("plus zero"))
        assert isinstance(term, Lam)
        assert isinstance(term.body, FnCall) and len(term.body.args) == 2

    def test_resolved_binders_are_globally_unique(self):
        decls = resolve(parse_file((CORPUS / "normalize.sit").read_text()))
        seen = set()

        def visit_pattern(p):
            if isinstance(p, BindPat):
                assert p.var not in seen
                seen.add(p.var)
            elif isinstance(p, ConPat):
                for q in p.args:
                    visit_pattern(q)

        def visit_term(t):
            match t:
                case Pi(x, dom, cod):
                    assert x not in seen
                    seen.add(x)
                    visit_term(dom)
                    visit_term(cod)
                case Lam(x, body):
                    assert x not in seen
                    seen.add(x)
                    visit_term(body)
                case VarCall(_, args) | FnCall(_, args) | ConCall(_, args):
                    for a in args:
                        visit_term(a)
                case _:
                    pass

        for d in decls:
            for x, ty in d.telescope:
                assert x not in seen
                seen.add(x)
                visit_term(ty)
            if isinstance(d, FuncDecl):
                visit_term(d.result)
                for cl in d.clauses:
                    for p in cl.patterns:
                        visit_pattern(p)
                    if cl.body is not None:
                        visit_term(cl.body)
            elif isinstance(d, DataDecl):
                for row in d.ctors:
                    for p in row.patterns or ():
                        visit_pattern(p)
                    for x, ty in row.fields:
                        assert x not in seen
                        seen.add(x)
                        visit_term(ty)

    def test_unknown_identifier(self):
        with pytest.raises(ResolveError) as exc:
            resolve(parse_file(NAT + "def f (a : Nat) : Nat\n  | m => foo\n"))
        assert exc.value.code == "E201"

    def test_unknown_constructor_in_pattern(self):
        with pytest.raises(ResolveError) as exc:
            resolve(parse_file(NAT + "def f (a : Nat) : Nat\n  | wrap m => m\n"))
        assert exc.value.code == "E201"

    def test_over_application(self):
        with pytest.raises(ResolveError) as exc:
            resolve(parse_file(NAT + "def f (a : Nat) : Nat\n  | m => suc m m\n"))
        assert exc.value.code == "E202"

    def test_duplicate_declaration(self):
        with pytest.raises(ResolveError) as exc:
            resolve(parse_file(NAT + NAT))
        assert exc.value.code == "E203"

    def test_binder_shadowing_constructor(self):
        with pytest.raises(ResolveError) as exc:
            resolve(parse_file(NAT + "def f (zero : Nat) : Nat\n  | m => m\n"))
        assert exc.value.code == "E204"

    def test_clause_body_does_not_see_telescope(self):
        with pytest.raises(ResolveError) as exc:
            resolve(parse_file(NAT + "def f (a : Nat) : Nat\n  | m => a\n"))
        assert exc.value.code == "E201"
