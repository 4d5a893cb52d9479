"""A type checker, evaluator, and GADT translator for a small dependent
language whose indexed data types select constructors by pattern matching
on the type's arguments."""

from .core import (
    BindPat,
    Clause,
    ConCall,
    ConPat,
    CtorRow,
    DataCall,
    DataDecl,
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
    alpha_eq,
    compose,
    disjoint_union,
    free_vars,
    pretty,
    subst,
)
from .coverage import Available, Undecidable, available_ctors, check_coverage
from .evaluator import Fuel, convertible, index_normal_form, normalize, whnf
from .frontend import parse_expression, parse_file, resolve, Resolver
from .pattern_ops import (
    Matched,
    Mismatch,
    Stuck,
    match_terms,
    to_term,
    to_terms,
    vars_pats,
    vars_tele,
)
from .translate import GeneralData, emit_general, synth_ctor_type, to_general
from .typecheck import (
    Context,
    EMPTY_CONTEXT,
    TypeChecker,
    check_args,
    check_clause,
    check_ctor_row,
    check_pattern,
    check_patterns,
    check_signature,
    check_term,
)

__version__ = "0.1.0"
