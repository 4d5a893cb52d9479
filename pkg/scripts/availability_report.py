#!/usr/bin/env python3
"""Tabulate constructor availability across enumerated index instantiations.

For each indexed data type in a file, every closed index tuple up to a depth
bound is matched against every constructor row, and the three outcomes are
counted. Tuples with one free variable show how often selection gets stuck.

Usage: availability_report.py [file.sit] [depth]
"""
from __future__ import annotations

import itertools
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sit.core import ConCall, DataDecl, Substitution, Var, VarCall, subst_telescope
from sit.frontend import parse_file, resolve
from sit.pattern_ops import Matched, Mismatch, match_terms
from sit.translate import as_pattern_row
from sit.typecheck import check_signature
from sit.coverage import Available, available_ctors, first_matching_row, instantiate_fields
from sit.evaluator import index_normal_form


def closed_tuples(sig, tele, depth):
    from sit.core import Telescope

    if not tele:
        yield ()
        return
    (x, ty), remaining = tele.entries[0], tele.entries[1:]
    for t in closed_terms(sig, ty, depth):
        refined = subst_telescope(Telescope(remaining), Substitution.of((x, t)))
        for more in closed_tuples(sig, refined, depth):
            yield (t,) + more


def closed_terms(sig, ty, depth):
    if depth <= 0:
        return
    ty = index_normal_form(sig, ty)
    from sit.core import DataCall, Univ

    if isinstance(ty, Univ):
        for decl in sig.decls:
            if isinstance(decl, DataDecl) and not decl.telescope:
                yield DataCall(decl.name, ())
        return
    if not isinstance(ty, DataCall):
        return
    indices = [index_normal_form(sig, a) for a in ty.args]
    av = available_ctors(sig, ty.name, indices)
    if not isinstance(av, Available):
        return
    decl = sig.data(ty.name)
    for ctor in dict.fromkeys(av.rows):
        _, row, sub, _ = first_matching_row(sig, decl, ctor, indices)
        fields = instantiate_fields(decl, row, indices, sub)
        for tup in closed_tuples(sig, fields, depth - 1):
            yield ConCall(ctor, tup)


def main() -> None:
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else None
    depth = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    if path is None:
        path = Path(__file__).resolve().parent.parent / "corpus" / "fin.sit"
    sig = check_signature(resolve(parse_file(path.read_text(), str(path))))
    for decl in sig.decls:
        if not isinstance(decl, DataDecl) or not decl.telescope:
            continue
        print(f"{decl.name} (depth <= {depth}):")
        counts: Counter = Counter()
        tuples = list(closed_tuples(sig, decl.telescope, depth))
        poked = [
            tup[:i] + (VarCall(Var.fresh("k")),) + tup[i + 1 :]
            for tup in tuples
            for i in range(len(tup))
        ]
        for tup in itertools.chain(tuples, poked):
            for row in decl.ctors:
                pats = as_pattern_row(decl, row).patterns
                out = match_terms(list(tup), pats)
                kind = (
                    "available"
                    if isinstance(out, Matched)
                    else "unavailable"
                    if isinstance(out, Mismatch)
                    else "stuck"
                )
                counts[(row.name, kind)] += 1
        width = max(len(r.name) for r in decl.ctors)
        for row in decl.ctors:
            a = counts[(row.name, "available")]
            u = counts[(row.name, "unavailable")]
            s = counts[(row.name, "stuck")]
            print(
                f"  {row.name:<{width}}  available {a:4d}   "
                f"unavailable {u:4d}   stuck {s:4d}"
            )
        print()


if __name__ == "__main__":
    main()
