#!/usr/bin/env python3
"""Emit the GADT-style form of every data declaration in the corpus."""
from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sit.core import DataDecl
from sit.frontend import parse_file, resolve
from sit.translate import emit_general, to_general
from sit.typecheck import check_signature

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def main() -> None:
    for path in sorted(CORPUS.glob("*.sit")):
        sig = check_signature(resolve(parse_file(path.read_text(), str(path))))
        print(f"-- {path.name}")
        for decl in sig.decls:
            if isinstance(decl, DataDecl):
                print(emit_general(to_general(sig, decl)))


if __name__ == "__main__":
    main()
