"""Shared fixtures: corpus loading and composed registries."""

from __future__ import annotations

from pathlib import Path

import pytest

from axiotome.syntax import OperatorDecl, Program, parse_program
from axiotome.typesys import Registry, build_registry

CORPUS = Path(__file__).parent / "corpus"

#: Type declarations shared by the boolean modules (the nullary supplement
#: first so the verbatim listings resolve).
BASE_TYPES = ["missing_nullary_types.axm", "product_types.axm", "sum_types.axm"]

#: Base types plus the three boolean connectives.
BOOL_FNS = BASE_TYPES + ["not_function.axm", "and_function.axm", "or_function.axm"]

#: The original core module: types, not/and, the formulaic example and the
#: two worked theorems.
CORE = BASE_TYPES + [
    "not_function.axm", "and_function.axm", "double_negation_function.axm",
    "not_not_false_theorem.axm", "and_left_false_theorem.axm",
]

#: All program fixtures (term_examples.axm is parsed in term mode instead).
PROGRAM_FIXTURES = sorted(
    p.name for p in CORPUS.glob("*.axm") if p.name != "term_examples.axm"
)


def corpus_path(name: str) -> Path:
    return CORPUS / name


def corpus_text(name: str) -> str:
    return corpus_path(name).read_text(encoding="utf-8")


def load_program(*names: str, operators: dict[str, str] | None = None) -> Program:
    """Parse the named fixtures and merge them in order, threading operator
    declarations from earlier files into later ones."""
    statements: list = []
    ops = dict(operators or {})
    for name in names:
        program = parse_program(corpus_text(name), name, dict(ops))
        statements.extend(program.statements)
        for stmt in program.statements:
            if isinstance(stmt, OperatorDecl):
                ops[stmt.glyph] = stmt.function_name
    return Program(tuple(statements), "+".join(names))


def load_registry(*names: str) -> Registry:
    registry, diags = build_registry(load_program(*names))
    errors = [d for d in diags if d.severity.value == "error"]
    assert not errors, [d.message for d in errors]
    return registry


@pytest.fixture(scope="session")
def bool_registry() -> Registry:
    return load_registry(*BOOL_FNS)


@pytest.fixture(scope="session")
def full_registry() -> Registry:
    return load_registry(*BOOL_FNS, "if_function.axm", "double_negation_function.axm")


@pytest.fixture(scope="session")
def core_registry() -> Registry:
    return load_registry(*CORE)
