"""Canonical pretty-printer.

Output always uses the Unicode glyphs and ``°`` name separators, desugars
infix applications to prefix form, drops comments, and indents proof bodies
by two spaces per level.  Formatting is idempotent and its output reparses
to an AST equal to the input (spans aside).
"""

from __future__ import annotations

from .nodes import (
    Axiom, ByCasesProof, CaseBlock, FormulaicBody, FunctionDecl, Justification,
    LinearProof, OperatorDecl, ProductBody, Program, ProofBody, Quantifier,
    RuleJustification, Term, TheoremDecl, TypeDecl, TypeExpr,
)


def format_type(ty: TypeExpr) -> str:
    if ty.args:
        return f"{ty.name}[{', '.join(format_type(a) for a in ty.args)}]"
    return ty.name


def format_term(term: Term, annotations: dict[str, TypeExpr] | None = None) -> str:
    """Render a term; ``annotations`` marks metavariables whose first
    occurrence should carry an inline ``: Type`` annotation."""
    head = term.head
    if annotations is not None and not term.args and not term.type_args and head in annotations:
        ty = annotations.pop(head)
        return f"{head}: {format_type(ty)}"
    out = head
    if term.type_args:
        out += f"[{', '.join(format_type(t) for t in term.type_args)}]"
    if term.args:
        out += f"({', '.join(format_term(a, annotations) for a in term.args)})"
    return out


def format_quantifier(q: Quantifier) -> str:
    return f"∀{q.var} ∈ {format_type(q.domain)}"


def format_justification(j: Justification) -> str:
    if isinstance(j, RuleJustification):
        if len(j.names) == 1:
            return j.names[0]
        return f"({', '.join(j.names)})"
    rendered = ", ".join(format_quantifier(b) for b in j.bindings)
    return rendered if len(j.bindings) == 1 else f"({rendered})"


def _format_axiom(ax: Axiom) -> str:
    annotations = dict(ax.metavar_types)
    lhs = format_term(ax.lhs, annotations)
    rhs = format_term(ax.rhs, annotations)
    return f"{ax.name}: {lhs} ↔ {rhs}"


def _format_linear(proof: LinearProof, indent: int) -> list[str]:
    pad = " " * indent
    lines = []
    for step in proof.steps:
        line = f"{pad}{step.index}. {format_term(step.term)}"
        if step.justification is not None:
            line += f" via {format_justification(step.justification)}"
        lines.append(line)
    return lines


def _format_by_cases(proof: ByCasesProof, indent: int) -> list[str]:
    pad = " " * indent
    subjects = proof.subjects[0] if len(proof.subjects) == 1 else f"({', '.join(proof.subjects)})"
    summands = " U ".join(format_type(s) for s in proof.stated_summands)
    lines = [f"{pad}proof by cases of {subjects} using {format_type(proof.scrutinee)} = {summands}"]
    for case in proof.cases:
        lines.extend(_format_case(case, indent + 2))
    return lines


def _format_case(case: CaseBlock, indent: int) -> list[str]:
    pad = " " * indent
    header = f"{pad}case "
    if case.label is not None:
        header += f"{case.label}: "
    header += ", ".join(format_quantifier(q) for q in case.ranges) + ":"
    if case.restated is not None:
        header += f" {format_term(case.restated[0])} ↔ {format_term(case.restated[1])}"
    lines = [header]
    lines.extend(_format_proof_body(case.body, indent + 2))
    return lines


def _format_proof_body(body: ProofBody, indent: int) -> list[str]:
    if isinstance(body, LinearProof):
        return _format_linear(body, indent)
    return _format_by_cases(body, indent)


def _format_statement(stmt) -> str:
    if isinstance(stmt, TypeDecl):
        name = stmt.name
        if stmt.params:
            name += f"[{', '.join(stmt.params)}]"
        if isinstance(stmt.body, ProductBody):
            inner = ", ".join(f"{label}: {format_type(ty)}" for label, ty in stmt.body.fields)
            return f"type {name} ≡ Product[{inner}]"
        inner = ", ".join(format_type(s) for s in stmt.body.summands)
        return f"type {name} ≡ Sum[{inner}]"

    if isinstance(stmt, FunctionDecl):
        name = stmt.name
        if stmt.type_params:
            name += f"[{', '.join(stmt.type_params)}]"
        params = ", ".join(f"{p}: {format_type(t)}" for p, t in stmt.params)
        head = f"function {name}({params}) : {format_type(stmt.return_type)}"
        if isinstance(stmt.body, FormulaicBody):
            return f"{head} ≡ {format_term(stmt.body.term)}"
        lines = [head]
        lead = "  allowing "
        for i, ax in enumerate(stmt.body.axioms):
            prefix = lead if i == 0 else " " * len(lead)
            lines.append(prefix + _format_axiom(ax))
        return "\n".join(lines)

    if isinstance(stmt, OperatorDecl):
        return f"operator {stmt.glyph} ≡ {stmt.function_name}"

    if isinstance(stmt, TheoremDecl):
        header = f"theorem ¶{stmt.name}:"
        if stmt.quantifiers:
            header += " " + ", ".join(format_quantifier(q) for q in stmt.quantifiers) + ":"
        header += f" {format_term(stmt.lhs)} ↔ {format_term(stmt.rhs)}"
        if isinstance(stmt.proof, LinearProof):
            lines = [header, "proof"]
            lines.extend(_format_linear(stmt.proof, 2))
        else:
            lines = [header]
            lines.extend(_format_by_cases(stmt.proof, 0))
        return "\n".join(lines)

    raise TypeError(f"cannot format node of type {type(stmt).__name__}")


def format_node(node) -> str:
    """Render a Program, Statement or Term back to canonical source."""
    if isinstance(node, Program):
        return "\n".join(_format_statement(s) for s in node.statements) + "\n"
    if isinstance(node, Term):
        return format_term(node)
    if isinstance(node, TypeExpr):
        return format_type(node)
    return _format_statement(node)
