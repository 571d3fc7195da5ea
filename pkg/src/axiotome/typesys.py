"""Declaration registry, well-formedness checks and term typing.

The registry is built in two passes (collect names, then resolve bodies) so
forward references work regardless of declaration order.  Product type names
double as constructor names; sum types have no constructor of their own.
Conformance is width subtyping through sums with invariant type arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, DiagnosticError, Span, error, warning
from .syntax import (
    Axiom, EquationalBody, FormulaicBody, FunctionDecl, OperatorDecl,
    ProductBody, Program, SumBody, Term, TheoremDecl, TypeDecl, TypeExpr,
    format_term, format_type,
)


@dataclass(frozen=True)
class ConstructorSignature:
    type_params: tuple[str, ...]
    fields: tuple[tuple[str, TypeExpr], ...]
    result_type: TypeExpr


@dataclass(frozen=True)
class TypingContext:
    """Metavariable types plus the type parameters currently in scope."""

    metavar_types: dict[str, TypeExpr] = field(default_factory=dict)
    type_params: frozenset[str] = frozenset()


@dataclass
class Registry:
    """Immutable-after-build view of every declaration in a program."""

    types: dict[str, TypeDecl] = field(default_factory=dict)
    functions: dict[str, FunctionDecl] = field(default_factory=dict)
    axioms: dict[str, tuple[Axiom, str]] = field(default_factory=dict)
    operators: dict[str, str] = field(default_factory=dict)
    theorems: dict[str, TheoremDecl] = field(default_factory=dict)

    def axiom_metavars(self, axiom: Axiom, owner: str) -> dict[str, TypeExpr]:
        """Metavariable typing for an axiom: the owning function's declared
        parameters plus the axiom's inline annotations."""
        fn = self.functions[owner]
        ctx = {name: ty for name, ty in fn.params}
        ctx.update(dict(axiom.metavar_types))
        return ctx


def substitute_type(ty: TypeExpr, bindings: dict[str, TypeExpr]) -> TypeExpr:
    if not ty.args:
        return bindings.get(ty.name, ty)
    return TypeExpr(ty.name, tuple(substitute_type(a, bindings) for a in ty.args), ty.span)


def build_registry(program: Program) -> tuple[Registry, list[Diagnostic]]:
    """Two-pass registry construction; duplicate and unresolved names are
    diagnosed but a best-effort registry is still returned (first wins)."""
    reg = Registry()
    diags: list[Diagnostic] = []

    def dup(kind: str, name: str, span: Span) -> None:
        diags.append(error("E-DUP-NAME", f"duplicate {kind} name {name!r}", span))

    for stmt in program.statements:
        if isinstance(stmt, TypeDecl):
            if stmt.name in reg.types or stmt.name in reg.functions:
                dup("type", stmt.name, stmt.span)
            else:
                reg.types[stmt.name] = stmt
        elif isinstance(stmt, FunctionDecl):
            if stmt.name in reg.functions or stmt.name in reg.types:
                dup("function", stmt.name, stmt.span)
            else:
                reg.functions[stmt.name] = stmt
                if isinstance(stmt.body, EquationalBody):
                    for ax in stmt.body.axioms:
                        if ax.name in reg.axioms:
                            dup("axiom", ax.name, ax.span)
                        else:
                            reg.axioms[ax.name] = (ax, stmt.name)
        elif isinstance(stmt, OperatorDecl):
            if stmt.glyph in reg.operators:
                dup("operator", stmt.glyph, stmt.span)
            else:
                reg.operators[stmt.glyph] = stmt.function_name
        elif isinstance(stmt, TheoremDecl):
            if stmt.name in reg.theorems:
                dup("theorem", stmt.name, stmt.span)
            else:
                reg.theorems[stmt.name] = stmt

    # Second pass: resolve type references now that all names are known.
    for decl in reg.types.values():
        scope = frozenset(decl.params)
        if isinstance(decl.body, ProductBody):
            for _, ty in decl.body.fields:
                diags.extend(_resolve_type(ty, scope, reg))
        else:
            for ty in decl.body.summands:
                diags.extend(_resolve_type(ty, scope, reg))
    for fn in reg.functions.values():
        scope = frozenset(fn.type_params)
        for _, ty in fn.params:
            diags.extend(_resolve_type(ty, scope, reg))
        diags.extend(_resolve_type(fn.return_type, scope, reg))
        if isinstance(fn.body, EquationalBody):
            for ax in fn.body.axioms:
                for _, ty in ax.metavar_types:
                    diags.extend(_resolve_type(ty, scope, reg))
    for op_glyph, op_fn in reg.operators.items():
        if op_fn not in reg.functions:
            diags.append(error("E-UNRESOLVED", f"operator {op_glyph} maps to undeclared function {op_fn!r}"))
    for thm in reg.theorems.values():
        for q in thm.quantifiers:
            diags.extend(_resolve_type(q.domain, frozenset(), reg))

    return reg, diags


def _resolve_type(ty: TypeExpr, scope: frozenset[str], reg: Registry) -> list[Diagnostic]:
    if ty.name in scope:
        if ty.args:
            return [error("E-ARITY", f"type parameter {ty.name!r} takes no arguments", ty.span)]
        return []
    decl = reg.types.get(ty.name)
    if decl is None:
        return [error("E-UNRESOLVED", f"reference to undeclared type {ty.name!r}", ty.span)]
    out: list[Diagnostic] = []
    if len(ty.args) != len(decl.params):
        out.append(error(
            "E-ARITY",
            f"type {ty.name!r} expects {len(decl.params)} type argument(s), got {len(ty.args)}",
            ty.span,
        ))
    for arg in ty.args:
        out.extend(_resolve_type(arg, scope, reg))
    return out


def conforms(sub: TypeExpr, sup: TypeExpr, reg: Registry) -> bool:
    """Structural equality, or membership in ``sup``'s summand closure.
    Type arguments are invariant."""
    if sub == sup:
        return True
    decl = reg.types.get(sup.name)
    if decl is None or not isinstance(decl.body, SumBody):
        return False
    bindings = dict(zip(decl.params, sup.args))
    return any(conforms(sub, substitute_type(s, bindings), reg) for s in decl.body.summands)


def constructor_signature(name: str, reg: Registry) -> ConstructorSignature:
    """Signature of the constructor implied by a product type definition."""
    decl = reg.types.get(name)
    if decl is None:
        raise DiagnosticError(error("E-UNRESOLVED", f"unknown type {name!r}"))
    if isinstance(decl.body, SumBody):
        raise DiagnosticError(error(
            "E-NO-CONSTRUCTOR", f"sum type {name!r} has no constructor of its own", decl.span,
        ))
    result = TypeExpr(name, tuple(TypeExpr(p) for p in decl.params))
    return ConstructorSignature(decl.params, decl.body.fields, result)


def join_types(t1: TypeExpr, t2: TypeExpr, reg: Registry) -> TypeExpr | None:
    """Least declared type both arguments conform to, if any."""
    if conforms(t1, t2, reg):
        return t2
    if conforms(t2, t1, reg):
        return t1
    for name, decl in reg.types.items():
        if isinstance(decl.body, SumBody) and not decl.params:
            candidate = TypeExpr(name)
            if conforms(t1, candidate, reg) and conforms(t2, candidate, reg):
                return candidate
    return None


def _solve_params(pattern: TypeExpr, actual: TypeExpr, params: set[str],
                  bindings: dict[str, TypeExpr], reg: Registry) -> None:
    if pattern.name in params and not pattern.args:
        seen = bindings.get(pattern.name)
        if seen is None:
            bindings[pattern.name] = actual
        elif seen != actual:
            joined = join_types(seen, actual, reg)
            if joined is None:
                raise DiagnosticError(error(
                    "E-TYPE-MISMATCH",
                    f"cannot reconcile {format_type(seen)} and {format_type(actual)} "
                    f"for type parameter {pattern.name!r}",
                    actual.span,
                ))
            bindings[pattern.name] = joined
        return
    if pattern.name == actual.name and len(pattern.args) == len(actual.args):
        for p, a in zip(pattern.args, actual.args):
            _solve_params(p, a, params, bindings, reg)


def _check_application(name: str, declared: tuple[tuple[str, TypeExpr], ...],
                       type_params: tuple[str, ...], explicit: tuple[TypeExpr, ...],
                       result: TypeExpr, term: Term, ctx: TypingContext, reg: Registry) -> TypeExpr:
    if explicit and len(explicit) != len(type_params):
        raise DiagnosticError(error(
            "E-ARITY",
            f"{name!r} expects {len(type_params)} type argument(s), got {len(explicit)}",
            term.span,
        ))
    if len(term.args) != len(declared):
        raise DiagnosticError(error(
            "E-ARITY",
            f"{name!r} expects {len(declared)} argument(s), got {len(term.args)}",
            term.span,
        ))
    bindings: dict[str, TypeExpr] = dict(zip(type_params, explicit))
    arg_types = [infer_type(a, ctx, reg) for a in term.args]
    params = set(type_params)
    if not explicit:
        for (_, pty), aty in zip(declared, arg_types):
            _solve_params(pty, aty, params, bindings, reg)
    for (pname, pty), aty, arg in zip(declared, arg_types, term.args):
        expected = substitute_type(pty, bindings)
        unsolved = _mentions_unsolved(expected, params, bindings)
        if not unsolved and not conforms(aty, expected, reg):
            raise DiagnosticError(error(
                "E-TYPE-MISMATCH",
                f"argument {format_term(arg)} of {name!r}: "
                f"{format_type(aty)} does not conform to {format_type(expected)}",
                arg.span,
            ))
    # Unsolved parameters stay symbolic (e.g. Nil's unused element type).
    return substitute_type(result, bindings)


def _mentions_unsolved(ty: TypeExpr, params: set[str], bindings: dict[str, TypeExpr]) -> bool:
    if ty.name in params and ty.name not in bindings:
        return True
    return any(_mentions_unsolved(a, params, bindings) for a in ty.args)


def infer_type(term: Term, ctx: TypingContext, reg: Registry) -> TypeExpr:
    """Most specific type of ``term``; raises DiagnosticError on failure."""
    if term.head in ctx.metavar_types:
        if term.args or term.type_args:
            raise DiagnosticError(error(
                "E-TYPE-MISMATCH", f"metavariable {term.head!r} cannot take arguments", term.span,
            ))
        return ctx.metavar_types[term.head]
    fn = reg.functions.get(term.head)
    if fn is not None:
        return _check_application(
            fn.name, fn.params, fn.type_params, term.type_args, fn.return_type, term, ctx, reg,
        )
    decl = reg.types.get(term.head)
    if decl is not None:
        if isinstance(decl.body, SumBody):
            raise DiagnosticError(error(
                "E-NO-CONSTRUCTOR", f"sum type {term.head!r} has no constructor", term.span,
            ))
        sig = constructor_signature(term.head, reg)
        return _check_application(
            term.head, sig.fields, sig.type_params, term.type_args, sig.result_type, term, ctx, reg,
        )
    if term.head in ctx.type_params:
        raise DiagnosticError(error(
            "E-UNRESOLVED", f"type parameter {term.head!r} used as a term", term.span,
        ))
    raise DiagnosticError(error("E-UNRESOLVED", f"unknown term head {term.head!r}", term.span))


def term_metavars(term: Term, reg: Registry) -> set[str]:
    """Nullary heads that resolve to neither a constructor nor a function."""
    out: set[str] = set()
    if not term.args and not term.type_args:
        if term.head not in reg.types and term.head not in reg.functions:
            out.add(term.head)
    for arg in term.args:
        out |= term_metavars(arg, reg)
    return out


def check_well_formed(reg: Registry) -> list[Diagnostic]:
    """Declaration-level checks beyond name resolution."""
    diags: list[Diagnostic] = []
    for decl in reg.types.values():
        if isinstance(decl.body, ProductBody):
            labels = [label for label, _ in decl.body.fields]
            for label in {x for x in labels if labels.count(x) > 1}:
                diags.append(error("E-DUP-NAME", f"duplicate field label {label!r} in {decl.name!r}", decl.span))
            if _recurses_through_products(decl.name, decl.name, reg, set()):
                diags.append(warning(
                    "W-INHABITATION",
                    f"product type {decl.name!r} recurses without an intervening sum and has no inhabitants",
                    decl.span,
                ))
    for fn in reg.functions.values():
        diags.extend(_check_function(fn, reg))
    return diags


def _recurses_through_products(root: str, current: str, reg: Registry, seen: set[str]) -> bool:
    decl = reg.types.get(current)
    if decl is None or not isinstance(decl.body, ProductBody):
        return False
    if current in seen:
        return current == root
    seen = seen | {current}
    for _, ty in decl.body.fields:
        target = reg.types.get(ty.name)
        if target is None or isinstance(target.body, SumBody):
            continue
        if ty.name == root or _recurses_through_products(root, ty.name, reg, seen):
            return True
    return False


def _check_function(fn: FunctionDecl, reg: Registry) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    names = [p for p, _ in fn.params]
    for name in {x for x in names if names.count(x) > 1}:
        diags.append(error("E-DUP-NAME", f"duplicate parameter {name!r} in function {fn.name!r}", fn.span))
    if isinstance(fn.body, FormulaicBody):
        ctx = TypingContext(dict(fn.params), frozenset(fn.type_params))
        try:
            body_ty = infer_type(fn.body.term, ctx, reg)
            if not conforms(body_ty, fn.return_type, reg) and body_ty != fn.return_type:
                diags.append(error(
                    "E-TYPE-MISMATCH",
                    f"body of {fn.name!r} has type {format_type(body_ty)}, "
                    f"expected {format_type(fn.return_type)}",
                    fn.body.term.span,
                ))
        except DiagnosticError as exc:
            diags.extend(exc.diagnostics)
        return diags

    seen_axioms: list[str] = []
    for ax in fn.body.axioms:
        if ax.name in seen_axioms:
            continue  # global duplicate already reported by build_registry
        seen_axioms.append(ax.name)
        if ax.lhs.head != fn.name:
            diags.append(error(
                "E-TYPE-MISMATCH",
                f"axiom {ax.name} must rewrite an application of {fn.name!r}, "
                f"its left-hand side is {format_term(ax.lhs)}",
                ax.span,
            ))
            continue
        metavars = reg.axiom_metavars(ax, fn.name)
        ctx = TypingContext(metavars, frozenset(fn.type_params))
        try:
            lhs_ty = infer_type(ax.lhs, ctx, reg)
            rhs_ty = infer_type(ax.rhs, ctx, reg)
        except DiagnosticError as exc:
            diags.extend(exc.diagnostics)
            continue
        for side, ty in (("left", lhs_ty), ("right", rhs_ty)):
            if ty != fn.return_type and not conforms(ty, fn.return_type, reg) \
                    and not _is_param(ty, fn.type_params):
                diags.append(error(
                    "E-TYPE-MISMATCH",
                    f"axiom {ax.name}: {side}-hand side has type {format_type(ty)}, "
                    f"which does not conform to {format_type(fn.return_type)}",
                    ax.span,
                ))
        unbound = term_metavars(ax.rhs, reg) - set(metavars)
        for name in sorted(unbound):
            diags.append(error(
                "E-UNRESOLVED",
                f"axiom {ax.name}: {name!r} is neither a declared name, a parameter "
                f"of {fn.name!r}, nor annotated with a type",
                ax.span,
            ))
        unbound_lhs = term_metavars(ax.lhs, reg) - set(metavars)
        for name in sorted(unbound_lhs):
            diags.append(error(
                "E-UNRESOLVED",
                f"axiom {ax.name}: {name!r} is neither a declared name, a parameter "
                f"of {fn.name!r}, nor annotated with a type",
                ax.span,
            ))
    return diags


def _is_param(ty: TypeExpr, type_params: tuple[str, ...]) -> bool:
    return not ty.args and ty.name in type_params
