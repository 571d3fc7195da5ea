"""First-order matching, substitution and single-step justified rewriting.

Axioms, formulaic function bodies and theorem assertions are equivalences,
so every rule applies in both directions.  A justified step is checked by
enumerating, in a fixed deterministic order, every term reachable from the
previous term under the step's clause:

* a single rule name licenses exactly one application at one position;
* a tuple of names licenses simultaneous applications at pairwise disjoint
  positions, one per listed name, in any mix of directions;
* a case range licenses constant introduction (substituting the bound
  constructors for their metavariables at every occurrence) or constant
  elimination (the reverse, apportioning occurrences over the bound
  metavariables in any way that makes the terms line up).

Enumeration order is leftmost-outermost positions, forward before backward,
which also fixes the witness recorded for steps with several derivations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping

from .diagnostics import Diagnostic, error
from .syntax import (
    CaseRangeJustification, EquationalBody, FormulaicBody, Justification,
    Quantifier, RuleJustification, Term, TypeExpr, format_justification,
    format_term,
)
from .typesys import Registry

#: A substitution is a finite map from metavariable names to terms.
Substitution = dict[str, Term]

#: A position is the path of child indices from the root of a term.
Position = tuple[int, ...]


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class RuleSource(Enum):
    AXIOM = "axiom"
    FORMULAIC = "formulaic-function"
    THEOREM = "theorem"
    CASE_RANGE = "case-range"


@dataclass(frozen=True)
class RewriteRule:
    """An oriented rewrite rule; equivalences yield one rule per direction."""

    name: str
    source: RuleSource
    lhs: Term
    rhs: Term
    direction: Direction = Direction.FORWARD
    metavars: frozenset[str] = frozenset()
    binding_quantifiers: tuple[tuple[str, Term], ...] = ()

    def reversed(self) -> "RewriteRule":
        flipped = Direction.BACKWARD if self.direction is Direction.FORWARD else Direction.FORWARD
        return RewriteRule(self.name, self.source, self.lhs, self.rhs, flipped,
                           self.metavars, self.binding_quantifiers)

    def oriented(self) -> tuple[Term, Term]:
        if self.direction is Direction.FORWARD:
            return self.lhs, self.rhs
        return self.rhs, self.lhs


@dataclass(frozen=True)
class StepVerdict:
    justified: bool
    witness: tuple[tuple[Position, RewriteRule, Mapping[str, Term]], ...] | None = None
    failure: Diagnostic | None = None


@dataclass(frozen=True)
class StepEnv:
    """Context a justification is resolved in: the registry plus the case
    bindings active at this point of the proof."""

    registry: Registry
    case_bindings: tuple[Quantifier, ...] = ()
    current_theorem: str | None = None


# ---------------------------------------------------------------- matching

def match(pattern: Term, subject: Term, pattern_vars: frozenset[str] | set[str],
          bindings: Substitution | None = None) -> Substitution | None:
    """First-order, non-unifying match of ``pattern`` against ``subject``.

    Subject metavariables are treated as constants; nonlinear patterns
    require syntactically equal subterms.  Returns the substitution, or
    None when there is no match.
    """
    sigma: Substitution = {} if bindings is None else dict(bindings)
    if _match_into(pattern, subject, pattern_vars, sigma):
        return sigma
    return None


def _match_into(pattern: Term, subject: Term, pattern_vars, sigma: Substitution) -> bool:
    if pattern.head in pattern_vars and not pattern.args and not pattern.type_args:
        bound = sigma.get(pattern.head)
        if bound is None:
            sigma[pattern.head] = subject
            return True
        return bound == subject
    if pattern.head != subject.head or pattern.type_args != subject.type_args:
        return False
    if len(pattern.args) != len(subject.args):
        return False
    return all(_match_into(p, s, pattern_vars, sigma) for p, s in zip(pattern.args, subject.args))


def apply_substitution(sigma: Mapping[str, Term], term: Term) -> Term:
    """Replace every bound metavariable simultaneously."""
    if term.head in sigma and not term.args and not term.type_args:
        return sigma[term.head]
    if not term.args:
        return term
    return Term(term.head, term.type_args, tuple(apply_substitution(sigma, a) for a in term.args), term.span)


def positions(term: Term) -> list[tuple[Position, Term]]:
    """All positions in leftmost-outermost (pre-order) order."""
    out: list[tuple[Position, Term]] = []

    def walk(t: Term, path: Position) -> None:
        out.append((path, t))
        for i, child in enumerate(t.args):
            walk(child, path + (i,))

    walk(term, ())
    return out


def subterm_at(term: Term, path: Position) -> Term:
    for i in path:
        term = term.args[i]
    return term


def replace_at(term: Term, path: Position, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    args = list(term.args)
    args[i] = replace_at(args[i], path[1:], new)
    return Term(term.head, term.type_args, tuple(args), term.span)


def term_vars(term: Term, registry: Registry) -> set[str]:
    out: set[str] = set()
    if not term.args and not term.type_args \
            and term.head not in registry.types and term.head not in registry.functions:
        out.add(term.head)
    for a in term.args:
        out |= term_vars(a, registry)
    return out


# ------------------------------------------------------------------- rules

def axiom_rules(registry: Registry) -> list[RewriteRule]:
    rules = []
    for name, (axiom, owner) in registry.axioms.items():
        metavars = frozenset(registry.axiom_metavars(axiom, owner))
        rules.append(RewriteRule(name, RuleSource.AXIOM, axiom.lhs, axiom.rhs, metavars=metavars))
    return rules


def formulaic_rules(registry: Registry) -> list[RewriteRule]:
    rules = []
    for fn in registry.functions.values():
        if isinstance(fn.body, FormulaicBody):
            lhs = Term(fn.name, (), tuple(Term(p) for p, _ in fn.params))
            metavars = frozenset(p for p, _ in fn.params)
            rules.append(RewriteRule(fn.name, RuleSource.FORMULAIC, lhs, fn.body.term, metavars=metavars))
    return rules


def theorem_rules(registry: Registry, exclude: str | None = None) -> list[RewriteRule]:
    rules = []
    for thm in registry.theorems.values():
        if thm.name == exclude:
            continue
        metavars = frozenset(q.var for q in thm.quantifiers)
        rules.append(RewriteRule(thm.name, RuleSource.THEOREM, thm.lhs, thm.rhs, metavars=metavars))
    return rules


def resolve_rule(name: str, env: StepEnv) -> RewriteRule | Diagnostic:
    """Look up a rule by the name written in a ``via`` clause."""
    registry = env.registry
    if name.startswith("$"):
        entry = registry.axioms.get(name)
        if entry is None:
            return error("E-UNKNOWN-RULE", f"unknown axiom {name}")
        axiom, owner = entry
        metavars = frozenset(registry.axiom_metavars(axiom, owner))
        return RewriteRule(name, RuleSource.AXIOM, axiom.lhs, axiom.rhs, metavars=metavars)
    fn = registry.functions.get(name)
    if fn is not None:
        if isinstance(fn.body, EquationalBody):
            return error(
                "E-UNKNOWN-RULE",
                f"equational function {name!r} is not a rule; justify with one of its axioms",
            )
        lhs = Term(fn.name, (), tuple(Term(p) for p, _ in fn.params))
        return RewriteRule(name, RuleSource.FORMULAIC, lhs, fn.body.term,
                           metavars=frozenset(p for p, _ in fn.params))
    thm = registry.theorems.get(name)
    if thm is not None:
        if name == env.current_theorem:
            return error("E-UNKNOWN-RULE", f"theorem ¶{name} cannot justify its own proof")
        return RewriteRule(name, RuleSource.THEOREM, thm.lhs, thm.rhs,
                           metavars=frozenset(q.var for q in thm.quantifiers))
    return error("E-UNKNOWN-RULE", f"unknown rule name {name!r}")


# ------------------------------------------------------- single rule steps

def enumerate_rewrites(term: Term, rule: RewriteRule) -> list[tuple[Position, Term]]:
    """Every single application of ``rule`` (oriented per its direction),
    in leftmost-outermost position order."""
    return [(pos, res) for pos, res, _ in _applications(term, rule)]


def _applications(term: Term, rule: RewriteRule) -> list[tuple[Position, Term, Substitution]]:
    src, dst = rule.oriented()
    out = []
    for pos, sub in positions(term):
        sigma = match(src, sub, rule.metavars)
        if sigma is None:
            continue
        # Metavariables of the target side must be determined by the match;
        # a rule may not invent terms out of thin air in this direction.
        dst_vars = {v for v in rule.metavars if _occurs(dst, v)}
        if not dst_vars <= sigma.keys():
            continue
        out.append((pos, replace_at(term, pos, apply_substitution(sigma, dst)), sigma))
    return out


def _occurs(term: Term, var: str) -> bool:
    if term.head == var and not term.args and not term.type_args:
        return True
    return any(_occurs(a, var) for a in term.args)


def _both_directions(rule: RewriteRule) -> tuple[RewriteRule, RewriteRule]:
    return rule, rule.reversed()


def _disjoint(p: Position, q: Position) -> bool:
    shorter = min(len(p), len(q))
    return p[:shorter] != q[:shorter]


def _tuple_results(prev: Term, rules: list[RewriteRule]) -> Iterator[tuple[Term, tuple]]:
    """Simultaneous application of one rewrite per rule at pairwise disjoint
    positions.  Rules are assigned in listed order; every direction mix is
    tried, leftmost-outermost first."""

    def stage(term: Term, idx: int, used: list[Position], witness: list) -> Iterator[tuple[Term, tuple]]:
        if idx == len(rules):
            yield term, tuple(witness)
            return
        for oriented in _both_directions(rules[idx]):
            # Positions are enumerated against the original term so that
            # disjointness and ordering are independent of earlier rewrites.
            for pos, _, sigma in _applications(prev, oriented):
                if any(not _disjoint(pos, u) for u in used):
                    continue
                src, dst = oriented.oriented()
                replaced = replace_at(term, pos, apply_substitution(sigma, dst))
                witness.append((pos, oriented, dict(sigma)))
                used.append(pos)
                yield from stage(replaced, idx + 1, used, witness)
                used.pop()
                witness.pop()

    yield from stage(prev, 0, [], [])


# ---------------------------------------------------------- case ranges

def constructor_term(ty: TypeExpr) -> Term:
    """Ground constructor term for a case-range summand (e.g. ``False``)."""
    return Term(ty.name, ty.args, ())


def _case_sigma(bindings: tuple[Quantifier, ...]) -> Substitution:
    return {q.var: constructor_term(q.domain) for q in bindings}


def _validate_case_bindings(just: CaseRangeJustification, env: StepEnv) -> Diagnostic | None:
    active = {q.var: q.domain for q in env.case_bindings}
    for q in just.bindings:
        bound = active.get(q.var)
        if bound is None:
            return error(
                "E-UNJUSTIFIED-STEP",
                f"case range {format_justification(just)} refers to {q.var!r}, "
                f"which is not bound by an enclosing case",
                just.span,
            )
        if bound != q.domain:
            return error(
                "E-UNJUSTIFIED-STEP",
                f"case range binds {q.var} ∈ {q.domain.name}, but the enclosing case "
                f"binds {q.var} ∈ {bound.name}",
                just.span,
            )
    return None


def _occurrence_positions(term: Term, target: Term) -> list[Position]:
    return [pos for pos, sub in positions(term) if sub == target]


def _case_results(prev: Term, just: CaseRangeJustification, env: StepEnv) -> list[tuple[Term, tuple]]:
    """Constant introduction first, then every elimination assignment."""
    sigma = _case_sigma(just.bindings)
    rule = RewriteRule(
        format_justification(just), RuleSource.CASE_RANGE, prev, prev,
        binding_quantifiers=tuple(sorted((v, t) for v, t in sigma.items())),
    )
    results: list[tuple[Term, tuple]] = []

    introduced = apply_substitution(sigma, prev)
    if introduced != prev:
        results.append((introduced, (((), rule, dict(sigma)),)))

    # Elimination: group the bound metavariables by their constructor term,
    # then replace every occurrence of each constructor, trying every
    # apportionment of occurrences over the variables of its group.
    groups: dict[Term, list[str]] = {}
    for q in just.bindings:
        groups.setdefault(constructor_term(q.domain), []).append(q.var)

    candidates: list[Term] = [prev]
    replaced_any = False
    for ctor, vars_ in groups.items():
        occ = _occurrence_positions(prev, ctor)
        if not occ:
            continue
        replaced_any = True
        new_candidates = []
        for base in candidates:
            new_candidates.extend(_assign_occurrences(base, occ, vars_))
        candidates = new_candidates
    if replaced_any:
        seen = set()
        for cand in candidates:
            if cand != prev and cand not in seen:
                seen.add(cand)
                results.append((cand, (((), rule, dict(sigma)),)))
    return results


def _assign_occurrences(term: Term, occurrences: list[Position], vars_: list[str]) -> list[Term]:
    out = [term]
    for pos in occurrences:
        out = [replace_at(t, pos, Term(v)) for t in out for v in vars_]
    # Deduplicate while preserving the deterministic construction order.
    seen: set[Term] = set()
    unique = []
    for t in out:
        if t not in seen:
            seen.add(t)
            unique.append(t)
    return unique


# ------------------------------------------------------------ clause engine

def clause_results(prev: Term, just: Justification, env: StepEnv) -> list[tuple[Term, tuple]] | Diagnostic:
    """Deterministically ordered list of terms reachable from ``prev`` in one
    justified step under ``just``, each paired with its witness.

    For case ranges, elimination results are the full-replacement
    apportionments; ``check_justified_step`` is more permissive there (any
    term whose substitution instance is ``prev`` is accepted).
    """
    if isinstance(just, CaseRangeJustification):
        bad = _validate_case_bindings(just, env)
        if bad is not None:
            return bad
        return _case_results(prev, just, env)

    rules = []
    for name in just.names:
        rule = resolve_rule(name, env)
        if isinstance(rule, Diagnostic):
            return rule
        rules.append(rule)
    if len(rules) == 1:
        results = []
        for oriented in _both_directions(rules[0]):
            for pos, res, sigma in _applications(prev, oriented):
                results.append((res, ((pos, oriented, dict(sigma)),)))
        return results
    collected = []
    for res, witness in _tuple_results(prev, rules):
        collected.append((res, witness))
    return collected


def check_justified_step(prev: Term, next_term: Term, just: Justification, env: StepEnv) -> StepVerdict:
    """Is the transition from ``prev`` to ``next_term`` licensed by ``just``?

    The check is direction-symmetric: a justified step read backwards is
    justified by the same clause.
    """
    if isinstance(just, CaseRangeJustification):
        bad = _validate_case_bindings(just, env)
        if bad is not None:
            return StepVerdict(False, failure=bad)
        sigma = _case_sigma(just.bindings)
        # Introduction substitutes the bound constructors into prev;
        # elimination is its mirror image, which accepts any apportionment
        # of constructor occurrences over the bound metavariables.
        if apply_substitution(sigma, prev) == next_term or apply_substitution(sigma, next_term) == prev:
            rule = RewriteRule(
                format_justification(just), RuleSource.CASE_RANGE, prev, next_term,
                binding_quantifiers=tuple(sorted((q.var, constructor_term(q.domain)) for q in just.bindings)),
            )
            return StepVerdict(True, witness=(((), rule, dict(sigma)),))
        return StepVerdict(False, failure=_unjustified(prev, next_term, just))

    outcomes = clause_results(prev, just, env)
    if isinstance(outcomes, Diagnostic):
        return StepVerdict(False, failure=outcomes)
    for res, witness in outcomes:
        if res == next_term:
            return StepVerdict(True, witness=witness)
    return StepVerdict(False, failure=_unjustified(prev, next_term, just))


def _unjustified(prev: Term, next_term: Term, just: Justification) -> Diagnostic:
    if isinstance(just, RuleJustification) and len(just.names) == 1:
        kind = "axiom" if just.names[0].startswith("$") else "rule"
        what = f"{kind} {just.names[0]} does"
    elif isinstance(just, RuleJustification):
        what = f"rules {format_justification(just)} do"
    else:
        what = f"case range {format_justification(just)} does"
    return error(
        "E-UNJUSTIFIED-STEP",
        f"{what} not transform {format_term(prev)} into {format_term(next_term)}",
        just.span,
    )
