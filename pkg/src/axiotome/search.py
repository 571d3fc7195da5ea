"""Bounded search over justified rewrites: inference and proof repair.

``infer_step_justification`` finds a clause certifying one transition, in a
fixed preference order (axioms in registry order, forward before backward,
then case ranges, then function unfoldings, then theorems).

``fill_gap`` runs iterative-deepening DFS over single justified rewrites —
plus same-rule simultaneous tuples and case-range moves — and returns the
lexicographically first shortest chain under that move order.

``repair_proof`` fixes proofs whose steps are unjustified because terms were
omitted.  For a broken hop it splices the shortest chain between the two
written terms; the displaced ``via`` clause is then re-anchored by applying
it to the step's own term, which inserts the term its author skipped.  Vias
that cannot be re-anchored this way (genuinely wrong rule names) make the
proof irreparable-by-insertion, reported with a suggested replacement.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush

from .rewrite import (
    RewriteRule, StepEnv, axiom_rules, clause_results, _applications,
    _both_directions, _case_results, _disjoint, apply_substitution,
    check_justified_step, formulaic_rules, replace_at, term_vars, theorem_rules,
)
from .syntax import (
    ByCasesProof, CaseBlock, CaseRangeJustification, Justification, LinearProof,
    ProofBody, ProofStep, RuleJustification, Term, TheoremDecl,
)
from .typesys import Registry


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 4
    max_nodes: int = 50_000


@dataclass(frozen=True)
class JustifiedChain:
    """A validated sequence of justified hops from ``source`` to ``target``;
    the last step's term is ``target`` itself."""

    steps: tuple[tuple[Term, Justification], ...]
    source: Term
    target: Term


@dataclass(frozen=True)
class IrreparableStep:
    case_path: tuple[str, ...]
    step_index: int
    prev: Term
    term: Term
    justification: Justification | None
    suggestion: Justification | None


@dataclass(frozen=True)
class RepairOutcome:
    theorem: TheoremDecl | None
    inserted: tuple[tuple[tuple[str, ...], int, Term, Justification], ...] = ()
    irreparable: tuple[IrreparableStep, ...] = ()


# ------------------------------------------------------------------- moves

def _scoped(term: Term, scope: frozenset[str], registry: Registry) -> bool:
    return term_vars(term, registry) <= scope


def successor_moves(term: Term, env: StepEnv, scope: frozenset[str]) -> list[tuple[Justification, Term]]:
    """Single justified rewrites of ``term``, deterministically ordered.

    Per rule: forward single positions, a forward all-positions tuple when it
    applies at two or more disjoint positions, then the same backwards.
    Case-range introduction and elimination moves follow, then formulaic
    unfoldings and theorem applications.  Moves whose result mentions
    metavariables outside ``scope`` are dropped.
    """
    registry = env.registry
    moves: list[tuple[Justification, Term]] = []

    def rule_moves(rule: RewriteRule) -> None:
        for oriented in _both_directions(rule):
            apps = _applications(term, oriented)
            for pos, result, _ in apps:
                if _scoped(result, scope, registry):
                    moves.append((RuleJustification((rule.name,)), result))
            if len(apps) >= 2:
                chosen: list[tuple] = []
                for pos, _, sigma in apps:
                    if all(_disjoint(pos, c[0]) for c in chosen):
                        chosen.append((pos, sigma))
                if len(chosen) >= 2:
                    _, dst = oriented.oriented()
                    result = term
                    for pos, sigma in chosen:
                        result = replace_at(result, pos, apply_substitution(sigma, dst))
                    if _scoped(result, scope, registry):
                        moves.append((RuleJustification((rule.name,) * len(chosen)), result))

    for rule in axiom_rules(registry):
        rule_moves(rule)
    if env.case_bindings:
        clause = CaseRangeJustification(env.case_bindings)
        for result, _ in _case_results(term, clause, env):
            if _scoped(result, scope, registry):
                moves.append((clause, result))
    for rule in formulaic_rules(registry):
        rule_moves(rule)
    for rule in theorem_rules(registry, exclude=env.current_theorem):
        rule_moves(rule)
    return moves


# --------------------------------------------------------------- inference

def infer_step_justification(prev: Term, next_term: Term, env: StepEnv) -> Justification | None:
    """Depth-1 inference: the first clause, in preference order, certifying
    the transition from ``prev`` to ``next_term``."""
    for rule in axiom_rules(env.registry):
        clause = RuleJustification((rule.name,))
        if check_justified_step(prev, next_term, clause, env).justified:
            return clause
    for binding in env.case_bindings:
        clause = CaseRangeJustification((binding,))
        if check_justified_step(prev, next_term, clause, env).justified:
            return clause
    if len(env.case_bindings) > 1:
        clause = CaseRangeJustification(env.case_bindings)
        if check_justified_step(prev, next_term, clause, env).justified:
            return clause
    for rule in formulaic_rules(env.registry):
        clause = RuleJustification((rule.name,))
        if check_justified_step(prev, next_term, clause, env).justified:
            return clause
    for rule in theorem_rules(env.registry, exclude=env.current_theorem):
        clause = RuleJustification((rule.name,))
        if check_justified_step(prev, next_term, clause, env).justified:
            return clause
    return None


# --------------------------------------------------------------- gap search

class _NodesExhausted(Exception):
    pass


def fill_gap(source: Term, target: Term, env: StepEnv,
             budget: SearchBudget | None = None) -> JustifiedChain | None:
    """Shortest chain of justified hops from ``source`` to ``target``.

    Iterative-deepening DFS with the deterministic move order, so among
    equal-length chains the lexicographically first by (rule order,
    direction, position) is returned.  Expansion is capped by
    ``budget.max_nodes``.
    """
    budget = budget or SearchBudget()
    if source == target:
        return JustifiedChain((), source, target)
    registry = env.registry
    scope = term_vars(source, registry) | term_vars(target, registry) \
        | {q.var for q in env.case_bindings}
    scope_f = frozenset(scope)
    move_cache: dict[Term, list[tuple[Justification, Term]]] = {}
    nodes = 0

    def moves_of(term: Term) -> list[tuple[Justification, Term]]:
        nonlocal nodes
        cached = move_cache.get(term)
        if cached is None:
            nodes += 1
            if nodes > budget.max_nodes:
                raise _NodesExhausted
            cached = successor_moves(term, env, scope_f)
            move_cache[term] = cached
        return cached

    def dls(term: Term, remaining: int, visited: dict[Term, int]) \
            -> list[tuple[Term, Justification]] | None:
        if remaining == 0:
            return [] if term == target else None
        seen = visited.get(term)
        if seen is not None and seen >= remaining:
            return None
        visited[term] = remaining
        for clause, result in moves_of(term):
            if result == target:
                return [(result, clause)]
            if remaining > 1:
                tail = dls(result, remaining - 1, visited)
                if tail is not None:
                    return [(result, clause)] + tail
        return None

    try:
        for depth in range(1, budget.max_depth + 1):
            chain = dls(source, depth, {})
            if chain is not None:
                return JustifiedChain(tuple(chain), source, target)
    except _NodesExhausted:
        return None
    return None


# ------------------------------------------------------------------- repair

def _clause_images(term: Term, just: Justification, env: StepEnv) -> list[Term]:
    outcomes = clause_results(term, just, env)
    if isinstance(outcomes, list):
        seen = []
        for result, _ in outcomes:
            if result not in seen:
                seen.append(result)
        return seen
    return []


def _repair_segment(premiss: Term, steps: tuple[ProofStep, ...], env: StepEnv,
                    budget: SearchBudget) -> tuple[list[tuple[Term, Justification | None, bool]], int | None]:
    """Minimal-insertion repair of one linear segment.

    Returns (repaired step list, index of the first irreparable step or
    None).  Each entry of the step list is (term, justification, inserted?);
    kept steps preserve their written clause (or its absence) verbatim.
    Uniform-cost search over (consumed original steps, current term); costs
    count inserted steps.

    Strategies per original step (just, term) from the current term:
      keep      the hop already checks (or infers when the via is absent);
      fill      splice the shortest chain onto the step's term, accepted for
                via-less steps, or when the chain's last clause equals the
                written via (the written justification is then kept intact);
      displace  splice the chain, then re-anchor the written via by applying
                it to the step's own term, inserting the result as a new
                step (never applicable to a segment's final step).
    """
    n = len(steps)
    # The step to blame if repair fails: the first hop that does not check
    # on a plain sequential walk (the same step the verifier flags).
    first_broken: int | None = None
    walk = premiss
    for i, step in enumerate(steps):
        if step.justification is not None:
            ok = check_justified_step(walk, step.term, step.justification, env).justified
        else:
            ok = infer_step_justification(walk, step.term, env) is not None
        if not ok:
            first_broken = i
            break
        walk = step.term

    counter = 0
    start = (0, premiss)
    heap: list[tuple[int, int, tuple[int, Term], list]] = [(0, counter, start, [])]
    best: dict[tuple[int, Term], int] = {start: 0}
    final_term = steps[-1].term if steps else premiss

    while heap:
        cost, _, (k, cur), emitted = heappop(heap)
        if best.get((k, cur), cost) < cost:
            continue
        if k == n:
            if cur == final_term or n == 0:
                return emitted, None
            continue
        step = steps[k]
        just = step.justification

        def push(extra: list, new_cur: Term, added_cost: int) -> None:
            nonlocal counter
            state = (k + 1, new_cur)
            new_cost = cost + added_cost
            if best.get(state, new_cost + 1) <= new_cost:
                return
            best[state] = new_cost
            counter += 1
            heappush(heap, (new_cost, counter, state, emitted + extra))

        if just is not None:
            if check_justified_step(cur, step.term, just, env).justified:
                push([(step.term, just, False)], step.term, 0)
            else:
                chain = fill_gap(cur, step.term, env, budget)
                if chain is not None and chain.steps:
                    inserted = [(t, c, True) for t, c in chain.steps]
                    # fill: the chain independently rediscovers the written via
                    # for the final hop, so the original clause is preserved.
                    if chain.steps[-1][1] == just:
                        kept = inserted[:-1] + [(step.term, just, False)]
                        push(kept, step.term, len(chain.steps) - 1)
                if chain is not None and k + 1 < n:
                    # displace: the written via belongs one hop later.
                    prefix = [(t, c, True) for t, c in chain.steps]
                    for image in _clause_images(step.term, just, env):
                        push(prefix + [(image, just, True)], image, len(chain.steps))
        else:
            inferred = infer_step_justification(cur, step.term, env)
            if inferred is not None:
                push([(step.term, None, False)], step.term, 0)
            else:
                chain = fill_gap(cur, step.term, env, budget)
                if chain is not None and chain.steps:
                    push([(t, c, True) for t, c in chain.steps], step.term, len(chain.steps) - 1)

    # Search exhausted: blame the first sequentially broken hop.
    return [], (first_broken if first_broken is not None else max(n - 1, 0))


def _repair_body(body: ProofBody, lhs: Term, env: StepEnv, budget: SearchBudget,
                 path: tuple[str, ...], inserted: list, failures: list) -> ProofBody:
    if isinstance(body, ByCasesProof):
        new_cases = []
        for case in body.cases:
            case_env = StepEnv(env.registry, env.case_bindings + case.ranges, env.current_theorem)
            label = case.label or ", ".join(f"{q.var} ∈ {q.domain.name}" for q in case.ranges)
            new_body = _repair_body(case.body, lhs, case_env, budget, path + (label,), inserted, failures)
            new_cases.append(CaseBlock(case.label, case.ranges, case.restated, new_body, case.span))
        return ByCasesProof(body.subjects, body.scrutinee, body.stated_summands, tuple(new_cases))

    steps = body.steps
    if not steps:
        return body
    premiss = steps[0].term
    repaired, stuck_at = _repair_segment(premiss, steps[1:], env, budget)
    if stuck_at is not None:
        stuck = steps[1 + stuck_at]
        prev_term = steps[stuck_at].term
        failures.append(IrreparableStep(
            path, stuck.index, prev_term, stuck.term, stuck.justification,
            infer_step_justification(prev_term, stuck.term, env),
        ))
        return body
    new_steps = [ProofStep(0, premiss, None, steps[0].span)]
    for i, (term, clause, was_inserted) in enumerate(repaired, start=1):
        new_steps.append(ProofStep(i, term, clause))
        if was_inserted:
            inserted.append((path, i, term, clause))
    return LinearProof(tuple(new_steps))


def repair_theorem(thm: TheoremDecl, report, registry: Registry,
                   budget: SearchBudget | None = None) -> RepairOutcome:
    """Detailed repair: the patched theorem (or None), the inserted steps,
    and any steps that are irreparable by insertion."""
    budget = budget or SearchBudget()
    if report.accepted:
        return RepairOutcome(thm)
    error_codes = {d.code for d in report.diagnostics if d.severity.value == "error"}
    if not error_codes <= {"E-UNJUSTIFIED-STEP"}:
        return RepairOutcome(None)

    env = StepEnv(registry, (), thm.name)
    inserted: list = []
    failures: list = []
    new_proof = _repair_body(thm.proof, thm.lhs, env, budget, (), inserted, failures)
    if failures:
        return RepairOutcome(None, tuple(inserted), tuple(failures))
    patched = TheoremDecl(thm.name, thm.quantifiers, thm.lhs, thm.rhs, new_proof, thm.span)

    from .verifier import verify_theorem
    if not verify_theorem(patched, registry).accepted:
        return RepairOutcome(None, tuple(inserted), ())
    return RepairOutcome(patched, tuple(inserted), ())


def repair_proof(thm: TheoremDecl, report, registry: Registry,
                 budget: SearchBudget | None = None) -> TheoremDecl | None:
    """Patched theorem whose proof re-verifies as accepted, or None when a
    gap is unfillable within budget (or the failure is not gap-shaped)."""
    return repair_theorem(thm, report, registry, budget).theorem
