"""Unification of condition patterns against working memory.

Matching is naive on purpose: working memories in this domain are tiny and
re-matching per cycle keeps the engine easy to audit.
"""

from .errors import MalformedValue
from .facts import Bindings, Fact, Pattern, Term, Var, bindings_digest, values_equal

__all__ = ["match_pattern", "match_conditions", "match_with_support"]


def _unify_term(term: Term, actual, bindings: Bindings) -> Bindings | None:
    if isinstance(term, Var):
        bound = bindings.get(term.name)
        if bound is None:
            extended = dict(bindings)
            extended[term.name] = actual
            return extended
        return bindings if values_equal(bound, actual) else None
    return bindings if values_equal(term, actual) else None


def match_pattern(
    pattern: Pattern, fact: Fact, bindings: Bindings
) -> Bindings | None:
    """Extend bindings so the pattern equals the fact, or return None.

    The incoming bindings are never mutated.
    """
    if pattern.negated:
        raise MalformedValue("negated patterns cannot be matched directly")
    b = bindings
    for term, actual in zip(pattern.terms(), (fact.entity, fact.attribute, fact.value)):
        b = _unify_term(term, actual, b)
        if b is None:
            return None
    return dict(b) if b is bindings else b


def _negation_holds(pattern: Pattern, wm, bindings: Bindings) -> bool:
    probe = Pattern(pattern.entity, pattern.attribute, pattern.value)
    return not any(match_pattern(probe, f, bindings) is not None for f in wm)


def match_with_support(
    conditions, wm_seq: dict[Fact, int]
) -> list[tuple[Bindings, int]]:
    """All consistent bindings plus the highest assertion seq they matched.

    Positive conditions are joined first; each negated condition must then
    have zero matches under the resulting bindings (unbound variables in a
    negated pattern act as wildcards). Results are deduplicated and ordered
    by the canonical rendering of their bindings.
    """
    positives = [c for c in conditions if not c.negated]
    negatives = [c for c in conditions if c.negated]
    if not positives:
        raise MalformedValue("conditions need at least one non-negated pattern")

    states: list[tuple[Bindings, int]] = [({}, 0)]
    for cond in positives:
        next_states = []
        for bindings, seq in states:
            for fact, fact_seq in wm_seq.items():
                extended = match_pattern(cond, fact, bindings)
                if extended is not None:
                    next_states.append((extended, max(seq, fact_seq)))
        states = next_states
        if not states:
            return []

    facts = list(wm_seq)
    survivors: dict[str, tuple[Bindings, int]] = {}
    for bindings, seq in states:
        if all(_negation_holds(n, facts, bindings) for n in negatives):
            digest = bindings_digest(bindings)
            prior = survivors.get(digest)
            if prior is None or seq > prior[1]:
                survivors[digest] = (bindings, seq)
    return [survivors[d] for d in sorted(survivors)]


def match_conditions(conditions, wm) -> list[Bindings]:
    """Every consistent binding set for the conditions over a fact set."""
    if isinstance(wm, dict):
        wm_seq = wm
    else:
        wm_seq = {f: 0 for f in wm}
    return [b for b, _ in match_with_support(conditions, wm_seq)]
