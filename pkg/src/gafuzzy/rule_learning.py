"""Building a rule base: induction from labelled data, or an expert file.

Induction follows the classic grid-partition recipe: every training record
proposes the rule made of its maximum-degree term per input, weighted by
the product of those degrees; conflicting proposals for the same
antecedent are resolved by keeping the heaviest (earliest on ties).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .errors import ArityMismatch, ConfigError, EmptyTrainingSet, RuleParseError, UnknownTerm
from .fuzzy import FISConfig, LinguisticVariable, Rule


@dataclass(frozen=True)
class InductionConfig:
    partitions_per_input: int = 3
    min_rule_weight: float = 0.0

    def __post_init__(self):
        if self.partitions_per_input < 2:
            raise ConfigError("partitions_per_input must be at least 2")
        if not 0.0 <= self.min_rule_weight <= 1.0:
            raise ConfigError("min_rule_weight must lie in [0, 1]")


def induce_candidates(
    records: np.ndarray,
    labels: np.ndarray,
    inputs: Sequence[LinguisticVariable],
) -> tuple[np.ndarray, np.ndarray]:
    """Per record: the index of the strongest term for every input, and the
    product of those degrees. Ties on degree go to the earlier term.

    Returns (term_indices (N, m), weights (N,)).
    """
    records = np.asarray(records, dtype=float)
    n, m = records.shape
    if m != len(inputs):
        raise ArityMismatch(f"{m} columns for {len(inputs)} input variables")
    term_idx = np.zeros((n, m), dtype=np.int64)
    weights = np.ones(n)
    for i, var in enumerate(inputs):
        lo, hi = var.universe
        col = np.clip(records[:, i], lo, hi)
        degrees = np.stack([mf.sample(col) for _, mf in var.terms])  # (T, N)
        term_idx[:, i] = degrees.argmax(axis=0)
        weights *= degrees.max(axis=0)
    return term_idx, weights


def induce_rule_matrix(
    records: np.ndarray,
    labels: np.ndarray,
    inputs: Sequence[LinguisticVariable],
    cfg: InductionConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Candidate-and-filter induction in index form.

    Returns (antecedents (R, m), weights (R,), classes (R,)), ordered by the
    first record that proposed each surviving antecedent.
    """
    if len(records) == 0:
        raise EmptyTrainingSet("cannot induce rules from an empty training set")
    term_idx, weights = induce_candidates(records, labels, inputs)
    n, m = term_idx.shape
    sizes = np.array([len(v.terms) for v in inputs], dtype=np.int64)
    keys = np.zeros(n, dtype=np.int64)
    stride = 1
    for i in range(m):
        keys += term_idx[:, i] * stride
        stride *= sizes[i]

    best: dict[int, int] = {}  # antecedent key -> winning record index
    first_seen: dict[int, int] = {}
    for r in range(n):
        k = int(keys[r])
        if k not in best:
            best[k] = r
            first_seen[k] = r
        elif weights[r] > weights[best[k]]:
            best[k] = r
    order = sorted(best, key=lambda k: first_seen[k])
    rows = [best[k] for k in order]
    keep = [r for r in rows if weights[r] >= cfg.min_rule_weight]
    ant = term_idx[keep]
    return ant, weights[keep], np.asarray(labels, dtype=np.int64)[keep]


def induce_rules(
    train: Dataset,
    inputs: Sequence[LinguisticVariable],
    output: LinguisticVariable,
    cfg: InductionConfig,
) -> tuple[Rule, ...]:
    """Induce a rule base from a labelled dataset.

    Input variables must match the dataset's feature columns in order, and
    the output variable's terms are taken in class order (term 0 for class
    0, term 1 for class 1).
    """
    names = [v.name for v in inputs]
    if names != list(train.schema.feature_names):
        raise ArityMismatch(
            f"input variables {names} do not match dataset features "
            f"{list(train.schema.feature_names)}"
        )
    if len(output.terms) < 2:
        raise ConfigError("output variable needs one term per class")
    ant, weights, classes = induce_rule_matrix(
        train.records, train.labels, inputs, cfg
    )
    out_terms = output.term_names
    rules = []
    for row, w, cls in zip(ant, weights, classes):
        antecedent = tuple(
            (inputs[i].name, inputs[i].term_names[int(t)])
            for i, t in enumerate(row)
        )
        rules.append(Rule(antecedent, out_terms[int(cls)], float(w)))
    return tuple(rules)


# --- expert rule files -------------------------------------------------------

_RULE_RE = re.compile(
    r"^\s*IF\s+(?P<body>.+?)\s+THEN\s+(?P<outvar>\S+)\s+IS\s+(?P<outterm>\S+)"
    r"(?:\s+WEIGHT\s+(?P<weight>\S+))?\s*$",
    re.IGNORECASE,
)
_CLAUSE_RE = re.compile(r"^\s*(?P<var>\S+)\s+IS\s+(?P<term>\S+)\s*$", re.IGNORECASE)


def parse_rule_line(line: str, line_no: int, config: FISConfig) -> Rule:
    match = _RULE_RE.match(line)
    if not match:
        raise RuleParseError(line_no, f"cannot parse rule: {line.strip()!r}")
    clauses = []
    for part in re.split(r"\s+AND\s+", match.group("body"), flags=re.IGNORECASE):
        clause = _CLAUSE_RE.match(part)
        if not clause:
            raise RuleParseError(line_no, f"cannot parse clause: {part.strip()!r}")
        clauses.append((clause.group("var"), clause.group("term")))
    weight = 1.0
    if match.group("weight") is not None:
        try:
            weight = float(match.group("weight"))
        except ValueError:
            raise RuleParseError(line_no, "weight is not a number") from None
    if match.group("outvar") != config.output.name:
        raise UnknownTerm(
            f"line {line_no}: unknown output variable {match.group('outvar')!r}"
        )
    by_name = {v.name: v for v in config.inputs}
    for var, term in clauses:
        if var not in by_name:
            raise UnknownTerm(f"line {line_no}: unknown variable {var!r}")
        if term not in by_name[var].term_names:
            raise UnknownTerm(
                f"line {line_no}: variable {var!r} has no term {term!r}"
            )
    if match.group("outterm") not in config.output.term_names:
        raise UnknownTerm(
            f"line {line_no}: output has no term {match.group('outterm')!r}"
        )
    try:
        return Rule(tuple(clauses), match.group("outterm"), weight)
    except ConfigError as exc:
        raise RuleParseError(line_no, str(exc)) from exc


def load_expert_rules(path: str | Path, config: FISConfig) -> tuple[Rule, ...]:
    """Parse a rule file (one rule per line, # comments and blanks allowed)."""
    rules = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            rules.append(parse_rule_line(stripped, line_no, config))
    return tuple(rules)


def format_rule(rule: Rule, output_name: str) -> str:
    body = " AND ".join(f"{var} IS {term}" for var, term in rule.antecedent)
    text = f"IF {body} THEN {output_name} IS {rule.consequent}"
    if rule.weight != 1.0:
        text += f" WEIGHT {rule.weight!r}"
    return text


def save_expert_rules(
    rules: Sequence[Rule], output_name: str, path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rule in rules:
            fh.write(format_rule(rule, output_name) + "\n")
