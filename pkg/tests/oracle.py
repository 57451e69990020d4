"""Independent reference implementations used to cross-check the package.

Everything here is written from the definitions in plain Python: its own
triangular membership arithmetic, its own grid-partition rule induction,
its own clip/max/centroid inference and its own fitness composition. The
package types (Dataset, LinguisticVariable) are used only as containers.
"""

import numpy as np


def tri_degree(x, a, b, c):
    if x < a or x > c:
        return 0.0
    if x == b:
        return 1.0
    if a < x < b:
        return (x - a) / (b - a)
    if b < x < c:
        return (c - x) / (c - b)
    return 0.0  # x == a < b, or x == c > b


def build_partition_params(lo, hi, n_terms):
    """Peak positions and (a, b, c) triples of the uniform partition."""
    if hi <= lo:
        lo, hi = lo - 0.5, lo + 0.5
    peaks = np.linspace(lo, hi, n_terms)
    triples = []
    for i in range(n_terms):
        triples.append(
            (
                float(peaks[max(i - 1, 0)]),
                float(peaks[i]),
                float(peaks[min(i + 1, n_terms - 1)]),
            )
        )
    return (float(lo), float(hi)), triples


def variable_params(var):
    """Extract ((lo, hi), [(a, b, c), ...]) from a triangular variable."""
    triples = [(mf.a, mf.b, mf.c) for _, mf in var.terms]
    return var.universe, triples


def clamp(x, lo, hi):
    return min(max(x, lo), hi)


def term_degrees(x, universe, triples):
    cx = clamp(x, *universe)
    return [tri_degree(cx, a, b, c) for a, b, c in triples]


def induce(records, labels, variables):
    """Candidate-and-filter rule induction.

    variables: list of ((lo, hi), [(a, b, c), ...]).
    Returns list of (antecedent term-index tuple, weight, class), ordered by
    the first record that proposed each surviving antecedent; conflicts keep
    the heaviest proposal, first proposer on ties.
    """
    proposals = {}
    order = []
    for r in range(len(records)):
        ant = []
        weight = 1.0
        for i, (universe, triples) in enumerate(variables):
            degrees = term_degrees(records[r][i], universe, triples)
            best_term, best_deg = 0, degrees[0]
            for t in range(1, len(degrees)):
                if degrees[t] > best_deg:
                    best_term, best_deg = t, degrees[t]
            ant.append(best_term)
            weight = weight * best_deg
        key = tuple(ant)
        if key not in proposals:
            proposals[key] = (weight, int(labels[r]))
            order.append(key)
        elif weight > proposals[key][0]:
            proposals[key] = (weight, int(labels[r]))
    return [(key, proposals[key][0], proposals[key][1]) for key in order]


OUTPUT_TRIPLES = [(0.0, 0.0, 1.0), (0.0, 1.0, 1.0)]  # negative, positive


def classify(record, variables, rules, resolution=1001, threshold=0.5):
    """One record through fuzzify -> fire -> clip/max -> centroid."""
    degrees = [
        term_degrees(record[i], universe, triples)
        for i, (universe, triples) in enumerate(variables)
    ]
    per_class = [0.0, 0.0]
    for ant, weight, cls in rules:
        strength = weight * min(degrees[i][t] for i, t in enumerate(ant))
        if strength > per_class[cls]:
            per_class[cls] = strength
    grid = np.linspace(0.0, 1.0, resolution)
    num = 0.0
    den = 0.0
    for y in grid:
        mu = max(
            min(per_class[0], tri_degree(y, *OUTPUT_TRIPLES[0])),
            min(per_class[1], tri_degree(y, *OUTPUT_TRIPLES[1])),
        )
        num += y * mu
        den += mu
    crisp = num / den if den > 0 else 0.5
    return crisp, int(crisp >= threshold)


def fold_accuracy(x_train, y_train, x_test, y_test, partitions,
                  resolution=1001, threshold=0.5, min_weight=0.0):
    variables = [
        build_partition_params(
            float(x_train[:, i].min()), float(x_train[:, i].max()), partitions
        )
        for i in range(x_train.shape[1])
    ]
    rules = [r for r in induce(x_train, y_train, variables)
             if r[1] >= min_weight]
    hits = 0
    for rec, label in zip(x_test, y_test):
        _, predicted = classify(rec, variables, rules, resolution, threshold)
        hits += predicted == label
    return hits / len(y_test)


def fitness(mask, data, costs, folds, cost_weight=0.3, partitions=3,
            resolution=1001, threshold=0.5, min_weight=0.0):
    """Re-evaluation of project -> induce -> infer -> score -> penalize.

    folds: the (train, test) index pairs of the evaluation plan (shared
    context; the classifier pipeline is recomputed from scratch).
    """
    kept = [i for i, bit in enumerate(mask) if bit]
    records = data.records[:, kept]
    accs = [
        fold_accuracy(
            records[tr], data.labels[tr], records[te], data.labels[te],
            partitions, resolution, threshold, min_weight,
        )
        for tr, te in folds
    ]
    cost = sum(c for bit, (_, c) in zip(mask, costs.entries) if bit)
    return float(np.mean(accs)) - cost_weight * cost / costs.total_cost
