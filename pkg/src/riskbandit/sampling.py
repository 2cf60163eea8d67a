"""
Weighted sampling without replacement.

Drawing users with probability proportional to their weight and rejecting
duplicates until ``size`` distinct users are held produces the same set
distribution as ranking exponential keys ``E_u / w_u`` and keeping the
``size`` smallest. The key form vectorises over many independent draws.
"""
import itertools

import numpy as np


def weighted_sample(weights, size, rng, draws=None):
    """
    Draw ``size`` distinct indices with probability proportional to ``weights``.

    Zero-weight indices are never drawn; callers must ensure at least ``size``
    positive weights. With ``draws`` set, returns a ``(draws, size)`` array of
    independent samples, otherwise a 1-d array. Indices in each row are in
    draw order.
    """
    weights = np.asarray(weights, dtype=float)
    shape = (weights.size,) if draws is None else (draws, weights.size)

    with np.errstate(divide='ignore', invalid='ignore'):
        keys = rng.standard_exponential(shape) / weights
    if size == 0:
        return np.zeros(shape[:-1] + (0,), dtype=np.int64)

    chosen = np.argpartition(keys, size - 1, axis=-1)[..., :size]
    order = np.argsort(np.take_along_axis(keys, chosen, axis=-1), axis=-1, kind='stable')
    return np.take_along_axis(chosen, order, axis=-1)


def _sequence_probabilities(weights, size):
    """Yield (ordered sequence, probability) for every reject-duplicates outcome."""
    weights = [float(w) for w in weights]
    total = sum(weights)
    for sequence in itertools.permutations(range(len(weights)), size):
        prob, remaining = 1.0, total
        for index in sequence:
            if remaining <= 0 or weights[index] <= 0:
                prob = 0.0
                break
            prob *= weights[index] / remaining
            remaining -= weights[index]
        if prob > 0:
            yield sequence, prob


def set_probabilities(weights, size):
    """Exact probability of each selected set under the reject-duplicates chain."""
    result = {}
    for sequence, prob in _sequence_probabilities(weights, size):
        key = frozenset(sequence)
        result[key] = result.get(key, 0.0) + prob
    return result


def inclusion_probabilities(weights, size):
    """Exact per-index inclusion probability under the reject-duplicates chain."""
    inclusion = np.zeros(len(weights), dtype=float)
    for selected, prob in set_probabilities(weights, size).items():
        inclusion[list(selected)] += prob
    return inclusion
