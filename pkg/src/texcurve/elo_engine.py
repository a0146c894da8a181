"""Shuffle-averaged Elo ratings over pairwise comparison records.

A single Elo pass is order-dependent, so the tournament runs many
passes over seeded shuffles of the record list and reports the mean
rating per method together with the across-shuffle standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import InvalidScore

DEFAULT_K_FACTOR = 32.0
DEFAULT_INITIAL_RATING = 1000.0
DEFAULT_SHUFFLES = 100

VALID_OUTCOMES = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class EloConfig:
    """Update and averaging parameters for a tournament."""

    k_factor: float = DEFAULT_K_FACTOR
    initial_rating: float = DEFAULT_INITIAL_RATING
    shuffles: int = DEFAULT_SHUFFLES
    seed: int = 0

    def __post_init__(self):
        if self.k_factor <= 0.0:
            raise ValueError("k_factor must be positive")
        if self.shuffles < 1:
            raise ValueError("shuffles must be at least 1")


@dataclass(frozen=True)
class RatingTable:
    """Mean ratings and their shuffle spread for one judged dimension."""

    dimension: str
    ratings: Mapping[str, float]
    spread: Mapping[str, float]
    record_count: int
    config: EloConfig

    def ranking(self) -> list[str]:
        """Method ids ordered best-first, ties broken by id."""
        return sorted(self.ratings, key=lambda m: (-self.ratings[m], m))

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "record_count": self.record_count,
            "config": {
                "k_factor": self.config.k_factor,
                "initial_rating": self.config.initial_rating,
                "shuffles": self.config.shuffles,
                "seed": self.config.seed,
            },
            "ratings": dict(self.ratings),
            "spread": dict(self.spread),
        }


def pair_expected_score(rating_i: float, rating_j: float) -> float:
    """Expected score of the first side: ``1 / (1 + 10^((Rj - Ri)/400))``."""
    return 1.0 / (1.0 + 10.0 ** ((rating_j - rating_i) / 400.0))


def _as_triples(records: Sequence) -> list[tuple[str, str, float]]:
    triples = []
    for rec in records:
        if isinstance(rec, tuple):
            a, b, c = rec
        else:
            a, b, c = rec.method_a, rec.method_b, rec.c_ij
        c = float(c)
        if c not in VALID_OUTCOMES:
            raise InvalidScore(f"comparison outcome {c!r} is not in {{0, 0.5, 1}}")
        if a == b:
            raise InvalidScore(f"record compares method {a!r} with itself")
        triples.append((str(a), str(b), c))
    return triples


def _index_methods(triples: Sequence[tuple[str, str, float]]) -> list[str]:
    # first-appearance order keeps single-pass results independent of id sort
    seen: dict[str, None] = {}
    for a, b, _ in triples:
        seen.setdefault(a)
        seen.setdefault(b)
    return list(seen)


def run_single_pass(records: Sequence, config: EloConfig) -> dict[str, float]:
    """One sequential Elo pass over ``records`` in the given order.

    Records may be ``(method_a, method_b, c_ij)`` tuples or any objects
    with those attributes, where ``c_ij`` is method A's score. Every
    method starts at ``config.initial_rating``; each record moves the
    pair symmetrically by ``k * (c_ij - expected)``, so the sum of all
    ratings is conserved exactly.
    """
    triples = _as_triples(records)
    methods = _index_methods(triples)
    if not methods:
        return {}
    index = {m: i for i, m in enumerate(methods)}
    idx_i = np.array([index[a] for a, _, _ in triples], dtype=np.int64)
    idx_j = np.array([index[b] for _, b, _ in triples], dtype=np.int64)
    outcomes = np.array([c for _, _, c in triples])
    ratings = kernels.elo_pass(
        idx_i, idx_j, outcomes, config.k_factor, config.initial_rating, len(methods)
    )
    return {m: float(ratings[index[m]]) for m in methods}


def run_tournament(
    records: Sequence,
    config: EloConfig,
    dimension: str = "",
) -> RatingTable:
    """Average single-pass ratings over seeded shuffles of the records.

    The result reports, per method, the mean rating across
    ``config.shuffles`` random orderings and the population standard
    deviation of those per-shuffle ratings. The same records, config
    and seed always reproduce the same table.
    """
    triples = _as_triples(records)
    if not triples:
        raise ValueError("cannot run a tournament over zero records")
    methods = sorted(_index_methods(triples))
    index = {m: i for i, m in enumerate(methods)}
    idx_i = np.array([index[a] for a, _, _ in triples], dtype=np.int64)
    idx_j = np.array([index[b] for _, b, _ in triples], dtype=np.int64)
    outcomes = np.array([c for _, _, c in triples])
    rng = np.random.default_rng(config.seed)
    per_shuffle = np.empty((config.shuffles, len(methods)))
    for s in range(config.shuffles):
        perm = rng.permutation(idx_i.size)
        per_shuffle[s] = kernels.elo_pass(
            idx_i[perm],
            idx_j[perm],
            outcomes[perm],
            config.k_factor,
            config.initial_rating,
            len(methods),
        )
    means = per_shuffle.mean(axis=0)
    stds = per_shuffle.std(axis=0)
    return RatingTable(
        dimension=dimension,
        ratings={m: float(means[index[m]]) for m in methods},
        spread={m: float(stds[index[m]]) for m in methods},
        record_count=len(triples),
        config=config,
    )
