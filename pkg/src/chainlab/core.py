"""Core domain types and short-run evolution of a finite Markov chain.

A chain is a set of named states, a row-stochastic transition matrix
(row = from-state, column = to-state) and, optionally, an initial
probability vector plus per-state weights.  Everything here is immutable
after construction and every operation is a pure function, so the types
are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateStateLabel,
    MissingInitialVector,
    NegativeEntry,
    NonSquareMatrix,
    RowSumViolation,
    UnknownStateReference,
    ValidationError,
)

# Row sums of hand-entered matrices carry decimal rounding; accept that but
# nothing worse.  Opt-in renormalization tolerates a wider window.
ROW_SUM_TOL = 1e-9
RENORM_TOL = 1e-6

# One vector-matrix product can widen the row-sum error by a few ulps, never
# by more than this.
_STEP_SUM_TOL = 8 * ROW_SUM_TOL


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class StateSpace:
    """Ordered, distinct state names; index and label map one-to-one."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValidationError("state space needs at least one state")
        for label in self.labels:
            if not isinstance(label, str) or not label:
                raise ValidationError(f"state label {label!r} is not a non-empty string")
        if len(set(self.labels)) != len(self.labels):
            seen = set()
            dup = next(l for l in self.labels if l in seen or seen.add(l))
            raise DuplicateStateLabel(f"duplicate state label {dup!r}")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownStateReference(f"unknown state {label!r}") from None

    def label(self, index: int) -> str:
        return self.labels[index]


@dataclass(frozen=True)
class StochasticMatrix:
    """Square matrix of transition probabilities; every row sums to 1."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise NonSquareMatrix(f"transition matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValidationError("transition matrix contains non-finite entries")
        if entries.min(initial=0.0) < 0.0:
            i, j = np.argwhere(entries < 0.0)[0]
            raise NegativeEntry(f"negative transition probability {entries[i, j]!r} at row {i}, column {j}")
        sums = entries.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if bad.size:
            i = int(bad[0])
            raise RowSumViolation(
                f"row {i} sums to {sums[i]!r}, expected 1", row=i, actual=float(sums[i])
            )
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ProbabilityVector:
    """Distribution over states at one step; entries sum to 1."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1:
            raise ValidationError(f"probability vector must be 1-D, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ValidationError("probability vector contains non-finite entries")
        if probs.min(initial=0.0) < 0.0:
            i = int(np.argmin(probs))
            raise NegativeEntry(f"negative probability {probs[i]!r} at index {i}")
        total = probs.sum()
        if abs(total - 1.0) > _STEP_SUM_TOL:
            raise RowSumViolation(f"probabilities sum to {total!r}, expected 1", actual=float(total))
        object.__setattr__(self, "probs", _frozen(probs))

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def tolist(self) -> list[float]:
        return self.probs.tolist()


@dataclass(frozen=True)
class ChainModel:
    """A labelled chain: state space, transition matrix, optional extras.

    ``weights`` is a per-visit cost or duration for each state (units are
    the caller's business); ``terminal_weights`` is a one-off cost added
    when the chain is absorbed in a given state.
    """

    states: StateSpace
    matrix: StochasticMatrix
    initial: ProbabilityVector | None = None
    weights: Mapping[str, float] | None = None
    terminal_weights: Mapping[str, float] | None = None

    def __post_init__(self):
        n = len(self.states)
        if self.matrix.n != n:
            raise DimensionMismatch(
                f"matrix is {self.matrix.n}x{self.matrix.n} but there are {n} states"
            )
        if self.initial is not None and self.initial.n != n:
            raise DimensionMismatch(
                f"initial vector has {self.initial.n} entries but there are {n} states"
            )
        for name in ("weights", "terminal_weights"):
            mapping = getattr(self, name)
            if mapping is None:
                continue
            checked = {}
            for label, value in mapping.items():
                if label not in self.states.labels:
                    raise UnknownStateReference(f"{name} references unknown state {label!r}")
                value = float(value)
                if not np.isfinite(value):
                    raise ValidationError(f"{name}[{label!r}] is not finite")
                if value < 0.0:
                    raise NegativeEntry(f"{name}[{label!r}] is negative: {value!r}")
                checked[label] = value
            object.__setattr__(self, name, MappingProxyType(checked))

    @property
    def n(self) -> int:
        return len(self.states)


def validate_model(
    states: Sequence[str],
    transitions,
    initial=None,
    weights: Mapping[str, float] | None = None,
    terminal_weights: Mapping[str, float] | None = None,
    *,
    renormalize: bool = False,
    renorm_tol: float = RENORM_TOL,
) -> ChainModel:
    """Validate a raw chain description into a `ChainModel`.

    Rows must sum to 1 within ``ROW_SUM_TOL``.  Nothing is ever corrected
    silently: with ``renormalize=True``, rows (and the initial vector)
    whose sum lies within ``renorm_tol`` of 1 are scaled to sum exactly 1,
    anything further off still raises ``RowSumViolation``.
    """
    space = StateSpace(tuple(states))
    n = len(space)

    entries = np.array(transitions, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise NonSquareMatrix(f"transition matrix must be square, got shape {entries.shape}")
    if entries.shape[0] != n:
        raise DimensionMismatch(
            f"transition matrix is {entries.shape[0]}x{entries.shape[1]} but there are {n} states"
        )
    if not np.all(np.isfinite(entries)):
        raise ValidationError("transition matrix contains non-finite entries")
    if entries.min(initial=0.0) < 0.0:
        i, j = np.argwhere(entries < 0.0)[0]
        raise NegativeEntry(f"negative transition probability {entries[i, j]!r} at row {i}, column {j}")
    if renormalize:
        sums = entries.sum(axis=1)
        for i in np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL):
            if abs(sums[i] - 1.0) > renorm_tol:
                raise RowSumViolation(
                    f"row {i} sums to {sums[i]!r}, outside the renormalization window",
                    row=int(i),
                    actual=float(sums[i]),
                )
            entries[i] /= sums[i]
    matrix = StochasticMatrix(entries)

    init_vec = None
    if initial is not None:
        init = np.array(
            initial.probs if isinstance(initial, ProbabilityVector) else initial, dtype=float
        )
        if init.ndim != 1 or init.shape[0] != n:
            raise DimensionMismatch(
                f"initial vector has shape {init.shape} but there are {n} states"
            )
        if not np.all(np.isfinite(init)):
            raise ValidationError("initial vector contains non-finite entries")
        if init.min(initial=0.0) < 0.0:
            i = int(np.argmin(init))
            raise NegativeEntry(f"negative initial probability {init[i]!r} at index {i}")
        total = init.sum()
        if abs(total - 1.0) > ROW_SUM_TOL:
            if renormalize and abs(total - 1.0) <= renorm_tol:
                init /= total
            else:
                raise RowSumViolation(
                    f"initial vector sums to {total!r}, expected 1", actual=float(total)
                )
        init_vec = ProbabilityVector(init)

    return ChainModel(space, matrix, init_vec, weights, terminal_weights)


def _ordered_product(probs: np.ndarray, entries: np.ndarray) -> np.ndarray:
    # Accumulate over from-states in index order.  This keeps the result
    # bit-identical to the total-probability enumeration independent of the
    # BLAS build, which matters because both routes are asserted equal.
    out = np.zeros(entries.shape[1])
    for i in range(entries.shape[0]):
        out += probs[i] * entries[i]
    return out


def step(p: ProbabilityVector, a: StochasticMatrix) -> ProbabilityVector:
    """One transition: the distribution after applying ``a`` to ``p``."""
    if p.n != a.n:
        raise DimensionMismatch(f"vector has {p.n} entries, matrix is {a.n}x{a.n}")
    out = _ordered_product(p.probs, a.entries)
    if out.min(initial=0.0) < -ROW_SUM_TOL:
        raise ValidationError(f"transition produced negative mass {out.min()!r}")
    np.clip(out, 0.0, None, out=out)
    return ProbabilityVector(out)


def evolve(model: ChainModel, k: int) -> ProbabilityVector:
    """Distribution after ``k`` steps from the model's initial vector.

    Computed by repeated vector-matrix products, not by powering the
    matrix: cheaper at this scale and numerically stabler for stochastic
    iteration.
    """
    if model.initial is None:
        raise MissingInitialVector("model has no initial probability vector")
    if k < 0:
        raise ValidationError(f"step count must be >= 0, got {k}")
    p = model.initial
    for _ in range(k):
        p = step(p, model.matrix)
    return p
