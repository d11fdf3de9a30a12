"""Finite-alphabet joint distributions and exact information measures.

Conventions used throughout the package:

* all logarithms are base 2, so entropies and mutual informations are in bits;
* 0 * log(0) = 0 by continuity;
* tensors are dense float64 arrays, one axis per named variable, capped at
  10**7 entries;
* mutual informations are clamped to 0 when floating point noise drives them
  slightly negative (tolerance 1e-12; raw values are available on request).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DuplicateVariable, InvalidQuery, ModelError, UnknownVariable

MAX_STATE_SPACE = 10**7
PMF_ATOL = 1e-12
ROW_SUM_SLACK = 1e-9


@dataclass(frozen=True)
class Alphabet:
    """A named finite alphabet with ordered, distinct symbols."""

    name: str
    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ModelError("alphabet name must be nonempty")
        if len(self.symbols) == 0:
            raise ModelError(f"alphabet {self.name!r} has no symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ModelError(f"alphabet {self.name!r} has repeated symbols")

    @property
    def size(self) -> int:
        return len(self.symbols)


def binary_alphabet(name: str) -> Alphabet:
    return Alphabet(name, ("0", "1"))


def indexed_alphabet(name: str, size: int) -> Alphabet:
    return Alphabet(name, tuple(str(i) for i in range(size)))


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=np.float64)
    out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class JointPMF:
    """A joint pmf over named axes, stored as a dense tensor.

    probs[i0, i1, ...] is the probability of the joint symbol whose index
    along axes[k] is ik.  Entries are nonnegative and sum to 1 within 1e-12.
    """

    axes: tuple[Alphabet, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise DuplicateVariable(f"repeated axis names in {names}")
        shape = tuple(a.size for a in self.axes)
        if int(np.prod(shape, dtype=np.int64)) > MAX_STATE_SPACE:
            raise ConfigError(
                f"state space {shape} exceeds the dense storage cap of {MAX_STATE_SPACE} entries"
            )
        p = _readonly(self.probs)
        if p.shape != shape:
            raise ModelError(f"probs shape {p.shape} does not match axes shape {shape}")
        if np.any(p < -PMF_ATOL):
            raise ModelError("probs contain a negative entry")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ModelError(f"probs sum to {total}, not 1")
        if abs(total - 1.0) > PMF_ATOL:
            p = _readonly(p / total)
        object.__setattr__(self, "probs", p)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"no axis named {name!r}; have {self.names}") from None

    def alphabet(self, name: str) -> Alphabet:
        return self.axes[self.axis(name)]


@dataclass(frozen=True)
class ConditionalPMF:
    """Rows of conditional probabilities P(out | given).

    rows has shape (prod of given sizes, prod of out sizes); row g is the
    distribution of the out variables for the g-th joint assignment of the
    given variables (C-order indexing).  Rows conditioned on a zero
    probability event are marked undefined (all-zero row, defined[g] False);
    consumers must treat such rows as contributing zero to expectations.
    """

    given_axes: tuple[Alphabet, ...]
    out_axes: tuple[Alphabet, ...]
    rows: np.ndarray
    defined: np.ndarray

    def __post_init__(self) -> None:
        names = [a.name for a in self.given_axes + self.out_axes]
        if len(set(names)) != len(names):
            raise DuplicateVariable(f"repeated axis names in {names}")
        g = int(np.prod([a.size for a in self.given_axes], dtype=np.int64)) if self.given_axes else 1
        t = int(np.prod([a.size for a in self.out_axes], dtype=np.int64))
        rows = _readonly(self.rows)
        if rows.shape != (g, t):
            raise ModelError(f"rows shape {rows.shape} does not match ({g}, {t})")
        if np.any(rows < -PMF_ATOL):
            raise ModelError("conditional rows contain a negative entry")
        defined = np.asarray(self.defined, dtype=bool).copy()
        if defined.shape != (g,):
            raise ModelError(f"defined mask shape {defined.shape} does not match ({g},)")
        sums = rows.sum(axis=1)
        bad = defined & (np.abs(sums - 1.0) > ROW_SUM_SLACK)
        if np.any(bad):
            row = int(np.nonzero(bad)[0][0])
            raise ModelError(f"conditional row {row} sums to {sums[row]}, not 1")
        drift = defined & (np.abs(sums - 1.0) > PMF_ATOL)
        if np.any(drift):
            rows = rows.copy()
            rows[drift] = rows[drift] / sums[drift, None]
            rows = _readonly(rows)
        defined.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "defined", defined)

    @property
    def out_axis(self) -> Alphabet:
        if len(self.out_axes) != 1:
            raise InvalidQuery("conditional has more than one output axis")
        return self.out_axes[0]

    def as_tensor(self) -> np.ndarray:
        shape = tuple(a.size for a in self.given_axes) + tuple(a.size for a in self.out_axes)
        return self.rows.reshape(shape)

    def renamed(self, out_name: str) -> "ConditionalPMF":
        if len(self.out_axes) != 1:
            raise InvalidQuery("renamed() requires a single output axis")
        out = Alphabet(out_name, self.out_axes[0].symbols)
        return ConditionalPMF(self.given_axes, (out,), self.rows, self.defined)


def channel(given: Alphabet, out: Alphabet, rows: np.ndarray) -> ConditionalPMF:
    """Build a single-input single-output conditional from a row-stochastic matrix."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.shape != (given.size, out.size):
        raise ModelError(f"channel rows shape {rows.shape} does not match ({given.size}, {out.size})")
    return ConditionalPMF((given,), (out,), rows, np.ones(given.size, dtype=bool))


def _check_names(p: JointPMF, names: Iterable[str]) -> tuple[str, ...]:
    out = tuple(names)
    if len(out) == 0:
        raise InvalidQuery("empty variable set")
    if len(set(out)) != len(out):
        raise InvalidQuery(f"repeated names in query {out}")
    for n in out:
        p.axis(n)
    return out


def marginalize(p: JointPMF, keep: Iterable[str]) -> JointPMF:
    """Sum out all axes not in keep.  Kept axes stay in their original order."""
    keep = _check_names(p, keep)
    keep_set = set(keep)
    kept_axes = tuple(a for a in p.axes if a.name in keep_set)
    drop = tuple(i for i, a in enumerate(p.axes) if a.name not in keep_set)
    probs = p.probs.sum(axis=drop) if drop else p.probs
    return JointPMF(kept_axes, probs)


def condition(p: JointPMF, target: Iterable[str], given: Iterable[str]) -> ConditionalPMF:
    """Conditional distribution of target given the listed axes."""
    target = _check_names(p, target)
    given = tuple(given)
    if given:
        given = _check_names(p, given)
    if set(target) & set(given):
        raise InvalidQuery(f"target {target} and given {given} overlap")
    m = marginalize(p, tuple(given) + tuple(target)) if given else marginalize(p, target)
    given_axes = tuple(m.axes[m.axis(n)] for n in given)
    out_axes = tuple(m.axes[m.axis(n)] for n in target)
    order = [m.axis(n) for n in given] + [m.axis(n) for n in target]
    t = np.transpose(m.probs, order)
    g = int(np.prod([a.size for a in given_axes], dtype=np.int64)) if given_axes else 1
    rows = t.reshape(g, -1)
    sums = rows.sum(axis=1)
    defined = sums > 0.0
    out = np.zeros_like(rows)
    out[defined] = rows[defined] / sums[defined, None]
    return ConditionalPMF(given_axes, out_axes, out, defined)


def entropy(p: JointPMF, variables: Iterable[str] | None = None) -> float:
    """Joint entropy in bits of the listed variables (all axes by default)."""
    if variables is None:
        q = p.probs
    else:
        q = marginalize(p, variables).probs
    q = q.reshape(-1)
    q = q[q > 0.0]
    return float(-np.dot(q, np.log2(q)))


def _joint_entropy(p: JointPMF, variables: tuple[str, ...]) -> float:
    return entropy(p, variables) if variables else 0.0


def mutual_information(
    p: JointPMF,
    a: Iterable[str],
    b: Iterable[str],
    given: Iterable[str] = (),
    clamp: bool = True,
) -> float:
    """I(A; B | given) in bits, computed from joint entropies.

    With clamp=True (the default) small negative floating point residues are
    clamped to 0; pass clamp=False to observe the raw value.
    """
    a = _check_names(p, a)
    b = _check_names(p, b)
    c = tuple(given)
    if c:
        c = _check_names(p, c)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise InvalidQuery(f"query sets overlap: {a} {b} given {c}")
    v = (
        _joint_entropy(p, a + c)
        + _joint_entropy(p, b + c)
        - _joint_entropy(p, a + b + c)
        - _joint_entropy(p, c)
    )
    if clamp and v < 0.0:
        return 0.0
    return v


def verify_markov(p: JointPMF, a: Iterable[str], b: Iterable[str], c: Iterable[str]) -> float:
    """Residual I(A; C | B) of the chain A - B - C; 0 means the chain holds."""
    return mutual_information(p, a, c, given=b)


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def attach_channel(p: JointPMF, ch: ConditionalPMF) -> JointPMF:
    """Extend p with the output of a memoryless channel driven by axes of p.

    The channel's given axes must all be axes of p (matching alphabets); the
    single output axis is appended as the last axis of the result.  The
    original axes are untouched, so downstream marginals over them agree with
    p's exactly.
    """
    if len(ch.out_axes) != 1:
        raise InvalidQuery("attach_channel requires a single-output channel")
    out = ch.out_axes[0]
    if out.name in p.names:
        raise DuplicateVariable(f"axis {out.name!r} already present")
    for a in ch.given_axes:
        have = p.alphabet(a.name)
        if have.symbols != a.symbols:
            raise ModelError(f"alphabet mismatch on {a.name!r}: {have.symbols} vs {a.symbols}")
    if not np.all(ch.defined):
        raise ModelError("channel has undefined rows")
    n = len(p.axes)
    if n + 1 > len(_LETTERS):
        raise InvalidQuery("too many axes")
    sub_p = _LETTERS[:n]
    out_letter = _LETTERS[n]
    sub_ch = "".join(sub_p[p.axis(a.name)] for a in ch.given_axes) + out_letter
    expr = f"{sub_p},{sub_ch}->{sub_p}{out_letter}"
    probs = np.einsum(expr, p.probs, ch.as_tensor())
    return JointPMF(p.axes + (out,), probs)
