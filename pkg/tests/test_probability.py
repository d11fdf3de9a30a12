"""Core probability containers and information measures."""

import math

import numpy as np
import pytest

from rdregion.errors import (
    ConfigError,
    DuplicateVariable,
    InvalidQuery,
    ModelError,
    UnknownVariable,
)
from rdregion.probability import (
    Alphabet,
    JointPMF,
    attach_channel,
    binary_alphabet,
    channel,
    condition,
    entropy,
    indexed_alphabet,
    marginalize,
    mutual_information,
    verify_markov,
)

from oracle import entropy_of, mi_dict, pmf_to_dict


def uniform_joint(*names_sizes):
    axes = tuple(indexed_alphabet(n, s) for n, s in names_sizes)
    shape = tuple(a.size for a in axes)
    return JointPMF(axes, np.full(shape, 1.0 / np.prod(shape)))


def random_joint(rng, names, sizes):
    axes = tuple(indexed_alphabet(n, s) for n, s in zip(names, sizes))
    probs = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
    return JointPMF(axes, probs)


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------

def test_alphabet_basics():
    a = Alphabet("X", ("a", "b", "c"))
    assert a.size == 3
    assert binary_alphabet("Z").symbols == ("0", "1")
    assert indexed_alphabet("W", 4).symbols == ("0", "1", "2", "3")


def test_joint_rejects_duplicate_axis_names():
    x = binary_alphabet("X")
    with pytest.raises(DuplicateVariable):
        JointPMF((x, x), np.full((2, 2), 0.25))


def test_joint_rejects_negative_and_non_normalized():
    x, y = binary_alphabet("X"), binary_alphabet("Y")
    with pytest.raises(ModelError):
        JointPMF((x, y), np.array([[0.5, 0.5], [0.5, -0.5]]))
    with pytest.raises(ModelError):
        JointPMF((x, y), np.full((2, 2), 0.3))


def test_joint_rejects_oversized_state_space():
    axes = tuple(indexed_alphabet(f"V{i}", 100) for i in range(4))
    with pytest.raises(ConfigError):
        JointPMF(axes, np.zeros((100, 100, 100, 100)))


def test_joint_renormalizes_tiny_drift():
    x = binary_alphabet("X")
    p = JointPMF((x,), np.array([0.5, 0.5 + 1e-10]))
    assert abs(float(p.probs.sum()) - 1.0) < 1e-15


def test_joint_probs_read_only():
    p = uniform_joint(("X", 2), ("Y", 2))
    with pytest.raises(ValueError):
        p.probs[0, 0] = 0.9


def test_unknown_axis_queries_raise():
    p = uniform_joint(("X", 2), ("Y", 2))
    with pytest.raises(UnknownVariable):
        p.axis("Q")
    with pytest.raises(UnknownVariable):
        marginalize(p, ("X", "Q"))


# ---------------------------------------------------------------------------
# Marginalization / conditioning
# ---------------------------------------------------------------------------

def test_marginalize_preserves_axis_order():
    rng = np.random.default_rng(0)
    p = random_joint(rng, ("A", "B", "C"), (2, 3, 2))
    m = marginalize(p, ("C", "A"))
    assert m.names == ("A", "C")
    d = pmf_to_dict(p.probs)
    md = pmf_to_dict(m.probs)
    for (a, c), v in md.items():
        direct = sum(p2 for k, p2 in d.items() if k[0] == a and k[2] == c)
        assert abs(v - direct) < 1e-12


def test_condition_rows_are_conditionals():
    rng = np.random.default_rng(1)
    p = random_joint(rng, ("A", "B"), (3, 2))
    c = condition(p, ("B",), ("A",))
    probs = p.probs
    for a in range(3):
        row = probs[a] / probs[a].sum()
        assert np.allclose(c.rows[a], row, atol=1e-12)


def test_condition_marks_zero_probability_rows_undefined():
    x, y = binary_alphabet("X"), binary_alphabet("Y")
    p = JointPMF((x, y), np.array([[0.5, 0.5], [0.0, 0.0]]))
    c = condition(p, ("Y",), ("X",))
    assert bool(c.defined[0]) is True
    assert bool(c.defined[1]) is False


def test_invalid_condition_query():
    p = uniform_joint(("X", 2), ("Y", 2))
    with pytest.raises(InvalidQuery):
        condition(p, ("X",), ("X",))


# ---------------------------------------------------------------------------
# Entropy and mutual information: spec'd values
# ---------------------------------------------------------------------------

def test_entropy_uniform_is_log_size():
    p = uniform_joint(("X", 4))
    assert abs(entropy(p) - 2.0) < 1e-12


def test_entropy_point_mass_is_zero():
    x = indexed_alphabet("X", 3)
    p = JointPMF((x,), np.array([1.0, 0.0, 0.0]))
    assert entropy(p) == 0.0


def test_fair_bit_entropy_and_independence():
    p = uniform_joint(("X", 2), ("Y", 2))
    assert abs(entropy(p, ("X",)) - 1.0) < 1e-12
    assert abs(mutual_information(p, ("X",), ("Y",))) < 1e-12


def test_bsc_mutual_information_value():
    # fair bit through a 0.1-crossover symmetric channel: I = 1 - h(0.1)
    x, y = binary_alphabet("X"), binary_alphabet("Y")
    p = JointPMF((x, y), np.array([[0.45, 0.05], [0.05, 0.45]]))
    h01 = -(0.1 * math.log2(0.1) + 0.9 * math.log2(0.9))
    assert abs(mutual_information(p, ("X",), ("Y",)) - (1.0 - h01)) < 1e-12
    assert abs((1.0 - h01) - 0.5310044064107188) < 1e-15


def test_mutual_information_clamp_behavior():
    p = uniform_joint(("X", 2), ("Y", 2))
    raw = mutual_information(p, ("X",), ("Y",), clamp=False)
    clamped = mutual_information(p, ("X",), ("Y",))
    assert clamped >= 0.0
    assert abs(raw) < 1e-12


def test_markov_chain_residual_zero():
    # X -> Y -> W: I(X; W | Y) = 0
    x = binary_alphabet("X")
    y = binary_alphabet("Y")
    w = binary_alphabet("W")
    bsc = np.array([[0.8, 0.2], [0.2, 0.8]])
    p = JointPMF((x,), np.array([0.5, 0.5]))
    p = attach_channel(p, channel(x, y, bsc))
    p = attach_channel(p, channel(y, w, bsc))
    assert verify_markov(p, ("X",), ("Y",), ("W",)) < 1e-12
    # and X and W are NOT independent unconditionally
    assert mutual_information(p, ("X",), ("W",)) > 0.05


def test_attach_channel_alphabet_mismatch():
    p = uniform_joint(("X", 2), ("Y", 2))
    three = indexed_alphabet("X", 3)
    w = binary_alphabet("W")
    with pytest.raises(ModelError):
        attach_channel(p, channel(three, w, np.full((3, 2), 0.5)))


# ---------------------------------------------------------------------------
# Seeded sweep: identities against the direct-summation oracle
# ---------------------------------------------------------------------------

def test_identity_sweep_against_oracle():
    rng = np.random.default_rng(20260817)
    names = ("A", "B", "C", "D", "E")
    for trial in range(25):
        k = int(rng.integers(2, 6))
        sizes = tuple(int(rng.integers(2, 5)) for _ in range(k))
        p = random_joint(rng, names[:k], sizes)
        d = pmf_to_dict(p.probs)
        idx = tuple(range(k))

        # entropies of every single axis and the full joint match the oracle
        assert abs(entropy(p) - entropy_of(d, idx)) < 1e-10
        for i in range(k):
            assert abs(entropy(p, (names[i],)) - entropy_of(d, (i,))) < 1e-10

        if k >= 2:
            a, b = (names[0],), (names[1],)
            mi = mutual_information(p, a, b)
            assert mi >= 0.0
            # consistency: I(A;B) = H(A) + H(B) - H(AB)
            expect = (entropy(p, a) + entropy(p, b) - entropy(p, a + b))
            assert abs(mi - max(expect, 0.0)) < 1e-10
            assert abs(mi - max(mi_dict(d, (0,), (1,)), 0.0)) < 1e-10
        if k >= 3:
            cond = mutual_information(p, (names[0],), (names[1],), (names[2],))
            assert cond >= 0.0
            assert abs(cond - max(mi_dict(d, (0,), (1,), (2,)), 0.0)) < 1e-10
