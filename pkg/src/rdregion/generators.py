"""Seeded random generators for models, channels, and auxiliary joints.

All generators take an explicit numpy Generator so sweeps are reproducible;
rows are drawn from flat Dirichlet distributions, which are strictly positive
almost surely (no degenerate conditionals).
"""

from __future__ import annotations

import numpy as np

from .probability import Alphabet, ConditionalPMF, JointPMF, indexed_alphabet
from .sources import (
    CANONICAL_AXES,
    SourceModel,
    TestChannelTriple,
    TreeModelSpec,
    assemble_tree_model,
    test_channel,
)


def seeded(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_joint_pmf(rng: np.random.Generator, names: tuple[str, ...],
                     sizes: tuple[int, ...]) -> JointPMF:
    """A Dirichlet(1)-flat joint pmf over the named axes."""
    axes = tuple(indexed_alphabet(n, s) for n, s in zip(names, sizes))
    total = int(np.prod(sizes))
    probs = rng.dirichlet(np.ones(total)).reshape(sizes)
    return JointPMF(axes, probs)


def _stochastic(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(cols), size=rows)


def random_tree_spec(
    rng: np.random.Generator,
    sizes: tuple[int, int, int, int, int] = (2, 2, 2, 2, 2),
) -> TreeModelSpec:
    """Random tree tables; sizes are (|X1|, |X2|, |X3|, |Z|, |F|)."""
    n1, n2, n3, nz, nf = sizes
    return TreeModelSpec(
        f_prior=rng.dirichlet(np.ones(nf)),
        z_given_f=_stochastic(rng, nf, nz),
        x1_given_z=_stochastic(rng, nz, n1),
        x2_given_z=_stochastic(rng, nz, n2),
        x3_given_f=_stochastic(rng, nf, n3),
    )


def random_tree_model(
    rng: np.random.Generator,
    sizes: tuple[int, int, int, int, int] = (2, 2, 2, 2, 2),
) -> SourceModel:
    return assemble_tree_model(random_tree_spec(rng, sizes))


def random_source_model(
    rng: np.random.Generator,
    sizes: tuple[int, int, int, int, int] = (2, 2, 2, 2, 2),
) -> SourceModel:
    """A general (typically non-tree) source joint over the canonical axes."""
    return SourceModel(random_joint_pmf(rng, CANONICAL_AXES, sizes))


def random_channel_triple(
    rng: np.random.Generator,
    model: SourceModel,
    w_sizes: tuple[int, int, int] | None = None,
) -> TestChannelTriple:
    """Independent random test channels; |W_i| defaults to |X_i| + 1."""
    channels = []
    for i in (1, 2, 3):
        x = model.alphabet(f"X{i}")
        w = w_sizes[i - 1] if w_sizes is not None else x.size + 1
        channels.append(test_channel(i, x, _stochastic(rng, x.size, w)))
    return TestChannelTriple(*channels)


def random_correlated_auxiliary(
    rng: np.random.Generator,
    model: SourceModel,
    w_sizes: tuple[int, int, int] | None = None,
    mixture_size: int = 2,
) -> ConditionalPMF:
    """A correlated admissible auxiliary: a hidden mixture of product channels.

    p(w1, w2, w3 | x1, x2, x3) = sum_u pi(u) prod_i p_u(w_i | x_i).  Each W_i's
    marginal channel depends only on X_i (so the per-encoder Markov constraints
    hold exactly), yet the W's are correlated with each other through the
    shared mixture label.
    """
    xs = [model.alphabet(f"X{i}") for i in (1, 2, 3)]
    if w_sizes is None:
        w_sizes = tuple(x.size + 1 for x in xs)  # type: ignore[assignment]
    assert w_sizes is not None
    pi = rng.dirichlet(np.ones(mixture_size))
    # components[u][i] has shape (|X_{i+1}|, w_sizes[i])
    components = [
        [_stochastic(rng, xs[i].size, w_sizes[i]) for i in range(3)]
        for _ in range(mixture_size)
    ]
    shape = tuple(x.size for x in xs) + tuple(w_sizes)
    tensor = np.zeros(shape)
    for u in range(mixture_size):
        a, b, c = components[u]
        tensor += pi[u] * np.einsum("au,bv,cw->abcuvw", a, b, c)
    given_axes = tuple(Alphabet(f"X{i+1}", xs[i].symbols) for i in range(3))
    out_axes = tuple(indexed_alphabet(f"W{i+1}", w_sizes[i]) for i in range(3))
    g = int(np.prod([x.size for x in xs]))
    rows = tensor.reshape(g, -1)
    return ConditionalPMF(given_axes, out_axes, rows, np.ones(g, dtype=bool))


def copy_third_source(model: SourceModel) -> SourceModel:
    """A deliberately non-tree variant: replace X3 by an exact copy of X1.

    X3 then depends on X1 even given F, so the tree factorization fails and
    auxiliary cross terms need not vanish.
    """
    p = model.joint.probs  # axes (X1, X2, X3, Z, F)
    n1 = p.shape[0]
    if p.shape[2] != n1:
        raise ValueError("copy_third_source needs |X3| == |X1|")
    marg = p.sum(axis=2)  # (X1, X2, Z, F)
    probs = np.zeros_like(p)
    for a in range(n1):
        probs[a, :, a, :, :] = marg[a]
    return SourceModel(JointPMF(model.joint.axes, probs))
