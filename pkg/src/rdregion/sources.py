"""Source models: three correlated sources with two side-information variables.

The package's canonical setting is a joint pmf over five named variables

    X1, X2, X3   -- the three separately encoded sources,
    Z,  F        -- the two side-information variables available at the decoder,

stored with axes in exactly that order.  A structured subclass of models (the
"tree" models) factorizes as

    p(x1, x2, x3, z, f) = p(f) p(z | f) p(x1 | z) p(x2 | z) p(x3 | f),

i.e. X1 and X2 are noisy observations of Z while X3 is a noisy observation of
F.  Auxiliary variables W1, W2, W3 produced by per-source test channels (or by
a general conditional of all three W's on all three X's) extend the joint to
eight axes, appended in the order W1, W2, W3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecoderError, InvalidQuery, ModelError
from .probability import (
    Alphabet,
    ConditionalPMF,
    JointPMF,
    binary_alphabet,
    channel,
    marginalize,
    mutual_information,
)

CANONICAL_AXES = ("X1", "X2", "X3", "Z", "F")
AUX_AXES = ("W1", "W2", "W3")
SOURCE_AXES = ("X1", "X2", "X3")


def bsc_matrix(p: float) -> np.ndarray:
    """Row-stochastic matrix of a binary symmetric channel with flip probability p."""
    if not 0.0 <= p <= 1.0:
        raise ModelError(f"flip probability {p} outside [0, 1]")
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


@dataclass(frozen=True)
class TreeModelSpec:
    """Conditional tables of the tree factorization.

    f_prior[f] = P(F = f); z_given_f[f, z] = P(Z = z | F = f); the three
    x*_given_* tables are row-stochastic matrices conditioned on the parent
    variable (Z for X1 and X2, F for X3).
    """

    f_prior: np.ndarray
    z_given_f: np.ndarray
    x1_given_z: np.ndarray
    x2_given_z: np.ndarray
    x3_given_f: np.ndarray

    def sizes(self) -> tuple[int, int, int, int, int]:
        nf = len(np.asarray(self.f_prior))
        nz = np.asarray(self.z_given_f).shape[1]
        n1 = np.asarray(self.x1_given_z).shape[1]
        n2 = np.asarray(self.x2_given_z).shape[1]
        n3 = np.asarray(self.x3_given_f).shape[1]
        return n1, n2, n3, nz, nf


@dataclass(frozen=True)
class SourceModel:
    """A joint pmf over the canonical axes, plus the tree tables when known."""

    joint: JointPMF
    tree: TreeModelSpec | None = None

    def __post_init__(self) -> None:
        if self.joint.names != CANONICAL_AXES:
            raise ModelError(
                f"model axes must be {CANONICAL_AXES} in order, got {self.joint.names}"
            )

    @classmethod
    def from_joint(cls, p: JointPMF, tree: TreeModelSpec | None = None) -> "SourceModel":
        """Build a model from a joint with the canonical names in any axis order."""
        if set(p.names) != set(CANONICAL_AXES):
            raise ModelError(f"model needs axes {CANONICAL_AXES}, got {p.names}")
        order = [p.axis(n) for n in CANONICAL_AXES]
        probs = np.transpose(p.probs, order)
        axes = tuple(p.axes[i] for i in order)
        return cls(JointPMF(axes, probs), tree)

    def alphabet(self, name: str) -> Alphabet:
        return self.joint.alphabet(name)


def assemble_tree_model(spec: TreeModelSpec) -> SourceModel:
    """Multiply the tree tables into a canonical five-axis joint."""
    f = np.asarray(spec.f_prior, dtype=np.float64)
    zf = np.asarray(spec.z_given_f, dtype=np.float64)
    x1 = np.asarray(spec.x1_given_z, dtype=np.float64)
    x2 = np.asarray(spec.x2_given_z, dtype=np.float64)
    x3 = np.asarray(spec.x3_given_f, dtype=np.float64)
    for name, table in (("f_prior", f), ("z_given_f", zf), ("x1_given_z", x1),
                        ("x2_given_z", x2), ("x3_given_f", x3)):
        if np.any(table < 0):
            raise ModelError(f"{name} has a negative entry")
    if abs(f.sum() - 1.0) > 1e-9:
        raise ModelError(f"f_prior sums to {f.sum()}, not 1")
    for name, table in (("z_given_f", zf), ("x1_given_z", x1),
                        ("x2_given_z", x2), ("x3_given_f", x3)):
        sums = table.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            raise ModelError(f"{name} has a row that sums to {sums[np.argmax(np.abs(sums-1))]}")
    n1, n2, n3, nz, nf = spec.sizes()
    if zf.shape[0] != nf or x1.shape[0] != nz or x2.shape[0] != nz or x3.shape[0] != nf:
        raise ModelError("tree table shapes are inconsistent")
    probs = np.einsum("f,fz,za,zb,fc->abczf", f, zf, x1, x2, x3)
    axes = (
        Alphabet("X1", tuple(str(i) for i in range(n1))),
        Alphabet("X2", tuple(str(i) for i in range(n2))),
        Alphabet("X3", tuple(str(i) for i in range(n3))),
        Alphabet("Z", tuple(str(i) for i in range(nz))),
        Alphabet("F", tuple(str(i) for i in range(nf))),
    )
    return SourceModel(JointPMF(axes, probs), spec)


def check_tree_structure(model: SourceModel, tol: float = 1e-9) -> dict[str, float]:
    """Conditional-independence residuals of the tree factorization.

    All five values are zero (within tol) exactly when the joint factorizes as
    p(z, f) p(x1 | z) p(x2 | z) p(x3 | f).  The returned dict always carries
    the residuals; callers compare against their own tolerance.
    """
    p = model.joint
    return {
        "x1_rest_given_z": mutual_information(p, ("X1",), ("X2", "X3", "F"), given=("Z",)),
        "x2_rest_given_z": mutual_information(p, ("X2",), ("X1", "X3", "F"), given=("Z",)),
        "x3_rest_given_f": mutual_information(p, ("X3",), ("X1", "X2", "Z"), given=("F",)),
        "x1_x2_given_z": mutual_information(p, ("X1",), ("X2",), given=("Z",)),
        "x12_x3_given_zf": mutual_information(p, ("X1", "X2"), ("X3",), given=("Z", "F")),
    }


def is_tree_model(model: SourceModel, tol: float = 1e-9) -> bool:
    return max(check_tree_structure(model).values()) <= tol


@dataclass(frozen=True)
class TestChannelTriple:
    """Per-source test channels p(w_i | x_i), one per encoder."""

    w1: ConditionalPMF
    w2: ConditionalPMF
    w3: ConditionalPMF

    def __post_init__(self) -> None:
        for i, ch in enumerate(self.channels, start=1):
            if len(ch.given_axes) != 1 or len(ch.out_axes) != 1:
                raise ModelError(f"test channel {i} must map one source axis to one output axis")
            if ch.given_axes[0].name != f"X{i}":
                raise ModelError(
                    f"test channel {i} conditions on {ch.given_axes[0].name!r}, expected 'X{i}'"
                )
            if ch.out_axes[0].name != f"W{i}":
                raise ModelError(
                    f"test channel {i} outputs {ch.out_axes[0].name!r}, expected 'W{i}'"
                )

    @property
    def channels(self) -> tuple[ConditionalPMF, ConditionalPMF, ConditionalPMF]:
        return (self.w1, self.w2, self.w3)


def test_channel(index: int, x_alphabet: Alphabet, rows: np.ndarray,
                 w_size: int | None = None) -> ConditionalPMF:
    """Convenience constructor for the index-th test channel (index in 1..3)."""
    if index not in (1, 2, 3):
        raise ModelError(f"encoder index {index} outside 1..3")
    rows = np.asarray(rows, dtype=np.float64)
    size = rows.shape[1] if w_size is None else w_size
    w = Alphabet(f"W{index}", tuple(str(i) for i in range(size)))
    x = Alphabet(f"X{index}", x_alphabet.symbols)
    return channel(x, w, rows)


def extend_with_test_channels(model: SourceModel, triple: TestChannelTriple) -> JointPMF:
    """Eight-axis joint p(x1, x2, x3, z, f) * prod_i p(w_i | x_i)."""
    for i, ch in enumerate(triple.channels, start=1):
        have = model.alphabet(f"X{i}")
        if ch.given_axes[0].symbols != have.symbols:
            raise ModelError(f"test channel {i} input alphabet does not match X{i}")
    t1, t2, t3 = (ch.as_tensor() for ch in triple.channels)
    probs = np.einsum("abczf,au,bv,cw->abczfuvw", model.joint.probs, t1, t2, t3)
    axes = model.joint.axes + tuple(ch.out_axes[0] for ch in triple.channels)
    return JointPMF(axes, probs)


def extend_with_auxiliary(model: SourceModel, aux: ConditionalPMF) -> JointPMF:
    """Eight-axis joint from a general conditional p(w1, w2, w3 | x1, x2, x3).

    The auxiliary triple may be correlated given the sources; per-encoder
    admissibility is a separate check (see the rate-region module).
    """
    if tuple(a.name for a in aux.given_axes) != SOURCE_AXES:
        raise ModelError(f"auxiliary conditional must condition on {SOURCE_AXES}")
    if tuple(a.name for a in aux.out_axes) != AUX_AXES:
        raise ModelError(f"auxiliary conditional must output {AUX_AXES}")
    for a in aux.given_axes:
        if model.alphabet(a.name).symbols != a.symbols:
            raise ModelError(f"alphabet mismatch on {a.name!r}")
    if not np.all(aux.defined):
        raise ModelError("auxiliary conditional has undefined rows")
    t = aux.as_tensor()  # (x1, x2, x3, w1, w2, w3)
    probs = np.einsum("abczf,abcuvw->abczfuvw", model.joint.probs, t)
    axes = model.joint.axes + aux.out_axes
    return JointPMF(axes, probs)


@dataclass(frozen=True)
class DistortionMeasure:
    """Per-letter distortion d(x, xhat) >= 0 between a source and its reconstruction."""

    source: Alphabet
    recon: Alphabet
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (self.source.size, self.recon.size):
            raise ModelError(
                f"distortion matrix shape {m.shape} does not match "
                f"({self.source.size}, {self.recon.size})"
            )
        if np.any(m < 0):
            raise ModelError("distortion matrix has a negative entry")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def hamming_distortion(source: Alphabet) -> DistortionMeasure:
    """0/1 distortion with the reconstruction alphabet mirroring the source's."""
    recon = Alphabet(source.name + "_hat", source.symbols)
    return DistortionMeasure(source, recon, 1.0 - np.eye(source.size))


@dataclass(frozen=True)
class DecoderRule:
    """A deterministic reconstruction table for one source.

    table maps the joint index of the observed axes (in the listed order) to a
    reconstruction symbol index.
    """

    source: str
    observes: tuple[str, ...]
    recon: Alphabet
    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.table)
        if not np.issubdtype(t.dtype, np.integer):
            raise DecoderError("decoder table must hold integer reconstruction indices")
        if t.ndim != len(self.observes):
            raise DecoderError(
                f"decoder table has {t.ndim} axes for {len(self.observes)} observed variables"
            )
        if t.size and (t.min() < 0 or t.max() >= self.recon.size):
            raise DecoderError("decoder table entry outside the reconstruction alphabet")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "table", t)


def optimal_decoder(
    p: JointPMF,
    measure: DistortionMeasure,
    source: str,
    observes: tuple[str, ...] = ("W1", "W2", "W3", "Z", "F"),
) -> DecoderRule:
    """Minimum-expected-distortion deterministic decoder for one source.

    For every joint value of the observed axes the rule picks the
    reconstruction minimizing sum_x p(x | observation) d(x, xhat); ties go to
    the lowest reconstruction index.  Observations of probability zero also
    map to index 0 (their choice never affects expected distortion).
    """
    if source in observes:
        raise InvalidQuery(f"source {source!r} cannot be observed by its decoder")
    if measure.source.symbols != p.alphabet(source).symbols:
        raise ModelError(f"distortion measure alphabet does not match {source!r}")
    m = marginalize(p, (source,) + observes)
    order = [m.axis(source)] + [m.axis(n) for n in observes]
    t = np.transpose(m.probs, order)
    flat = t.reshape(t.shape[0], -1)  # (|X|, G)
    scores = measure.matrix.T @ flat  # (|recon|, G): expected distortion, unnormalized
    table = np.argmin(scores, axis=0)  # ties -> lowest index (np.argmin takes first)
    shape = tuple(p.alphabet(n).size for n in observes)
    return DecoderRule(source, observes, measure.recon, table.reshape(shape).astype(np.int64))


def expected_distortion(p: JointPMF, rule: DecoderRule, measure: DistortionMeasure) -> float:
    """E d(X, xhat(observation)) under the joint p for a deterministic rule."""
    if measure.recon.symbols != rule.recon.symbols:
        raise ModelError("decoder rule and distortion measure use different reconstructions")
    m = marginalize(p, (rule.source,) + rule.observes)
    order = [m.axis(rule.source)] + [m.axis(n) for n in rule.observes]
    t = np.transpose(m.probs, order)
    flat = t.reshape(t.shape[0], -1)  # (|X|, G)
    choice = rule.table.reshape(-1)
    if flat.shape[1] != choice.size:
        raise DecoderError(
            f"decoder table has {choice.size} entries for {flat.shape[1]} observations"
        )
    d_sel = measure.matrix[:, choice]  # (|X|, G)
    return float(np.sum(flat * d_sel))


def reference_model() -> SourceModel:
    """The package's running example: binary tree model with BSC edges.

    F ~ Bernoulli(1/2); Z = BSC(0.1)(F); X1 = BSC(0.1)(Z); X2 = BSC(0.2)(Z);
    X3 = BSC(0.1)(F).
    """
    spec = TreeModelSpec(
        f_prior=np.array([0.5, 0.5]),
        z_given_f=bsc_matrix(0.1),
        x1_given_z=bsc_matrix(0.1),
        x2_given_z=bsc_matrix(0.2),
        x3_given_f=bsc_matrix(0.1),
    )
    return assemble_tree_model(spec)


def binary_source_alphabets() -> tuple[Alphabet, ...]:
    return tuple(binary_alphabet(n) for n in CANONICAL_AXES)
