"""Source models, tree structure checks, auxiliary extensions, decoders."""

import math

import numpy as np
import pytest

from rdregion.errors import InvalidQuery, ModelError
from rdregion.generators import (
    copy_third_source,
    random_channel_triple,
    random_correlated_auxiliary,
    random_tree_model,
    seeded,
)
from rdregion.probability import (
    JointPMF,
    entropy,
    mutual_information,
    verify_markov,
)
from rdregion.sources import (
    CANONICAL_AXES,
    SourceModel,
    TestChannelTriple as ChannelTriple,
    TreeModelSpec,
    assemble_tree_model,
    bsc_matrix,
    check_tree_structure,
    expected_distortion,
    extend_with_auxiliary,
    extend_with_test_channels,
    hamming_distortion,
    is_tree_model,
    optimal_decoder,
    reference_model,
    test_channel as make_test_channel,
)

import oracle
from oracle import (
    bayes_distortion_dict,
    extend_dict,
    extend_dict_general,
    mi_dict,
    pmf_to_dict,
    tree_joint_dict,
)


def reference_spec_tables():
    return dict(
        f_prior=[0.5, 0.5],
        z_given_f=[[0.9, 0.1], [0.1, 0.9]],
        x1_given_z=[[0.9, 0.1], [0.1, 0.9]],
        x2_given_z=[[0.8, 0.2], [0.2, 0.8]],
        x3_given_f=[[0.9, 0.1], [0.1, 0.9]],
    )


def bsc_triple(model, p1, p2, p3):
    return ChannelTriple(
        make_test_channel(1, model.alphabet("X1"), bsc_matrix(p1)),
        make_test_channel(2, model.alphabet("X2"), bsc_matrix(p2)),
        make_test_channel(3, model.alphabet("X3"), bsc_matrix(p3)),
    )


# ---------------------------------------------------------------------------
# Tree assembly
# ---------------------------------------------------------------------------

def test_bsc_matrix():
    m = bsc_matrix(0.1)
    assert np.allclose(m, [[0.9, 0.1], [0.1, 0.9]])
    with pytest.raises(ModelError):
        bsc_matrix(1.5)


def test_assemble_tree_matches_direct_product():
    model = reference_model()
    d = tree_joint_dict(**reference_spec_tables())
    got = pmf_to_dict(model.joint.probs)
    assert set(got) == set(d)
    for k, v in d.items():
        assert abs(got[k] - v) < 1e-15


def test_assemble_rejects_bad_rows():
    tabs = reference_spec_tables()
    tabs["z_given_f"] = [[0.9, 0.05], [0.1, 0.9]]
    with pytest.raises(ModelError):
        assemble_tree_model(TreeModelSpec(**{k: np.asarray(v) for k, v in tabs.items()}))


def test_reference_model_known_values():
    model = reference_model()
    p = model.joint
    # symmetric marginals
    assert abs(float(p.probs.sum(axis=(1, 2, 3, 4))[0]) - 0.5) < 1e-12
    # conditional entropy of X1 given both side-information variables
    h = entropy(p, ("X1", "Z", "F")) - entropy(p, ("Z", "F"))
    assert abs(h - 0.46899559358928145) < 1e-12


def test_from_joint_reorders_axes():
    model = reference_model()
    p = model.joint
    order = (3, 0, 4, 2, 1)  # Z, X1, F, X3, X2
    shuffled = JointPMF(
        tuple(p.axes[i] for i in order), np.transpose(p.probs, order)
    )
    back = SourceModel.from_joint(shuffled)
    assert back.joint.names == CANONICAL_AXES
    assert np.allclose(back.joint.probs, p.probs, atol=1e-15)


def test_source_model_requires_canonical_axes():
    model = reference_model()
    p = model.joint
    with pytest.raises(ModelError):
        SourceModel(JointPMF(p.axes[::-1], np.transpose(p.probs, (4, 3, 2, 1, 0))))


# ---------------------------------------------------------------------------
# Tree structure residuals
# ---------------------------------------------------------------------------

def test_reference_model_is_tree():
    res = check_tree_structure(reference_model())
    assert set(res) == {
        "x1_rest_given_z", "x2_rest_given_z", "x3_rest_given_f",
        "x1_x2_given_z", "x12_x3_given_zf",
    }
    assert max(res.values()) < 1e-12
    assert is_tree_model(reference_model())


def test_copied_third_source_breaks_tree():
    model = copy_third_source(reference_model())
    res = check_tree_structure(model)
    assert not is_tree_model(model)
    # X2 still only touches the rest through Z, and X1 indep X2 given Z
    assert res["x2_rest_given_z"] < 1e-12
    assert res["x1_x2_given_z"] < 1e-12
    # the copy makes X3 depend on X1 beyond F / beyond (Z, F)
    assert res["x1_rest_given_z"] > 0.4
    assert res["x3_rest_given_f"] > 0.6
    assert res["x12_x3_given_zf"] > 0.4
    # each residual equals the direct-summation conditional mutual information
    d = pmf_to_dict(model.joint.probs)
    assert abs(res["x1_rest_given_z"] - mi_dict(d, (0,), (1, 2, 4), (3,))) < 1e-10
    assert abs(res["x2_rest_given_z"] - max(mi_dict(d, (1,), (0, 2, 4), (3,)), 0.0)) < 1e-10
    assert abs(res["x3_rest_given_f"] - mi_dict(d, (2,), (0, 1, 3), (4,))) < 1e-10
    assert abs(res["x1_x2_given_z"] - max(mi_dict(d, (0,), (1,), (3,)), 0.0)) < 1e-10
    assert abs(res["x12_x3_given_zf"] - mi_dict(d, (0, 1), (2,), (3, 4))) < 1e-10


def test_tree_residual_sweep():
    rng = seeded(42)
    for _ in range(10):
        model = random_tree_model(rng, (2, 3, 2, 2, 3))
        assert max(check_tree_structure(model).values()) < 1e-10


# ---------------------------------------------------------------------------
# Extensions with test channels / auxiliaries
# ---------------------------------------------------------------------------

def test_extend_with_test_channels_matches_oracle():
    model = reference_model()
    triple = bsc_triple(model, 0.25, 0.25, 0.25)
    ext = extend_with_test_channels(model, triple)
    assert ext.names == CANONICAL_AXES + ("W1", "W2", "W3")
    d5 = pmf_to_dict(model.joint.probs)
    rows = [[0.75, 0.25], [0.25, 0.75]]
    d8 = extend_dict(d5, rows, rows, rows)
    got = pmf_to_dict(ext.probs)
    for k, v in d8.items():
        assert abs(got[k] - v) < 1e-15
    # every per-encoder admissibility residual vanishes for product channels
    for i, rest in ((1, ("X2", "X3")), (2, ("X1", "X3")), (3, ("X1", "X2"))):
        res = verify_markov(ext, (f"W{i}",), (f"X{i}",), rest + ("Z", "F"))
        assert res < 1e-12


def test_test_channel_validation():
    model = reference_model()
    ch1 = make_test_channel(1, model.alphabet("X1"), bsc_matrix(0.25))
    with pytest.raises(ModelError):
        ChannelTriple(ch1, ch1, ch1)  # encoder-2 slot holds an X1 channel
    with pytest.raises(ModelError):
        make_test_channel(4, model.alphabet("X1"), bsc_matrix(0.25))


def test_extend_with_auxiliary_matches_oracle():
    rng = seeded(7)
    model = random_tree_model(rng)
    aux = random_correlated_auxiliary(rng, model, w_sizes=(2, 2, 2))
    ext = extend_with_auxiliary(model, aux)
    d5 = pmf_to_dict(model.joint.probs)
    t = aux.as_tensor()
    aux_dict = {
        (a, b, c, u, v, w): float(t[a, b, c, u, v, w])
        for a in range(2) for b in range(2) for c in range(2)
        for u in range(2) for v in range(2) for w in range(2)
    }
    d8 = extend_dict_general(d5, aux_dict)
    got = pmf_to_dict(ext.probs)
    for k, v in d8.items():
        assert abs(got[k] - v) < 1e-14


def test_mixture_auxiliary_is_admissible_but_correlated():
    rng = seeded(123)
    model = random_tree_model(rng)
    aux = random_correlated_auxiliary(rng, model, w_sizes=(2, 2, 2))
    ext = extend_with_auxiliary(model, aux)
    # each W_i touches the rest of the world only through X_i ...
    for i, rest in ((1, ("X2", "X3")), (2, ("X1", "X3")), (3, ("X1", "X2"))):
        assert verify_markov(ext, (f"W{i}",), (f"X{i}",), rest + ("Z", "F")) < 1e-10
    # ... yet the auxiliaries are mutually correlated given the sources
    assert mutual_information(
        ext, ("W1",), ("W2",), given=("X1", "X2", "X3")
    ) > 1e-4


def test_product_triple_through_general_path_agrees():
    rng = seeded(5)
    model = random_tree_model(rng)
    triple = random_channel_triple(rng, model, w_sizes=(2, 3, 2))
    via_product = extend_with_test_channels(model, triple)
    t1, t2, t3 = (ch.as_tensor() for ch in triple.channels)
    tensor = np.einsum("au,bv,cw->abcuvw", t1, t2, t3)
    from rdregion.probability import ConditionalPMF
    aux = ConditionalPMF(
        tuple(model.alphabet(f"X{i}") for i in (1, 2, 3)),
        tuple(ch.out_axes[0] for ch in triple.channels),
        tensor.reshape(8, -1),
        np.ones(8, dtype=bool),
    )
    via_general = extend_with_auxiliary(model, aux)
    assert np.allclose(via_product.probs, via_general.probs, atol=1e-15)


def test_extend_with_auxiliary_validation():
    model = reference_model()
    rng = seeded(9)
    aux = random_correlated_auxiliary(rng, model, w_sizes=(2, 2, 2))
    bad = type(aux)(
        aux.given_axes[::-1], aux.out_axes, aux.rows, aux.defined
    )
    with pytest.raises(ModelError):
        extend_with_auxiliary(model, bad)


# ---------------------------------------------------------------------------
# Distortion measures and optimal decoders
# ---------------------------------------------------------------------------

def test_hamming_distortion_matrix():
    m = hamming_distortion(reference_model().alphabet("X1"))
    assert np.allclose(m.matrix, [[0.0, 1.0], [1.0, 0.0]])
    assert m.recon.symbols == ("0", "1")


def test_zero_rate_bayes_distortions():
    # decoding each source from the two side-information variables alone
    model = reference_model()
    triple = bsc_triple(model, 0.25, 0.25, 0.25)
    ext = extend_with_test_channels(model, triple)
    expect = {"X1": 0.1, "X2": 0.2, "X3": 0.1}
    for name, want in expect.items():
        measure = hamming_distortion(model.alphabet(name))
        rule = optimal_decoder(ext, measure, name, observes=("Z", "F"))
        got = expected_distortion(ext, rule, measure)
        assert abs(got - want) < 1e-12


def test_optimal_decoder_matches_oracle_sweep():
    rng = seeded(77)
    ham = [[0.0, 1.0], [1.0, 0.0]]
    for trial in range(8):
        model = random_tree_model(rng)
        triple = random_channel_triple(rng, model, w_sizes=(2, 2, 2))
        ext = extend_with_test_channels(model, triple)
        d8 = pmf_to_dict(ext.probs)
        for i, src in enumerate(("X1", "X2", "X3")):
            measure = hamming_distortion(model.alphabet(src))
            rule = optimal_decoder(ext, measure, src)
            got = expected_distortion(ext, rule, measure)
            want = bayes_distortion_dict(
                d8, ham, i, (oracle.W1, oracle.W2, oracle.W3, oracle.Z, oracle.F)
            )
            assert abs(got - want) < 1e-12
            assert 0.0 <= got <= 0.5 + 1e-12


def test_decoder_tie_breaks_to_lowest_index():
    # X uniform and independent of the observation: both reconstructions tie
    model = reference_model()
    triple = bsc_triple(model, 0.5, 0.25, 0.25)  # W1 independent of everything
    ext = extend_with_test_channels(model, triple)
    measure = hamming_distortion(model.alphabet("X1"))
    rule = optimal_decoder(ext, measure, "X1", observes=("W1",))
    assert rule.table.tolist() == [0, 0]


def test_decoder_validation():
    model = reference_model()
    triple = bsc_triple(model, 0.25, 0.25, 0.25)
    ext = extend_with_test_channels(model, triple)
    measure = hamming_distortion(model.alphabet("X1"))
    with pytest.raises(InvalidQuery):
        optimal_decoder(ext, measure, "X1", observes=("X1", "Z"))
    from rdregion.probability import indexed_alphabet
    with pytest.raises(ModelError):
        optimal_decoder(ext, hamming_distortion(indexed_alphabet("X1", 3)), "X1")


def test_expected_distortion_hand_case():
    # single fair bit observed through a 0.25-crossover channel:
    # identity decoding errs exactly 25% of the time
    model = reference_model()
    triple = bsc_triple(model, 0.25, 0.25, 0.25)
    ext = extend_with_test_channels(model, triple)
    measure = hamming_distortion(model.alphabet("X1"))
    rule = optimal_decoder(ext, measure, "X1", observes=("W1",))
    assert rule.table.tolist() == [0, 1]
    assert abs(expected_distortion(ext, rule, measure) - 0.25) < 1e-12
