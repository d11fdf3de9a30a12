"""Monte Carlo simulation of the random-binning achievability scheme.

One trial, at blocklength n:

1. draw an i.i.d. source block (x1, x2, x3, z, f)^n from the model;
2. each encoder m scans its codebook — word_count i.i.d. codewords drawn from
   the marginal law of W_m — for the lowest-index word jointly typical with
   x_m^n under the pair law p(x_m, w_m), and sends that word's bin;
3. the decoder, knowing (z^n, f^n) and the three received bins, scans all
   candidate codeword triples in lexicographic index order for joint
   typicality under p(w1, w2, w3, z, f).

Outcomes are classified in order: event 1 — some encoder found no typical
codeword; event 2 — the chosen triple itself is not jointly typical with the
side information; event 3 — a second typical triple exists among the bin
candidates (non-unique decoding); otherwise success, and per-letter
Bayes-optimal decoders reconstruct the sources for the empirical distortion.

Determinism and lazy codebooks: every random object is drawn from a
counter-based generator keyed by (seed, purpose, encoder, trial), so any
codeword can be regenerated in isolation; codebooks are never materialized.
Bins form a balanced random partition (a uniformly random assignment subject
to bin sizes differing by at most one), so rate = rate_prime yields exactly
one codeword per bin; only the received bins' member lists are ever sampled,
via draws that are distribution-exact for that partition.

Typicality: the strict letter-frequency test (is_typical) follows the robust
definition |count(a)/n - p(a)| <= eps * p(a).  The operational checks inside
the simulator default to the weak (entropy-based) test
|-(1/n) log2 p(block) - H(p)| <= eps, because at desk-scale blocklengths the
robust typical set of a many-valued joint law is empty; the strict test
remains available via typicality="robust".
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, InputError, InsufficientSamples
from .probability import JointPMF, marginalize
from .sources import (
    AUX_AXES,
    CANONICAL_AXES,
    DistortionMeasure,
    SourceModel,
    TestChannelTriple,
    extend_with_test_channels,
    optimal_decoder,
)
from .optimizer import default_measures

MAX_BLOCKLENGTH = 2000
MAX_CODEBOOK_WORDS = 2**20
MAX_TRIALS = 2**32

PURPOSE_SOURCE = 0
PURPOSE_WORD = 1
PURPOSE_BINS = 2
PURPOSE_CHANNEL = 3

TYPICALITY_WEAK = "weak"
TYPICALITY_ROBUST = "robust"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TypicalityParams:
    """Blocklength and typicality slack for one experiment."""

    epsilon: float
    n: int

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 1 <= self.n <= MAX_BLOCKLENGTH:
            raise ConfigError(
                f"blocklength {self.n} outside 1..{MAX_BLOCKLENGTH} (blocklength cap)"
            )


def _stream_key(seed: int, purpose: int, encoder: int, trial: int) -> list[int]:
    """Philox key for one logical random stream.

    Layout of the second key word: purpose (3 bits, at 61) | encoder (2 bits,
    at 59) | reserved (27 bits, at 32) | trial (32 bits, at 0).
    """
    if not 0 <= trial < MAX_TRIALS:
        raise ConfigError(f"trial index {trial} outside 0..{MAX_TRIALS - 1}")
    packed = (purpose << 61) | (encoder << 59) | (trial & 0xFFFFFFFF)
    return [seed & _MASK64, packed & _MASK64]


def _stream(seed: int, purpose: int, encoder: int, trial: int,
            counter_block: int = 0) -> np.random.Generator:
    bg = np.random.Philox(key=_stream_key(seed, purpose, encoder, trial),
                          counter=[counter_block, 0, 0, 0])
    return np.random.Generator(bg)


def _categorical(rng: np.random.Generator, cdf: np.ndarray, n: int) -> np.ndarray:
    u = rng.random(n)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1)


def _conditional_draw(rng: np.random.Generator, row_cdfs: np.ndarray,
                      given: np.ndarray) -> np.ndarray:
    u = rng.random(given.shape[0])
    idx = (row_cdfs[given] < u[:, None]).sum(axis=1)
    return np.minimum(idx, row_cdfs.shape[1] - 1)


# ---------------------------------------------------------------------------
# Typicality predicates
# ---------------------------------------------------------------------------

def _validate_sequences(seqs: Sequence[np.ndarray], p: JointPMF) -> tuple[np.ndarray, ...]:
    if len(seqs) != len(p.axes):
        raise InputError(f"{len(seqs)} sequences supplied for {len(p.axes)} axes")
    arrays = []
    n = None
    for seq, axis in zip(seqs, p.axes):
        a = np.asarray(seq)
        if not np.issubdtype(a.dtype, np.integer):
            raise InputError(f"sequence for axis {axis.name!r} must hold symbol indices")
        if a.ndim != 1:
            raise InputError(f"sequence for axis {axis.name!r} must be one-dimensional")
        if n is None:
            n = a.shape[0]
        elif a.shape[0] != n:
            raise InputError(
                f"sequence lengths differ: axis {axis.name!r} has {a.shape[0]}, expected {n}"
            )
        if a.size and (a.min() < 0 or a.max() >= axis.size):
            raise InputError(f"sequence for axis {axis.name!r} contains an out-of-range symbol")
        arrays.append(a.astype(np.int64))
    if n is None or n == 0:
        raise InputError("empty sequences")
    return tuple(arrays)


def is_typical(seqs: Sequence[np.ndarray], p: JointPMF, params: TypicalityParams) -> bool:
    """Letter-frequency (robust) joint typicality.

    True iff every joint symbol a satisfies |count(a)/n - p(a)| <= eps * p(a);
    in particular symbols of probability zero must not occur.
    """
    arrays = _validate_sequences(seqs, p)
    n = arrays[0].shape[0]
    if n != params.n:
        raise InputError(f"sequences have length {n}, parameters say n={params.n}")
    shape = tuple(a.size for a in p.axes)
    flat = np.ravel_multi_index(arrays, shape)
    counts = np.bincount(flat, minlength=int(np.prod(shape))).astype(np.float64)
    freq = counts / n
    probs = p.probs.reshape(-1)
    return bool(np.all(np.abs(freq - probs) <= params.epsilon * probs + 1e-15))


def empirical_entropy_gap(seqs: Sequence[np.ndarray], p: JointPMF) -> float:
    """|-(1/n) log2 p(block) - H(p)|; infinite if a zero-probability symbol occurs."""
    arrays = _validate_sequences(seqs, p)
    n = arrays[0].shape[0]
    shape = tuple(a.size for a in p.axes)
    flat = np.ravel_multi_index(arrays, shape)
    probs = p.probs.reshape(-1)
    picked = probs[flat]
    if np.any(picked <= 0.0):
        return math.inf
    t = float(-np.log2(picked).sum() / n)
    h = float(-np.sum(probs[probs > 0] * np.log2(probs[probs > 0])))
    return abs(t - h)


def is_weakly_typical(seqs: Sequence[np.ndarray], p: JointPMF,
                      params: TypicalityParams) -> bool:
    return empirical_entropy_gap(seqs, p) <= params.epsilon


def _check_typicality_kind(kind: str) -> None:
    if kind not in (TYPICALITY_WEAK, TYPICALITY_ROBUST):
        raise ConfigError(f"typicality must be 'weak' or 'robust', got {kind!r}")


# ---------------------------------------------------------------------------
# Lazy codebooks and balanced bins
# ---------------------------------------------------------------------------

def rate_bits(n: int, rate: float) -> int:
    """ceil(n * rate) bits, tolerant of float fuzz just below an integer."""
    if rate < 0:
        raise ConfigError(f"rates must be nonnegative, got {rate}")
    return max(0, math.ceil(n * rate - 1e-9))


@dataclass(frozen=True)
class Codebook:
    """A lazily generated i.i.d. codebook for one encoder and one trial.

    word_count = 2^ceil(n * rate_prime) codewords, each n i.i.d. symbols from
    the marginal law of W_m.  Words are addressed by Philox counter blocks, so
    word(s) is reproducible without generating words 0..s-1.
    """

    encoder: int
    rate_prime: float
    n: int
    word_count: int
    seed: int
    trial: int
    law_cdf: np.ndarray

    @property
    def blocks_per_word(self) -> int:
        return (self.n + 3) // 4

    def words(self, lo: int, hi: int) -> np.ndarray:
        """Codewords lo..hi-1 as an (hi-lo, n) index matrix."""
        if not 0 <= lo <= hi <= self.word_count:
            raise ConfigError(f"word range {lo}..{hi} outside 0..{self.word_count}")
        count = hi - lo
        if count == 0:
            return np.empty((0, self.n), dtype=np.int64)
        if self.n % 4 == 0:
            rng = _stream(self.seed, PURPOSE_WORD, self.encoder, self.trial,
                          counter_block=lo * self.blocks_per_word)
            u = rng.random(count * self.n).reshape(count, self.n)
            idx = np.searchsorted(self.law_cdf, u.reshape(-1), side="right")
            return np.minimum(idx, len(self.law_cdf) - 1).reshape(count, self.n)
        out = np.empty((count, self.n), dtype=np.int64)
        for j in range(count):
            rng = _stream(self.seed, PURPOSE_WORD, self.encoder, self.trial,
                          counter_block=(lo + j) * self.blocks_per_word)
            out[j] = _categorical(rng, self.law_cdf, self.n)
        return out

    def word(self, s: int) -> np.ndarray:
        return self.words(s, s + 1)[0]

    def words_at(self, ids: Sequence[int]) -> np.ndarray:
        """Codewords at the given sorted ids, batching consecutive runs."""
        out = np.empty((len(ids), self.n), dtype=np.int64)
        i = 0
        while i < len(ids):
            j = i
            while j + 1 < len(ids) and ids[j + 1] == ids[j] + 1:
                j += 1
            out[i:j + 1] = self.words(int(ids[i]), int(ids[j]) + 1)
            i = j + 1
        return out


@dataclass(frozen=True)
class BinAssignment:
    """A balanced random partition of codeword indices into bins.

    bin_count = 2^ceil(n * rate) bins; sizes differ by at most one, the
    assignment is uniform over all such partitions.  Only the received bin is
    ever realized: candidate_ids draws the co-members of the true codeword's
    bin exactly according to that distribution.
    """

    encoder: int
    rate: float
    bin_count: int
    word_count: int

    def candidate_ids(self, rng: np.random.Generator, true_word: int) -> list[int]:
        """Sorted member ids of the bin containing true_word (itself included)."""
        k, b = self.word_count, self.bin_count
        q, r = divmod(k, b)
        size = q + 1 if (r > 0 and rng.random() < r * (q + 1) / k) else q
        others: list[int] = []
        seen = {true_word}
        while len(others) < size - 1:
            draw = int(rng.integers(0, k))
            if draw not in seen:
                seen.add(draw)
                others.append(draw)
        return sorted(others + [true_word])


@dataclass(frozen=True)
class BinningScheme:
    """Resolved per-encoder codebook and bin dimensions for one run."""

    n: int
    rates: tuple[float, float, float]
    rates_prime: tuple[float, float, float]
    word_bits: tuple[int, int, int]
    bin_bits: tuple[int, int, int]

    @property
    def word_counts(self) -> tuple[int, int, int]:
        return tuple(2**b for b in self.word_bits)  # type: ignore[return-value]

    @property
    def bin_counts(self) -> tuple[int, int, int]:
        return tuple(2**b for b in self.bin_bits)  # type: ignore[return-value]


def resolve_binning(n: int, rates: Sequence[float], rates_prime: Sequence[float]) -> BinningScheme:
    if len(rates) != 3 or len(rates_prime) != 3:
        raise ConfigError("rates and rates_prime must each hold three values")
    word_bits = []
    bin_bits = []
    for m in (1, 2, 3):
        r, rp = float(rates[m - 1]), float(rates_prime[m - 1])
        if r > rp + 1e-12:
            raise ConfigError(f"encoder {m}: rate {r} exceeds rate_prime {rp}")
        wb = rate_bits(n, rp)
        if 2**wb > MAX_CODEBOOK_WORDS:
            raise ConfigError(
                f"encoder {m}: codebook needs 2^{wb} words, above the cap of "
                f"2^20 ({MAX_CODEBOOK_WORDS}) — lower rate_prime or the blocklength"
            )
        word_bits.append(wb)
        bin_bits.append(rate_bits(n, r))
    return BinningScheme(
        n=n,
        rates=(float(rates[0]), float(rates[1]), float(rates[2])),
        rates_prime=(float(rates_prime[0]), float(rates_prime[1]), float(rates_prime[2])),
        word_bits=(word_bits[0], word_bits[1], word_bits[2]),
        bin_bits=(bin_bits[0], bin_bits[1], bin_bits[2]),
    )


@dataclass(frozen=True)
class SimReport:
    """Aggregated outcome counts and empirical distortions of a binning run."""

    trials: int
    event1_count: int
    event2_count: int
    event3_count: int
    decode_failures: int
    success_count: int
    empirical_distortions: tuple[float, float, float] | None
    per_class_rates: dict[str, float]


# ---------------------------------------------------------------------------
# Laws shared by the experiments
# ---------------------------------------------------------------------------

class _Laws:
    """Tables derived from (model, channels) used by every trial."""

    def __init__(self, model: SourceModel, channels: TestChannelTriple,
                 measures: Sequence[DistortionMeasure] | None):
        self.model = model
        self.channels = channels
        p8 = extend_with_test_channels(model, channels)
        self.p8 = p8
        self.source_pmf = model.joint
        src = self.source_pmf.probs.reshape(-1)
        self.source_cdf = np.cumsum(src)
        self.source_shape = tuple(a.size for a in model.joint.axes)

        self.channel_cdfs = []
        self.pair_logs = []
        self.pair_entropies = []
        self.pair_pmfs = []
        self.word_cdfs = []
        for m in (1, 2, 3):
            ch = channels.channels[m - 1]
            rows = np.asarray(ch.rows)
            self.channel_cdfs.append(np.cumsum(rows, axis=1))
            pair = marginalize(p8, (f"X{m}", f"W{m}"))
            order = [pair.axis(f"X{m}"), pair.axis(f"W{m}")]
            pair_probs = np.transpose(pair.probs, order)
            self.pair_pmfs.append(JointPMF(tuple(pair.axes[i] for i in order), pair_probs))
            with np.errstate(divide="ignore"):
                self.pair_logs.append(np.where(pair_probs > 0.0,
                                               np.log2(np.where(pair_probs > 0, pair_probs, 1.0)),
                                               -np.inf))
            pos = pair_probs[pair_probs > 0]
            self.pair_entropies.append(float(-np.sum(pos * np.log2(pos))))
            w_marg = pair_probs.sum(axis=0)
            self.word_cdfs.append(np.cumsum(w_marg))

        decode = marginalize(p8, AUX_AXES + ("Z", "F"))
        order = [decode.axis(a) for a in AUX_AXES + ("Z", "F")]
        dec_probs = np.transpose(decode.probs, order)
        with np.errstate(divide="ignore"):
            self.decode_logs = np.where(dec_probs > 0.0,
                                        np.log2(np.where(dec_probs > 0, dec_probs, 1.0)),
                                        -np.inf)
        pos = dec_probs[dec_probs > 0]
        self.decode_entropy = float(-np.sum(pos * np.log2(pos)))
        self.decode_pmf = JointPMF(
            tuple(decode.axes[i] for i in order), dec_probs
        )

        self.measures = tuple(measures) if measures is not None else default_measures(model)
        self.decoder_tables = []
        for i, measure in enumerate(self.measures, start=1):
            rule = optimal_decoder(p8, measure, f"X{i}")
            self.decoder_tables.append(rule.table)

    def draw_source(self, seed: int, trial: int, n: int) -> tuple[np.ndarray, ...]:
        rng = _stream(seed, PURPOSE_SOURCE, 0, trial)
        flat = _categorical(rng, self.source_cdf, n)
        return np.unravel_index(flat, self.source_shape)

    def draw_channel_outputs(self, seed: int, trial: int,
                             xs: Sequence[np.ndarray]) -> list[np.ndarray]:
        outs = []
        for m in (1, 2, 3):
            rng = _stream(seed, PURPOSE_CHANNEL, m, trial)
            outs.append(_conditional_draw(rng, self.channel_cdfs[m - 1], xs[m - 1]))
        return outs

    def pair_gap(self, m: int, x_seq: np.ndarray, w_block: np.ndarray) -> np.ndarray:
        """Entropy gaps of (x, w) word rows under the pair law; shape (rows,)."""
        logs = self.pair_logs[m - 1][x_seq[None, :], w_block]
        t = -logs.mean(axis=1)
        return np.abs(t - self.pair_entropies[m - 1])

    def decode_gap(self, w1: np.ndarray, w2: np.ndarray, w3: np.ndarray,
                   z: np.ndarray, f: np.ndarray) -> float:
        logs = self.decode_logs[w1, w2, w3, z, f]
        if np.any(np.isneginf(logs)):
            return math.inf
        return abs(float(-logs.mean()) - self.decode_entropy)


# ---------------------------------------------------------------------------
# The two experiments
# ---------------------------------------------------------------------------

def markov_lemma_trial(
    model: SourceModel,
    channels: TestChannelTriple,
    params: TypicalityParams,
    trials: int,
    seed: int,
    typicality: str = TYPICALITY_WEAK,
) -> float:
    """Fraction of typical source blocks whose channel outputs stay typical.

    Each trial draws a source block; blocks that are not jointly typical under
    the five-variable law are rejected.  For accepted blocks, each w_m^n is
    drawn memorylessly from p(w_m | x_m), and the trial counts as a success
    when the full eight-variable block is jointly typical.  Returns successes
    divided by accepted blocks; raises InsufficientSamples if nothing is
    accepted.
    """
    _check_typicality_kind(typicality)
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    laws = _Laws(model, channels, None)
    n = params.n
    p5 = model.joint
    p8 = laws.p8
    order8 = CANONICAL_AXES + AUX_AXES
    if p8.names != order8:
        raise ConfigError("unexpected axis order in the extended joint")

    accepted = 0
    successes = 0
    for t in range(trials):
        xs = laws.draw_source(seed, t, n)
        block5 = tuple(xs)
        if typicality == TYPICALITY_WEAK:
            src_ok = is_weakly_typical(block5, p5, params)
        else:
            src_ok = is_typical(block5, p5, params)
        if not src_ok:
            continue
        accepted += 1
        ws = laws.draw_channel_outputs(seed, t, xs[:3])
        block8 = block5 + tuple(ws)
        if typicality == TYPICALITY_WEAK:
            ok = is_weakly_typical(block8, p8, params)
        else:
            ok = is_typical(block8, p8, params)
        if ok:
            successes += 1
    if accepted == 0:
        raise InsufficientSamples(
            f"no source block of {trials} was typical (acceptance rate 0.0); "
            f"raise epsilon or the trial count"
        )
    return successes / accepted


def _encode_one(laws: _Laws, book: Codebook, m: int, x_seq: np.ndarray,
                epsilon: float, typicality: str, params: TypicalityParams) -> int | None:
    """Lowest codeword index typical with x_seq, or None."""
    batch = 64
    lo = 0
    while lo < book.word_count:
        hi = min(lo + batch, book.word_count)
        block = book.words(lo, hi)
        if typicality == TYPICALITY_WEAK:
            gaps = laws.pair_gap(m, x_seq, block)
            hits = np.nonzero(gaps <= epsilon)[0]
        else:
            pair = laws.pair_pmfs[m - 1]
            hits_list = [j for j in range(block.shape[0])
                         if is_typical((x_seq, block[j]), pair, params)]
            hits = np.asarray(hits_list, dtype=np.int64)
        if hits.size:
            return lo + int(hits[0])
        lo = hi
        batch = min(batch * 4, 4096)
    return None


def run_binning_trials(
    model: SourceModel,
    channels: TestChannelTriple,
    rates: Sequence[float],
    rates_prime: Sequence[float],
    params: TypicalityParams,
    trials: int,
    seed: int,
    typicality: str = TYPICALITY_WEAK,
    measures: Sequence[DistortionMeasure] | None = None,
    threads: int = 1,
) -> SimReport:
    """Monte Carlo run of the full encode-bin-decode pipeline.

    Every trial uses fresh codebooks and bins derived from (seed, trial), so
    reports are reproducible bit for bit; trials are independent and evaluated
    in chunks (optionally threaded), with aggregation in trial order.
    """
    _check_typicality_kind(typicality)
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if trials > MAX_TRIALS:
        raise ConfigError(f"trials {trials} above the cap of {MAX_TRIALS}")
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    scheme = resolve_binning(params.n, rates, rates_prime)
    laws = _Laws(model, channels, measures)
    n = params.n

    def run_trial(t: int) -> tuple[int, tuple[float, float, float] | None]:
        xs = laws.draw_source(seed, t, n)
        x123, z_seq, f_seq = xs[:3], xs[3], xs[4]
        books = [
            Codebook(m, scheme.rates_prime[m - 1], n, scheme.word_counts[m - 1],
                     seed, t, laws.word_cdfs[m - 1])
            for m in (1, 2, 3)
        ]
        chosen: list[int] = []
        for m in (1, 2, 3):
            s = _encode_one(laws, books[m - 1], m, x123[m - 1],
                            params.epsilon, typicality, params)
            if s is None:
                return 1, None
            chosen.append(s)
        words = [books[m - 1].word(chosen[m - 1]) for m in (1, 2, 3)]
        if typicality == TYPICALITY_WEAK:
            true_ok = laws.decode_gap(words[0], words[1], words[2], z_seq, f_seq) <= params.epsilon
        else:
            true_ok = is_typical((words[0], words[1], words[2], z_seq, f_seq),
                                 laws.decode_pmf, params)
        if not true_ok:
            return 2, None
        candidate_lists = []
        candidate_words = []
        for m in (1, 2, 3):
            bins = BinAssignment(m, scheme.rates[m - 1], scheme.bin_counts[m - 1],
                                 scheme.word_counts[m - 1])
            rng = _stream(seed, PURPOSE_BINS, m, t)
            ids = bins.candidate_ids(rng, chosen[m - 1])
            candidate_lists.append(ids)
            candidate_words.append(books[m - 1].words_at(ids))
        typical_count = 0
        for i1, s1 in enumerate(candidate_lists[0]):
            for i2, s2 in enumerate(candidate_lists[1]):
                for i3, s3 in enumerate(candidate_lists[2]):
                    w1 = candidate_words[0][i1]
                    w2 = candidate_words[1][i2]
                    w3 = candidate_words[2][i3]
                    if typicality == TYPICALITY_WEAK:
                        ok = laws.decode_gap(w1, w2, w3, z_seq, f_seq) <= params.epsilon
                    else:
                        ok = is_typical((w1, w2, w3, z_seq, f_seq), laws.decode_pmf, params)
                    if ok:
                        typical_count += 1
                        if typical_count >= 2:
                            return 3, None
        # Unique decoding: per-letter reconstruction with the Bayes decoders.
        dists = []
        for i in (1, 2, 3):
            table = laws.decoder_tables[i - 1]
            recon = table[words[0], words[1], words[2], z_seq, f_seq]
            matrix = laws.measures[i - 1].matrix
            dists.append(float(matrix[x123[i - 1], recon].mean()))
        return 0, (dists[0], dists[1], dists[2])

    def run_span(span: tuple[int, int]) -> list[tuple[int, tuple[float, float, float] | None]]:
        return [run_trial(t) for t in range(span[0], span[1])]

    chunk = max(1, math.ceil(trials / max(threads, 1) / 4))
    spans = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_span, spans))
    else:
        parts = [run_span(s) for s in spans]
    results = [r for part in parts for r in part]

    counts = {0: 0, 1: 0, 2: 0, 3: 0}
    dist_sum = np.zeros(3)
    for cls, dists in results:
        counts[cls] += 1
        if cls == 0 and dists is not None:
            dist_sum += np.asarray(dists)
    successes = counts[0]
    empirical = None
    if successes > 0:
        avg = dist_sum / successes
        empirical = (float(avg[0]), float(avg[1]), float(avg[2]))
    failures = counts[1] + counts[2] + counts[3]
    per_class = {
        "event1": counts[1] / trials,
        "event2": counts[2] / trials,
        "event3": counts[3] / trials,
        "success": successes / trials,
    }
    return SimReport(
        trials=trials,
        event1_count=counts[1],
        event2_count=counts[2],
        event3_count=counts[3],
        decode_failures=failures,
        success_count=successes,
        empirical_distortions=empirical,
        per_class_rates=per_class,
    )
