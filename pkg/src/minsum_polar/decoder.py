"""Polar encoding, successive-cancellation decoding, and the Monte Carlo
harness that checks the decoders against the analytics.

Decoding follows the recursive schedule that pairs adjacent inputs: the
check combination of ``(y0, y1), (y2, y3), ...`` feeds the left subtree, the
re-encoded left decisions steer the right subtree, and blocks listed in the
genie set are overwritten with their true partial encoding once all their
decisions have been made.  All decoders are vectorized over a leading trial
axis; the single-frame entry points are one-row batches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channels import LabeledChannel, label_llrs
from .thresholds import is_leaf_set

_ATANH_CLIP = 1.0 - 1e-15
_ORACLE_MAX_N = 16
_SIM_CHUNK = 2048


def f_minsum(a, b):
    """Check-node combination under the min-sum rule: sign * sign * min."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def f_exact(a, b):
    """Exact check-node combination ``2 * atanh(tanh(a/2) * tanh(b/2))``."""
    prod = np.tanh(np.asarray(a, dtype=np.float64) / 2.0) * np.tanh(
        np.asarray(b, dtype=np.float64) / 2.0
    )
    return 2.0 * np.arctanh(np.clip(prod, -_ATANH_CLIP, _ATANH_CLIP))


def g_combine(u, a, b):
    """Variable-node combination ``(-1)**u * a + b``."""
    return (1 - 2 * np.asarray(u)) * np.asarray(a) + np.asarray(b)


@lru_cache(maxsize=None)
def _bit_reversal(size: int) -> np.ndarray:
    bits = size.bit_length() - 1
    perm = np.zeros(size, dtype=np.int64)
    for k in range(size):
        perm[k] = int(format(k, f"0{bits}b")[::-1], 2) if bits else 0
    perm.setflags(write=False)
    return perm


def _encode_rows(bits: np.ndarray) -> np.ndarray:
    """Batched polar transform: each row ``u`` maps to its codeword."""
    size = bits.shape[-1]
    out = bits[..., _bit_reversal(size)].copy()
    span = size
    while span > 1:
        half = span // 2
        view = out.reshape(-1, size // span, span)
        view[:, :, :half] ^= view[:, :, half:]
        span = half
    return out


def polar_encode(u) -> np.ndarray:
    """Encode one input vector: bit-reversal permutation followed by the
    n-fold Kronecker power of the standard binary kernel.  Self-inverse."""
    u = np.asarray(u, dtype=np.int8) & 1
    size = u.size
    if size == 0 or size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    return _encode_rows(u[np.newaxis, :])[0]


def _decode_rows(lam, d, j, check_fn, info_mask, u_hat, g_set, true_u, flags):
    span = lam.shape[1]
    if span == 1:
        i = j
        if info_mask[i]:
            dec = (lam[:, 0] < 0).astype(np.int8)
        else:
            dec = np.zeros(lam.shape[0], dtype=np.int8)
        u_hat[:, i] = dec
        c = dec[:, np.newaxis]
    else:
        even = lam[:, 0::2]
        odd = lam[:, 1::2]
        a = _decode_rows(check_fn(even, odd), d + 1, 2 * j, check_fn, info_mask, u_hat, g_set, true_u, flags)
        b = _decode_rows(g_combine(a, even, odd), d + 1, 2 * j + 1, check_fn, info_mask, u_hat, g_set, true_u, flags)
        c = np.empty((lam.shape[0], span), dtype=np.int8)
        c[:, 0::2] = a ^ b
        c[:, 1::2] = b
    if g_set and (d, j) in g_set:
        start = j * span
        block = true_u[:, start : start + span]
        flags[(d, j)] = (u_hat[:, start : start + span] != block).any(axis=1)
        u_hat[:, start : start + span] = block
        c = _encode_rows(block)
    return c


def _sc_decode_batch(lam, frozen, check_fn, g_set=None, true_u=None):
    trials, size = lam.shape
    if size == 0 or size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    info_mask = np.ones(size, dtype=bool)
    for i in frozen:
        info_mask[i] = False
    u_hat = np.zeros((trials, size), dtype=np.int8)
    flags = {}
    _decode_rows(lam, 0, 0, check_fn, info_mask, u_hat, g_set or set(), true_u, flags)
    return u_hat, flags


def msa_sc_decode(labels, frozen=()) -> np.ndarray:
    """Min-sum successive-cancellation decoding of one label vector.

    Frozen positions are forced to 0; ties (label exactly 0) decide 0.
    Returns the estimate in the information domain.
    """
    labels = np.asarray(labels)
    u_hat, _ = _sc_decode_batch(labels[np.newaxis, :], frozen, f_minsum)
    return u_hat[0]


def exact_sc_decode(llrs, frozen=()) -> np.ndarray:
    """Successive-cancellation decoding with the exact check-node rule.

    Takes base-2 LLRs; they are converted to the natural-log domain where the
    tanh combination is evaluated (decisions depend only on signs, so the
    base never changes the output).
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if not np.all(np.isfinite(llrs)):
        raise ValueError("LLR input contains non-finite values")
    u_hat, _ = _sc_decode_batch(llrs[np.newaxis, :] * math.log(2.0), frozen, f_exact)
    return u_hat[0]


def block_genie_decode(labels, true_u, g_set):
    """Min-sum SC decoding with a block genie.

    After every block owned by a genie vertex ``(d, j)`` finishes, its
    partial output is replaced by the true partial encoding, and a flag
    records whether any decision in the block differed from the truth before
    the correction.  With an empty genie set this is plain SC decoding; with
    the full-depth leaf set it is the classic genie-aided decoder.

    Returns
    -------
    (u_hat, flags)
        The (corrected) estimate and ``{(d, j): bool}`` per-block error flags.
    """
    labels = np.asarray(labels)
    true_u = np.asarray(true_u, dtype=np.int8)
    n = labels.size.bit_length() - 1
    g_set = {(int(d), int(j)) for d, j in g_set}
    if g_set:
        ok, diagnostics = is_leaf_set(g_set)
        if not ok:
            raise ValueError(f"invalid genie set: {diagnostics}")
        if max(d for d, _ in g_set) > n:
            raise ValueError("genie set deeper than the code tree")
    u_hat, flags = _sc_decode_batch(
        labels[np.newaxis, :], (), f_minsum, g_set, true_u[np.newaxis, :]
    )
    return u_hat[0], {node: bool(flag[0]) for node, flag in flags.items()}


def coset_max_oracle(labels, i, prefix) -> int:
    """Decision-rule oracle: pick the coset holding the most likely word.

    Starting from labels proportional to the true LLRs, the most likely
    completion of each coset (prefix fixed, ``u_i`` fixed to 0 or 1)
    maximizes the correlation between the label vector and the signed
    codeword.  Ties decide 0.  Exponential in the block length; guarded.
    """
    labels = np.asarray(labels, dtype=np.float64)
    size = labels.size
    if size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    if size > _ORACLE_MAX_N:
        raise ValueError(f"block length {size} exceeds the oracle limit {_ORACLE_MAX_N}")
    prefix = np.asarray(prefix, dtype=np.int8)
    if prefix.size != i:
        raise ValueError(f"prefix length {prefix.size} does not match stage {i}")

    tail = size - i - 1
    suffixes = np.array(
        [[(k >> b) & 1 for b in range(tail - 1, -1, -1)] for k in range(1 << tail)],
        dtype=np.int8,
    ).reshape(1 << tail, tail)
    best = []
    for bit in (0, 1):
        u = np.empty((1 << tail, size), dtype=np.int8)
        u[:, :i] = prefix
        u[:, i] = bit
        u[:, i + 1 :] = suffixes
        codewords = _encode_rows(u)
        scores = (1.0 - 2.0 * codewords) @ labels
        best.append(scores.max())
    return 0 if best[0] >= best[1] else 1


@dataclass(frozen=True)
class CodewordFrame:
    """One transmission: information bits, codeword, and observed labels."""

    n: int
    u: np.ndarray
    x: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if not np.array_equal(polar_encode(self.u), self.x):
            raise ValueError("codeword does not match the encoded input")


@dataclass
class SimResult:
    """Tally of a seeded Monte Carlo run."""

    trials: int
    word_errors: int
    per_index_errors: np.ndarray
    seed: int
    decoder: str
    config: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "word_errors": self.word_errors,
            "per_index_errors": [int(v) for v in self.per_index_errors],
            "seed": self.seed,
            "decoder": self.decoder,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def _trial_randoms(seed: int, start: int, count: int, size: int) -> np.ndarray:
    # one counter-based stream per trial, keyed by (seed, trial); trials are
    # therefore independent of chunking and may run in any order
    out = np.empty((count, 2 * size))
    for k in range(count):
        bitgen = np.random.Philox(key=np.array([seed, start + k], dtype=np.uint64))
        out[k] = np.random.Generator(bitgen).random(2 * size)
    return out


def sample_frames(ch: LabeledChannel, n: int, trials: int, seed: int, start: int = 0, info_mask=None):
    """Draw ``trials`` codeword frames: inputs, codewords, and labels."""
    size = 1 << n
    rand = _trial_randoms(seed, start, trials, size)
    u = (rand[:, :size] < 0.5).astype(np.int8)
    if info_mask is not None:
        u &= info_mask.astype(np.int8)
    x = _encode_rows(u)
    cdf = np.cumsum(ch.alpha)
    idx = np.searchsorted(cdf, rand[:, size:], side="right")
    idx[idx == ch.alpha.size] = ch.alpha.size - 1
    labels = idx - ch.gamma
    labels[x == 1] *= -1
    return u, x, labels


def simulate(
    ch: LabeledChannel,
    *,
    trials: int,
    seed: int,
    decoder: str = "minsum",
    n: int = None,
    code=None,
    g_set=None,
) -> SimResult:
    """Seeded Monte Carlo decoding run.

    Parameters
    ----------
    decoder : {"minsum", "exact", "blockgenie"}
        Plain min-sum SC, exact SC on the labels' true LLRs, or min-sum SC
        with a block genie over ``g_set`` (all positions informational).
    code : PolarCode, optional
        Supplies the frozen set for the plain decoders; without it all
        positions are informational.
    n : int, optional
        Block-length exponent; inferred from ``code`` when omitted.

    Word errors count any mismatch of the estimate against the true input;
    for the block genie they count any flagged block, which matches the
    per-stage events the analytics predict.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if decoder not in ("minsum", "exact", "blockgenie"):
        raise ValueError(f"unknown decoder {decoder!r}")
    if n is None:
        if code is None:
            raise ValueError("either n or code must be given")
        n = code.n
    size = 1 << n
    frozen = [] if code is None else code.frozen_set
    info_mask = np.ones(size, dtype=bool)
    info_mask[frozen] = False

    if decoder == "blockgenie":
        g_set = {(int(d), int(j)) for d, j in (g_set or ())}
        if g_set:
            ok, diagnostics = is_leaf_set(g_set)
            if not ok:
                raise ValueError(f"invalid genie set: {diagnostics}")
            if max(d for d, _ in g_set) > n:
                raise ValueError("genie set deeper than the code tree")
        frozen = []
        info_mask[:] = True

    llr_table = label_llrs(ch) if decoder == "exact" else None
    word_errors = 0
    per_index = np.zeros(size, dtype=np.int64)
    leaf_flags = g_set and all(d == n for d, _ in g_set)

    done = 0
    while done < trials:
        count = min(_SIM_CHUNK, trials - done)
        u, _, labels = sample_frames(ch, n, count, seed, start=done, info_mask=info_mask)
        if decoder == "minsum":
            u_hat, _ = _sc_decode_batch(labels, frozen, f_minsum)
            errs = u_hat != u
        elif decoder == "exact":
            llrs = llr_table[labels + ch.gamma] * math.log(2.0)
            u_hat, _ = _sc_decode_batch(llrs, frozen, f_exact)
            errs = u_hat != u
        else:
            u_hat, flags = _sc_decode_batch(labels, frozen, f_minsum, g_set, u)
            if leaf_flags:
                errs = np.stack([flags[(n, i)] for i in range(size)], axis=1)
            else:
                errs = u_hat != u
            if g_set:
                block_hit = np.zeros(count, dtype=bool)
                for flag in flags.values():
                    block_hit |= flag
                word_errors += int(block_hit.sum())
        if decoder != "blockgenie" or not g_set:
            word_errors += int(errs.any(axis=1).sum())
        per_index += errs.sum(axis=0)
        done += count

    return SimResult(
        trials=trials,
        word_errors=word_errors,
        per_index_errors=per_index,
        seed=seed,
        decoder=decoder,
        config={
            "channel": dict(ch.descriptor),
            "n": n,
            "info_set": [int(i) for i in np.nonzero(info_mask)[0]] if code else None,
            "g_set": sorted([int(d), int(j)] for d, j in g_set) if g_set else None,
        },
    )
