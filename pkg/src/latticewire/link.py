"""End-to-end secret transmission over the simulated frame pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coset import encode_indices, modulate
from .decode import DecoderConfig, decode_batch
from .lattice import Scheme, get_scheme
from .phy import BATCH_FRAMES, ChannelInstance, Receiver, assemble_frame, frame_capacity, pulse_shape, transmit_and_receive


def bits_to_indices(bits, k: int) -> np.ndarray:
    """Group an MSB-first bit stream into ``k``-bit secret indices (zero-padded)."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    pad = (-bits.size) % k
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.int64)])
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits.reshape(-1, k) @ weights


def indices_to_bits(idx, k: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64).ravel()
    shifts = np.arange(k - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()


def build_frame_symbols(points, scheme: Scheme) -> np.ndarray:
    """Modulate codebook points and pack them into frames, shape ``(F, 100)``."""
    L, M = scheme.L, scheme.M
    per_frame = frame_capacity(L)
    points = np.asarray(points).reshape(-1, L)
    n_frames = max(1, -(-len(points) // per_frame))
    dummy = complex(modulate(0, M))
    out = []
    for f in range(n_frames):
        chunk = points[f * per_frame : (f + 1) * per_frame]
        out.append(assemble_frame(modulate(chunk, M), dummy).symbols)
    return np.vstack(out)


@dataclass(frozen=True, eq=False)
class LinkResult:
    sent: np.ndarray  # secret indices
    decoded: np.ndarray
    h_hat: np.ndarray
    sigma2_hat: np.ndarray
    n_frames: int


def transmit_secrets(
    secret_idx,
    scheme,
    ch: ChannelInstance,
    rng: np.random.Generator,
    decoder: DecoderConfig | None = None,
    receiver: Receiver | None = None,
) -> LinkResult:
    """Coset-encode secret indices, send them through the frame pipeline, decode.

    The randomness for every codeword is drawn from ``rng``. Dummy slots at
    the end of each frame are skipped by position. Messages shorter than one
    acquisition batch are padded with random filler codewords, since the
    pilot search needs several frames to fold over.
    """
    scheme = get_scheme(scheme)
    cb = scheme.codebook()
    decoder = decoder or DecoderConfig()
    secret_idx = np.asarray(secret_idx, dtype=np.int64).ravel()
    n = secret_idx.size
    per_frame = frame_capacity(scheme.L)
    fill = max(0, BATCH_FRAMES * per_frame - n)
    padded = np.concatenate([secret_idx, rng.integers(0, 2**cb.k, size=fill)]) if fill else secret_idx
    rand_idx = rng.integers(0, 2**cb.r, size=padded.size)
    points = encode_indices(padded, rand_idx, cb)
    frames = build_frame_symbols(points, scheme)
    rx = transmit_and_receive(frames, ch, rng, receiver=receiver)

    used = per_frame * scheme.L
    Y = rx.data[:, :used].reshape(-1, per_frame, scheme.L)
    h = np.repeat(rx.h_hat, per_frame)
    s2 = np.repeat(rx.sigma2_hat, per_frame)
    Y = Y.reshape(-1, scheme.L)[:n]
    decoded = decode_batch(Y, h[:n], cb, decoder, sigma2=s2[:n])
    return LinkResult(secret_idx, decoded, rx.h_hat, rx.sigma2_hat, frames.shape[0])


def scrambler_sequence(n: int, state: int = 0x7F) -> np.ndarray:
    """First ``n`` bits of the additive x^7 + x^4 + 1 scrambler (period 127)."""
    reg = [(state >> i) & 1 for i in range(6, -1, -1)]
    period = np.empty(127, dtype=np.uint8)
    for i in range(127):
        b = reg[3] ^ reg[6]
        period[i] = b
        reg = [b] + reg[:6]
    return np.resize(period, n)


def transmit_bits(
    bits,
    scheme,
    ch: ChannelInstance,
    rng: np.random.Generator,
    decoder: DecoderConfig | None = None,
    scramble: bool = True,
):
    """Send a bit stream; returns ``(received_bits, LinkResult)`` truncated to the input length.

    Structured payloads (images) are whitened by the scrambler so they cannot
    mimic the pilot; descrambling is a XOR, so bit errors map one to one.
    """
    scheme = get_scheme(scheme)
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    pn = scrambler_sequence(bits.size) if scramble else np.zeros(bits.size, dtype=np.uint8)
    idx = bits_to_indices(bits ^ pn, scheme.k)
    # zero secrets fill the last frame
    per_frame = frame_capacity(scheme.L)
    idx = np.concatenate([idx, np.zeros((-idx.size) % per_frame, dtype=np.int64)])
    res = transmit_secrets(idx, scheme, ch, rng, decoder)
    return indices_to_bits(res.decoded, scheme.k)[: bits.size] ^ pn, res


@dataclass(frozen=True, eq=False)
class LoopbackReport:
    scheme: str
    rms_error: float  # relative RMS error of the equalized frame symbols
    exact: bool  # every (secret, randomness) pair decoded back to its secret
    n_codewords: int
    tx_samples: np.ndarray


def loopback(scheme, rng: np.random.Generator | None = None, sigma2: float = 1e-30, delay: int = 0) -> LoopbackReport:
    """Send every codebook point through a noiseless ``h = 1`` pipeline.

    The codebook is repeated (in random order) to fill one AGC batch so the
    frame-folded sync has enough frames to lock.
    """
    scheme = get_scheme(scheme)
    cb = scheme.codebook()
    rng = rng or np.random.default_rng(0)
    per_frame = frame_capacity(scheme.L)
    reps = max(1, -(-BATCH_FRAMES * per_frame // cb.size))
    # shuffled so the payload is not periodic, which would mimic the pilot
    order = rng.permutation(reps * cb.size)
    points = np.tile(cb.points, (reps, 1))[order]
    labels = np.tile(cb.labels, reps)[order]
    n = labels.size
    frames = build_frame_symbols(points, scheme)
    receiver = Receiver()
    ch = ChannelInstance(h=1.0 + 0j, sigma2=sigma2)
    rx = transmit_and_receive(frames, ch, rng, delay=delay, receiver=receiver)
    eq = rx.symbols / rx.h_hat[:, None]
    rms = float(np.sqrt(np.mean(np.abs(eq - frames) ** 2) / np.mean(np.abs(frames) ** 2)))
    Y = rx.data[:, : per_frame * scheme.L].reshape(-1, scheme.L)[:n]
    h = np.repeat(rx.h_hat, per_frame)[:n]
    s2 = np.repeat(rx.sigma2_hat, per_frame)[:n]
    decoded = decode_batch(Y, h, cb, DecoderConfig(), sigma2=s2)
    exact = bool(np.array_equal(decoded, labels))
    return LoopbackReport(scheme.name, rms, exact, cb.size, pulse_shape(frames.ravel(), receiver.taps))
