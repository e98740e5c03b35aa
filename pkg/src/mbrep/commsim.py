"""Alice/Bob equality protocol carried over multi-base encoded messages.

Wire format of an encoded message (all fields unsigned, MSB first)::

    header   count of summands          bit_length(l) bits
    record   digit index into sorted D  ceil(log2 |D|) bits
             exponent of b_1            bit_length(alpha_max_1) bits
             ...
             exponent of b_r            bit_length(alpha_max_r) bits

where ``alpha_max_j = floor(log_{b_j} 2**l)``. Records follow the header in
descending power-product order. Field widths depend only on the system and
on ``l``, so a message of weight ``w`` costs exactly
``header_bits + w * record_bits``.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from functools import cached_property

from .enumeration import floor_log
from .errors import FieldOverflowError, MalformedStreamError, ValidationError
from .greedy import greedy_encode
from .minweight import MinWeightSolver
from .numsys import BaseSystem, PowerProduct, Representation

ENCODERS = ("greedy", "exact")


@dataclass(frozen=True)
class SummandCodec:
    system: BaseSystem
    message_bits: int

    def __post_init__(self) -> None:
        if self.message_bits < 1:
            raise ValidationError(f"message length must be >= 1, got {self.message_bits}")

    @cached_property
    def digit_field_bits(self) -> int:
        return (len(self.system.digits) - 1).bit_length()

    @cached_property
    def alpha_max(self) -> tuple[int, ...]:
        top = 1 << self.message_bits
        return tuple(floor_log(b, top) for b in self.system.bases)

    @cached_property
    def exponent_field_bits(self) -> tuple[int, ...]:
        return tuple(a.bit_length() for a in self.alpha_max)

    @cached_property
    def header_bits(self) -> int:
        return self.message_bits.bit_length()

    @cached_property
    def record_bits(self) -> int:
        return self.digit_field_bits + sum(self.exponent_field_bits)

    def stream_bits(self, weight: int) -> int:
        return self.header_bits + weight * self.record_bits

    def encode(self, rep: Representation) -> str:
        if rep.weight >= 1 << self.header_bits:
            raise FieldOverflowError(f"{rep.weight} summands do not fit {self.header_bits} header bits")
        out = [format(rep.weight, f"0{self.header_bits}b")]
        index = {d: i for i, d in enumerate(self.system.digits)}
        for pp, d in rep.terms:
            fields = [(index[d], self.digit_field_bits)]
            for a, amax, width in zip(pp.exponents, self.alpha_max, self.exponent_field_bits):
                if a > amax:
                    raise FieldOverflowError(f"exponent {a} exceeds alpha_max {amax}")
                fields.append((a, width))
            out.extend(format(v, f"0{w}b") if w else "" for v, w in fields)
        return "".join(out)

    def decode(self, bits: str) -> Representation:
        if any(c not in "01" for c in bits):
            raise MalformedStreamError("stream contains characters other than 0 and 1")
        pos = 0

        def take(width: int) -> int:
            nonlocal pos
            if pos + width > len(bits):
                raise MalformedStreamError(f"stream truncated at bit {pos}")
            chunk = bits[pos : pos + width]
            pos += width
            return int(chunk, 2) if width else 0

        count = take(self.header_bits)
        terms = []
        for _ in range(count):
            di = take(self.digit_field_bits)
            if di == 0 or di >= len(self.system.digits):
                raise MalformedStreamError(f"digit index {di} is not a nonzero digit")
            exps = tuple(take(w) for w in self.exponent_field_bits)
            terms.append((PowerProduct.build(self.system.bases, exps), self.system.digits[di]))
        if pos != len(bits):
            raise MalformedStreamError(f"{len(bits) - pos} trailing bits")
        try:
            return Representation(self.system, tuple(terms))
        except ValidationError as exc:
            raise MalformedStreamError(str(exc)) from exc


def represent(system: BaseSystem, m: int, encoder: str = "greedy", solver: MinWeightSolver | None = None) -> Representation:
    if encoder not in ENCODERS:
        raise ValidationError(f"unknown encoder {encoder!r}")
    if m == 0:
        return Representation(system)
    if encoder == "greedy":
        return greedy_encode(system, m).representation
    solver = solver or MinWeightSolver(system, max(1, min(m, 10**4)))
    return solver.solve(m).representation


def encode_message(system: BaseSystem, m: int, message_bits: int, encoder: str = "greedy") -> str:
    if not 0 <= m < 1 << message_bits:
        raise ValidationError(f"message {m} does not fit in {message_bits} bits")
    return SummandCodec(system, message_bits).encode(represent(system, m, encoder))


def decode_message(system: BaseSystem, bits: str, message_bits: int) -> int:
    return SummandCodec(system, message_bits).decode(bits).value


EQUAL = "equal"
NOT_EQUAL = "not-equal"
MORE = "more information"


@dataclass
class ProtocolTranscript:
    message_bits: int
    m_alice: int
    m_bob: int
    chunks: list[str] = field(default_factory=list)
    replies: list[str] = field(default_factory=list)
    decision: str = ""

    @property
    def bits_sent(self) -> int:
        return sum(len(c) for c in self.chunks)

    def to_json(self) -> dict:
        return {
            "message_bits": self.message_bits,
            "m_alice": self.m_alice,
            "m_bob": self.m_bob,
            "chunks": self.chunks,
            "replies": self.replies,
            "decision": self.decision,
            "bits_sent": self.bits_sent,
        }


def run_equality_protocol(
    system: BaseSystem,
    m_alice: int,
    m_bob: int,
    message_bits: int,
    chunk_bits: int = 8,
    encoder: str = "greedy",
) -> ProtocolTranscript:
    """Alice streams her encoded message; Bob decides after the last chunk.

    Bob reads the header from the first bits to learn the stream length and
    answers ``more information`` until he holds the whole stream.
    """
    if chunk_bits < 1:
        raise ValidationError(f"chunk size must be >= 1, got {chunk_bits}")
    for m in (m_alice, m_bob):
        if not 0 <= m < 1 << message_bits:
            raise ValidationError(f"message {m} does not fit in {message_bits} bits")
    codec = SummandCodec(system, message_bits)
    stream = codec.encode(represent(system, m_alice, encoder))
    tr = ProtocolTranscript(message_bits, m_alice, m_bob)
    received = ""
    expected = None
    pos = 0
    while True:
        chunk = stream[pos : pos + chunk_bits]
        pos += len(chunk)
        tr.chunks.append(chunk)
        received += chunk
        if expected is None and len(received) >= codec.header_bits:
            expected = codec.stream_bits(int(received[: codec.header_bits], 2))
        if expected is not None and len(received) >= expected:
            value = codec.decode(received[:expected])
            tr.decision = EQUAL if value.value == m_bob else NOT_EQUAL
            tr.replies.append(tr.decision)
            return tr
        tr.replies.append(MORE)


def sample_rng(seed: int, *keys: int) -> random.Random:
    """Independent PRNG stream for one sample, stable under any worker split."""
    return random.Random("-".join(str(k) for k in (seed, *keys)))


@dataclass(frozen=True)
class CompressionRow:
    message_bits: int
    samples: int
    mean_bits_sent: float
    mean_weight: float
    ratio: float
    record_bits: int
    header_bits: int

    def to_json(self) -> dict:
        return {
            "l": self.message_bits,
            "samples": self.samples,
            "mean_bits_sent": self.mean_bits_sent,
            "mean_weight": self.mean_weight,
            "ratio": self.ratio,
            "record_bits": self.record_bits,
            "header_bits": self.header_bits,
        }


def compression_curve(
    system: BaseSystem,
    lengths: list[int],
    samples: int,
    seed: int = 42,
    encoder: str = "greedy",
) -> list[CompressionRow]:
    """Mean encoded size of uniformly random ``l``-bit messages."""
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if lengths != sorted(lengths):
        raise ValidationError("message lengths must be ascending")
    rows = []
    for ell in lengths:
        codec = SummandCodec(system, ell)
        sizes, weights = [], []
        for i in range(samples):
            m = sample_rng(seed, ell, i).getrandbits(ell)
            rep = represent(system, m, encoder)
            bits = codec.encode(rep)
            sizes.append(len(bits))
            weights.append(rep.weight)
        mean = statistics.fmean(sizes)
        rows.append(
            CompressionRow(ell, samples, mean, statistics.fmean(weights), mean / ell, codec.record_bits, codec.header_bits)
        )
    return rows
