"""Bit-exact primitives: bitstrings, MSB-first bit streams, Elias-gamma codes.

Encoded lengths are the quantity being minimized everywhere else in the
toolkit, so nothing here ever pads silently: a writer's length is exactly the
number of bits written, and a reader refuses to run past its end.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import BitOverrunError, MalformedCodeError


class BitString:
    """Immutable sequence of bits. Index 0 is the first (leftmost) bit."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] = ()):
        bs = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bs):
            raise ValueError("bits must be 0 or 1")
        self._bits = bs

    @classmethod
    def from01(cls, s: str) -> "BitString":
        return cls(int(c) for c in s)

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitString":
        """`width`-bit big-endian representation of `value`."""
        if value < 0 or width < 0:
            raise ValueError("negative value or width")
        if value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls((value >> (width - 1 - i)) & 1 for i in range(width))

    @classmethod
    def zeros(cls, width: int) -> "BitString":
        return cls([0] * width)

    def to01(self) -> str:
        return "".join(str(b) for b in self._bits)

    def to_int(self) -> int:
        v = 0
        for b in self._bits:
            v = (v << 1) | b
        return v

    def __len__(self) -> int:
        return len(self._bits)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BitString(self._bits[i])
        return self._bits[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self._bits + tuple(other))

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __repr__(self) -> str:
        return f"BitString('{self.to01()}')"


EMPTY = BitString()


class BitWriter:
    """Append-only MSB-first bit buffer; length is exactly the bits written."""

    def __init__(self):
        self._bits: list[int] = []

    def write_bit(self, bit: int) -> None:
        self._bits.append(bit & 1)

    def write_bits(self, value: int, width: int) -> None:
        """Write `value` as `width` bits, most significant first."""
        if value < 0 or (width >= 0 and value >> width):
            raise ValueError(f"{value} does not fit in {width} bits")
        for i in range(width - 1, -1, -1):
            self._bits.append((value >> i) & 1)

    def write_bitstring(self, bs: BitString) -> None:
        self._bits.extend(bs)

    def __len__(self) -> int:
        return len(self._bits)

    def getvalue(self) -> BitString:
        return BitString(self._bits)


class BitReader:
    """Cursor over a BitString; overrun raises instead of zero-padding."""

    def __init__(self, bits: BitString):
        self._bits = bits
        self.pos = 0

    def remaining(self) -> int:
        return len(self._bits) - self.pos

    def read_bit(self) -> int:
        if self.pos >= len(self._bits):
            raise BitOverrunError("read past end of bit buffer")
        b = self._bits[self.pos]
        self.pos += 1
        return b

    def read_bits(self, width: int) -> int:
        if width < 0:
            raise ValueError("width must be >= 0")
        if self.pos + width > len(self._bits):
            raise BitOverrunError("read past end of bit buffer")
        v = 0
        for _ in range(width):
            v = (v << 1) | self._bits[self.pos]
            self.pos += 1
        return v

    def read_bitstring(self, width: int) -> BitString:
        if self.pos + width > len(self._bits):
            raise BitOverrunError("read past end of bit buffer")
        out = self._bits[self.pos : self.pos + width]
        self.pos += width
        return out

    def at_end(self) -> bool:
        return self.pos == len(self._bits)


def gamma_encode(k: int) -> BitString:
    """Elias-gamma code of k >= 1: floor(log2 k) zeros, then k in binary.

    Zero is rejected; callers that need nonnegative fields encode value+1.
    """
    if k < 1:
        raise ValueError("gamma code is defined for integers >= 1")
    nbits = k.bit_length()
    return BitString([0] * (nbits - 1)) + BitString.from_int(k, nbits)


def gamma_length(k: int) -> int:
    """Length in bits of gamma_encode(k), without building it."""
    if k < 1:
        raise ValueError("gamma code is defined for integers >= 1")
    return 2 * k.bit_length() - 1


def gamma_decode(r: BitReader) -> int:
    """Inverse of gamma_encode; consumes exactly one code from the reader."""
    zeros = 0
    try:
        while r.read_bit() == 0:
            zeros += 1
        rest = r.read_bits(zeros)
    except BitOverrunError as e:
        raise MalformedCodeError("truncated gamma code") from e
    return (1 << zeros) | rest
