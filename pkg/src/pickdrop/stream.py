"""Stream representation, matrix overlay, exact statistics, and file formats.

Everything here is ground-truth infrastructure: it may hold O(n) state and is
computed with exact integer arithmetic.  Streaming-space constraints apply only
to the sampler run state, not to these helpers.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

SENTINEL = 0  # reserved padding id; never a valid stream element

MAGIC = b"PDSK"
FORMAT_VERSION = 1

# Moments are reported as exact integers but capped at 128 bits so that a
# pathological request fails loudly instead of producing a value no downstream
# consumer can represent.
MOMENT_LIMIT = 1 << 128


class MalformedStreamError(ValueError):
    """An item is outside [1, n] or the file violates the format."""


class MomentOverflowError(OverflowError):
    """A moment exceeded the 128-bit cap."""


@dataclass(frozen=True)
class StreamView:
    """A finite sequence of ids from [1, n]."""

    items: np.ndarray  # uint32, shape (m,)
    n: int

    def __post_init__(self):
        items = np.ascontiguousarray(self.items, dtype=np.uint32)
        object.__setattr__(self, "items", items)
        if self.n < 1:
            raise MalformedStreamError(f"universe size must be >= 1, got {self.n}")
        if items.size and (items.min() < 1 or items.max() > self.n):
            raise MalformedStreamError(
                f"stream items must lie in [1, {self.n}]"
            )

    @property
    def m(self) -> int:
        return int(self.items.size)


def frequency_vector(view: StreamView) -> dict[int, int]:
    """Exact multiplicity of every id appearing in the stream."""
    ids, counts = np.unique(view.items, return_counts=True)
    return {int(i): int(c) for i, c in zip(ids, counts)}


@dataclass(frozen=True)
class ExactStats:
    """Ground-truth frequencies and moments for a stream."""

    freqs: dict[int, int]
    n: int
    m: int

    @classmethod
    def from_view(cls, view: StreamView) -> "ExactStats":
        return cls(freqs=frequency_vector(view), n=view.n, m=view.m)

    def frequency(self, element: int) -> int:
        return self.freqs.get(element, 0)

    def moment(self, k: int) -> int:
        if k < 1:
            raise ValueError(f"moment order must be >= 1, got {k}")
        total = sum(c**k for c in self.freqs.values())
        if total >= MOMENT_LIMIT:
            raise MomentOverflowError(f"F_{k} exceeds 128 bits")
        return total

    def residual_moment(self, k: int, excluded: int) -> int:
        """Moment with one element's contribution removed."""
        return self.moment(k) - self.frequency(excluded) ** k

    def heaviest(self) -> int:
        """Element with the maximum frequency (smaller id on ties)."""
        if not self.freqs:
            return SENTINEL
        return min(self.freqs, key=lambda i: (-self.freqs[i], i))

    def is_heavy(self, element: int, k: int) -> bool:
        """100x dominance test: f_i^k > 100 * sum of the other f_j^k."""
        f = self.frequency(element)
        return f**k > 100 * self.residual_moment(k, element)


@dataclass(frozen=True)
class MatrixOverlay:
    """The stream laid out row-major as an r x t matrix.

    When m is not divisible by t the tail is padded with SENTINEL cells; those
    never contribute to frequencies and can never be a valid sample.
    """

    base: StreamView
    r: int
    t: int
    padded: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_view(cls, view: StreamView, t: int, r: int | None = None) -> "MatrixOverlay":
        if t < 1:
            raise ValueError(f"column count must be >= 1, got {t}")
        m = view.m
        if r is None:
            r = max(1, -(-m // t))
        if r * t < m:
            raise ValueError(f"overlay {r}x{t} too small for {m} items")
        padded = np.full(r * t, SENTINEL, dtype=np.uint32)
        padded[:m] = view.items
        return cls(base=view, r=r, t=t, padded=padded)

    @property
    def matrix(self) -> np.ndarray:
        return self.padded.reshape(self.r, self.t)

    def row(self, i: int) -> np.ndarray:
        """Row i, 1-based."""
        if not 1 <= i <= self.r:
            raise IndexError(f"row {i} out of range [1, {self.r}]")
        return self.matrix[i - 1]

    def entry(self, i: int, j: int) -> int:
        """Entry (i, j), 1-based: item p_{(i-1)t + j}."""
        if not 1 <= j <= self.t:
            raise IndexError(f"column {j} out of range [1, {self.t}]")
        return int(self.row(i)[j - 1])

    def suffix_count(self, i: int, j: int) -> int:
        """Occurrences of entry (i, j) in row i at columns >= j."""
        row = self.row(i)
        if not 1 <= j <= self.t:
            raise IndexError(f"column {j} out of range [1, {self.t}]")
        v = row[j - 1]
        return int(np.count_nonzero(row[j - 1 :] == v))

    def row_frequency(self, element: int, i: int) -> int:
        """f_{l,i}: occurrences of an element inside row i."""
        if element == SENTINEL:
            return 0
        return int(np.count_nonzero(self.row(i) == element))

    def row_frequencies(self, i: int) -> dict[int, int]:
        counts = Counter(int(v) for v in self.row(i) if v != SENTINEL)
        return dict(counts)


# ---------------------------------------------------------------------------
# File formats

def write_binary(path, view: StreamView) -> None:
    """16-byte header (magic, version u32, n u64, little-endian) + u32 items."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", FORMAT_VERSION, view.n))
        fh.write(view.items.astype("<u4").tobytes())


def read_binary(path) -> StreamView:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != MAGIC:
            raise MalformedStreamError(f"{path}: bad magic, not a PDSK stream")
        version, n = struct.unpack("<IQ", header[4:])
        if version != FORMAT_VERSION:
            raise MalformedStreamError(f"{path}: unsupported format version {version}")
        payload = fh.read()
    if len(payload) % 4:
        raise MalformedStreamError(f"{path}: truncated item payload")
    items = np.frombuffer(payload, dtype="<u4").astype(np.uint32)
    return StreamView(items=items, n=int(n))


def write_text(path, view: StreamView) -> None:
    with open(path, "w") as fh:
        for v in view.items:
            fh.write(f"{int(v)}\n")


def read_text(path) -> StreamView:
    """One decimal id per line; universe size inferred as the maximum id."""
    items = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                items.append(int(line))
            except ValueError:
                raise MalformedStreamError(f"{path}:{lineno}: not an integer: {line!r}")
    arr = np.asarray(items, dtype=np.uint32)
    n = int(arr.max()) if arr.size else 1
    return StreamView(items=arr, n=n)


def read_stream(path) -> StreamView:
    """Dispatch on the magic bytes: binary PDSK or plain text."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_binary(path)
    return read_text(path)
