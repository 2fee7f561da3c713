"""Transformed labels: fixed-width binary encodings of agent identifiers.

Agents carry distinct integer labels from {0, ..., L-1}.  The transformed
label is the binary representation left-padded with zeroes to a fixed width
of ceil(log2(L)) bits, so two distinct labels always differ at some index
(unlike raw binary strings, where one may be a prefix of the other).
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["LabelSpace", "TransformedLabel", "transform", "first_differing_index"]


@dataclass(frozen=True)
class LabelSpace:
    """Size L of the label space and the padded bit width."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError("label space needs at least two distinct labels")

    @property
    def width(self) -> int:
        """ceil(log2(size)): bit width of every transformed label."""
        return (self.size - 1).bit_length()

    def contains(self, label: int) -> bool:
        return 0 <= label < self.size


@dataclass(frozen=True)
class TransformedLabel:
    """Bits c_1..c_w, most significant first, exactly ``width`` of them."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be a non-empty 0/1 sequence")

    @property
    def width(self) -> int:
        return len(self.bits)

    def bit(self, index: int) -> int:
        """1-based access: bit(1) is the most significant bit."""
        return self.bits[index - 1]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def transform(label: int, space: LabelSpace) -> TransformedLabel:
    if not space.contains(label):
        raise ValueError(f"label {label} outside 0..{space.size - 1}")
    width = space.width
    return TransformedLabel(tuple((label >> (width - i)) & 1 for i in range(1, width + 1)))


def first_differing_index(a: TransformedLabel, b: TransformedLabel) -> int:
    """Smallest 1-based index where the two transformed labels differ.

    Harness-side helper for predicting symmetry-breaking rounds; the agents
    themselves never see the other label.
    """
    if a.width != b.width:
        raise ValueError("labels from different spaces")
    for i in range(1, a.width + 1):
        if a.bit(i) != b.bit(i):
            return i
    raise ValueError("labels are equal")
