"""Subsets of [n] = {1, ..., n} as bitmasks (bit i-1 stands for element i)."""
from __future__ import annotations


def to_mask(elements) -> int:
    if isinstance(elements, int):
        return elements
    m = 0
    for i in elements:
        m |= 1 << (int(i) - 1)
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def size(mask: int) -> int:
    return bin(mask).count("1")


def full(n: int) -> int:
    return (1 << n) - 1


def submasks(mask: int):
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def subsets_of_size(mask: int, k: int):
    return [s for s in submasks(mask) if size(s) == k]


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def fmt(mask: int) -> str:
    return "{" + ",".join(map(str, members(mask))) + "}"
