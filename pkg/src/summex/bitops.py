"""Construction and decoding of uint64 word bitmaps over item ids."""

import numpy as np


def n_words(n_bits: int) -> int:
    return (n_bits + 63) >> 6


def bitmap_from_ids(ids, n_bits: int) -> np.ndarray:
    words = np.zeros(n_words(n_bits), dtype=np.uint64)
    idx = np.asarray(ids, dtype=np.int64)
    if idx.size:
        np.bitwise_or.at(words, idx >> 6, np.uint64(1) << (idx & 63).astype(np.uint64))
    return words


def ids_from_bitmap(words: np.ndarray) -> np.ndarray:
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")
    return np.flatnonzero(bits).astype(np.int64)


def full_bitmap(n_bits: int) -> np.ndarray:
    words = np.zeros(n_words(n_bits), dtype=np.uint64)
    full, rem = divmod(n_bits, 64)
    words[:full] = np.uint64(0xFFFFFFFFFFFFFFFF)
    if rem:
        words[full] = np.uint64((1 << rem) - 1)
    return words
