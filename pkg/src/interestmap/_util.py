"""Small shared helpers: seed derivation, ordered parallel map, text formats."""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor


def derive_seed(*parts) -> int:
    """Deterministic 63-bit seed from arbitrary labeled parts.

    Stable across processes and platforms, so a sub-computation reseeded with
    the same parts reproduces bit-identical results anywhere.
    """
    text = "|".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def parallel_map(fn, items, threads=1):
    """Map preserving input order; thread-parallel when threads > 1."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def format_weight(w: float) -> str:
    """Integer weights as plain integers, reals with 17 significant digits.

    Both round-trip exactly through float().
    """
    w = float(w)
    if w.is_integer() and abs(w) < 2**53:
        return str(int(w))
    return f"{w:.17g}"
