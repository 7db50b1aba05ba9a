"""
Deterministic summation helpers.

Every sum over a Folner set is cut into fixed-size chunks; chunks may be
evaluated on a thread pool, and the partial sums are always combined by the
same pairwise tree. The result therefore does not depend on the number of
threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

CHUNK = 4096

_threads = 1


def set_threads(n: int) -> None:
    """Default worker count for :func:`chunked_sum`."""
    global _threads
    if n < 1:
        raise ValueError("thread count must be positive")
    _threads = int(n)


def get_threads() -> int:
    return _threads


def tree_sum(values: Sequence):
    """Pairwise sum in a fixed order; ``values`` may hold complex scalars or arrays."""
    vals = list(values)
    if not vals:
        return 0j
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def chunked_sum(fn: Callable[[int, int], object], length: int, threads: int | None = None,
                chunk: int = CHUNK):
    """
    ``tree_sum(fn(a, b) for each chunk [a, b))``, optionally threaded.

    ``fn`` must return the partial sum over the index range; the chunk
    boundaries depend only on ``length`` and ``chunk``.
    """
    bounds = [(a, min(a + chunk, length)) for a in range(0, length, chunk)]
    threads = _threads if threads is None else threads
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    else:
        parts = [fn(a, b) for a, b in bounds]
    return tree_sum(parts)


def exp_sum(numerators: Sequence[int], denominator: int, threads: int | None = None) -> complex:
    """
    ``sum_k e(numerators[k] / denominator)`` with exact reduction mod 1.

    Full periods of the residues are removed first (they sum to exactly 0
    when ``denominator > 1``), so balanced inputs return exactly ``0``.
    """
    q = int(denominator)
    if q <= 0:
        raise ValueError("denominator must be positive")
    if q == 1:
        return complex(len(numerators))
    res = [int(x) % q for x in numerators]
    # residues may fill only a subgroup g Z / q Z; work modulo q / g so full periods show up
    g = math.gcd(q, *res)
    if g > 1:
        q //= g
        res = [r // g for r in res]
        if q == 1:
            return complex(len(res))
    if q <= 1 << 20 and len(res) >= q:
        counts = np.bincount(np.asarray(res, dtype=np.int64), minlength=q)
        base = int(counts.min())
        if base:
            counts = counts - base
        nz = np.nonzero(counts)[0]
        if nz.size == 0:
            return 0j
        return _weighted_roots(nz, counts[nz], q, threads)
    arr = np.asarray(res, dtype=object)
    return _phases_sum(arr, q, threads)


def _weighted_roots(ks, weights, q, threads):
    ks = np.asarray(ks, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)

    def part(a, b):
        return complex(np.sum(w[a:b] * np.exp(2j * math.pi * ks[a:b] / q)))

    return chunked_sum(part, len(ks), threads)


def _phases_sum(res, q, threads):
    # residues may exceed float precision; divide exactly before converting
    if q < 1 << 52:
        ph = np.asarray(res, dtype=np.float64) / q
    else:
        ph = np.array([float(Fraction(int(r), q)) for r in res], dtype=np.float64)

    def part(a, b):
        return complex(np.sum(np.exp(2j * math.pi * ph[a:b])))

    return chunked_sum(part, len(ph), threads)


def phase_array(phases: Sequence[Fraction]) -> np.ndarray:
    """Float array of exact phases reduced mod 1."""
    return np.array([float(p - math.floor(p)) for p in phases], dtype=np.float64)


def exp_sum_phases(phases: Sequence[Fraction], threads: int | None = None) -> complex:
    """``sum e(phase)`` for exact rational phases."""
    if not phases:
        return 0j
    q = 1
    for p in phases:
        q = math.lcm(q, p.denominator)
        if q > 1 << 60:
            break
    if q <= 1 << 60:
        return exp_sum([p.numerator * (q // p.denominator) for p in phases], q, threads)
    ph = phase_array(phases)

    def part(a, b):
        return complex(np.sum(np.exp(2j * math.pi * ph[a:b])))

    return chunked_sum(part, len(ph), threads)
