# src/extremal/bounds.py
"""Closed-form quantities the constructions and embeddings are measured against."""
from math import ceil, comb, factorial


def square_path_formula(n: int) -> int:
    """Exact value of the k=2 extremal function: ceil(2n/3) vertices."""
    return ceil(2 * n / 3)


def avoider_block_size(k: int) -> int:
    return 2 ** (k - 1)


def avoider_path_size(k: int) -> int:
    """k(k+1)/2 vertices: random blocks on 2^(k-1) vertices avoid paths this long."""
    return k * (k + 1) // 2


def union_bound(k: int) -> float:
    """
    Expected number of k-th power paths on k(k+1)/2 vertices in a uniformly
    random tournament on 2^(k-1) vertices: C(n, l) * l! * 2^(-(k-1) l).
    Below 1 an avoider exists.
    """
    n = avoider_block_size(k)
    length = avoider_path_size(k)
    if length > n:
        return 0.0
    return comb(n, length) * factorial(length) / 2 ** ((k - 1) * length)


def upper_bound_formula(k: int, n: int) -> int:
    """ceil(n / 2^(k-1)) * (k(k+1)/2 - 1): vertices of the longest k-th power path in the chained construction."""
    return ceil(n / avoider_block_size(k)) * (avoider_path_size(k) - 1)


def asymptotic_upper_bound(k: int, n: int) -> float:
    """k(k+1) n / 2^k, dominating upper_bound_formula once k >= 5 and n >= k(k+1) 2^k."""
    return k * (k + 1) * n / 2 ** k


def asymptotic_regime(k: int, n: int) -> bool:
    return k >= 5 and n >= k * (k + 1) * 2 ** k
