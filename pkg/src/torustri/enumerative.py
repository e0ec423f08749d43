"""Rank/unrank of fixed-weight binary words (colexicographic order).

The rank of a word with ones at ascending positions p_1 < ... < p_k is
sum_j C(p_j, j).  Two implementations compute it: an incremental
small-step scan, and a binary-splitting product tree that keeps the bit
complexity quasi-linear for the big inputs the benchmark exercises.  Both
are exact and are property-tested against each other.

gmpy2 accelerates the big-integer work when present; plain ints are a
drop-in fallback.
"""

from __future__ import annotations

from math import comb

try:
    from gmpy2 import mpz
    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover
    def mpz(x):
        return x
    HAVE_GMPY2 = False


class RankError(ValueError):
    pass


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def _prod_range(lo: int, hi: int):
    """Product of lo..hi inclusive (1 when empty), chunked into machine
    words before folding into the big integer."""
    acc = mpz(1)
    chunk = 1
    for t in range(lo, hi + 1):
        chunk *= t
        if chunk > 0x7FFFFFFFFFFF:
            acc *= chunk
            chunk = 1
    return acc * chunk


def _first_live_term(ones):
    """Terms C(p_j, j) with p_j = j - 1 are zero; the rest are positive.
    Returns the 1-based index of the first nonzero term (or None)."""
    for j, p in enumerate(ones, start=1):
        if p >= j:
            return j
    return None


def rank_small(word) -> int:
    """Incremental colex rank: sum of C(p_j, j) over ones positions."""
    ones = [p for p, bit in enumerate(word) if bit]
    j0 = _first_live_term(ones)
    if j0 is None:
        return 0
    r = mpz(0)
    b = mpz(0)
    q = -1
    for j in range(j0, len(ones) + 1):
        p = ones[j - 1]
        if j == j0:
            b = _prod_range(p - j + 1, p) // _prod_range(1, j)
        else:
            num = _prod_range(q + 1, p)
            den = mpz(j) * _prod_range(q - j + 2, p - j)
            b = b * num // den
        q = p
        r += b
    return int(r)


def _split(ones, lo, hi, j0):
    """Binary splitting over term ratios: returns (pn, pd, sn) with
    prod(r) = pn/pd and sum of prefix products = sn/pd over terms
    lo..hi (1-based term indices into ones).  Term j0 anchors the chain
    with the full binomial as its ratio."""
    if lo == hi:
        j = lo
        p = ones[j - 1]
        if j == j0:
            return (_prod_range(p - j + 1, p), _prod_range(1, j),
                    _prod_range(p - j + 1, p))
        q = ones[j - 2]
        num = _prod_range(q + 1, p)
        den = mpz(j) * _prod_range(q - j + 2, p - j)
        return num, den, num
    mid = (lo + hi) // 2
    pn1, pd1, sn1 = _split(ones, lo, mid, j0)
    pn2, pd2, sn2 = _split(ones, mid + 1, hi, j0)
    return pn1 * pn2, pd1 * pd2, sn1 * pd2 + pn1 * sn2


def rank_big(word) -> int:
    ones = [p for p, bit in enumerate(word) if bit]
    j0 = _first_live_term(ones)
    if j0 is None:
        return 0
    pn, pd, sn = _split(ones, j0, len(ones), j0)
    q, rem = divmod(sn, pd)
    if rem:
        raise RankError("internal error: inexact rank division")
    return int(q)


RANK_SPLIT_THRESHOLD = 20000


def word_rank(word) -> int:
    """Colex rank of a fixed-weight word (list/array of 0-1)."""
    if len(word) >= RANK_SPLIT_THRESHOLD:
        return rank_big(word)
    return rank_small(word)


def word_unrank(length: int, weight: int, r: int):
    """The weight-`weight` word of the given length with colex rank r."""
    total = binom(length, weight)
    if not 0 <= r < total:
        raise RankError(f"rank {r} out of range [0, {total})")
    word = [0] * length
    k = weight
    b = mpz(binom(length - 1, k)) if k else mpz(0)
    r = mpz(r)
    for i in range(length - 1, -1, -1):
        if k == 0:
            break
        # b == C(i, k)
        if r >= b:
            r -= b
            word[i] = 1
            # C(i-1, k-1) = C(i, k) * k / i
            b = b * k // i if i else mpz(0)
            k -= 1
        else:
            # C(i-1, k) = C(i, k) * (i-k) / i
            b = b * (i - k) // i
    if r != 0:
        raise RankError("internal error: unrank residue")
    return word
