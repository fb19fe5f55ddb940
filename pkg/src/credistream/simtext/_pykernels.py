"""Pure-Python similarity kernels.

Fallback backend with the exact same contracts as the compiled kernels in
``_ckernels``; the package selects whichever is importable.  Keep the two
files in lockstep: the parity tests compare them pairwise.
"""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character edits transforming ``a`` into ``b``."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        prev, cur = cur, prev
    return prev[lb]


def needleman_wunsch(a: str, b: str, match: float, mismatch: float, gap: float) -> float:
    """Optimal global-alignment score with linear gap penalties."""
    la, lb = len(a), len(b)
    prev = [j * gap for j in range(lb + 1)]
    cur = [0.0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i * gap
        ca = a[i - 1]
        for j in range(1, lb + 1):
            diag = prev[j - 1] + (match if ca == b[j - 1] else mismatch)
            up = prev[j] + gap
            left = cur[j - 1] + gap
            cur[j] = diag if diag >= up and diag >= left else (up if up >= left else left)
        prev, cur = cur, prev
    return prev[lb]


def smith_waterman(a: str, b: str, match: float, mismatch: float, gap: float) -> float:
    """Optimal local-alignment score (>= 0 by construction)."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    prev = [0.0] * (lb + 1)
    cur = [0.0] * (lb + 1)
    best = 0.0
    for i in range(1, la + 1):
        ca = a[i - 1]
        for j in range(1, lb + 1):
            diag = prev[j - 1] + (match if ca == b[j - 1] else mismatch)
            up = prev[j] + gap
            left = cur[j - 1] + gap
            score = diag if diag >= up and diag >= left else (up if up >= left else left)
            if score < 0.0:
                score = 0.0
            cur[j] = score
            if score > best:
                best = score
        prev, cur = cur, prev
        cur[0] = 0.0
    return best


def jaro_winkler(a: str, b: str) -> float:
    """Jaro similarity with the Winkler prefix boost (prefix <= 4, scale 0.1)."""
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0

    search_range = max(la, lb) // 2 - 1
    if search_range < 0:
        search_range = 0
    a_flags = [False] * la
    b_flags = [False] * lb

    matches = 0
    for i, ca in enumerate(a):
        lo = i - search_range if i > search_range else 0
        hi = i + search_range + 1
        if hi > lb:
            hi = lb
        for j in range(lo, hi):
            if not b_flags[j] and b[j] == ca:
                a_flags[i] = b_flags[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0

    # Transpositions: matched characters out of order, counted in halves.
    half_transpositions = 0
    k = 0
    for i in range(la):
        if a_flags[i]:
            while not b_flags[k]:
                k += 1
            if a[i] != b[k]:
                half_transpositions += 1
            k += 1
    transpositions = half_transpositions // 2

    jaro = (
        matches / la + matches / lb + (matches - transpositions) / matches
    ) / 3.0

    prefix = 0
    for ca, cb in zip(a, b):
        if ca != cb or prefix == 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)
