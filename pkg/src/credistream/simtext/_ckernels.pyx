# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity kernels (hot path of the all-pairs benchmark).

Mirrors ``_pykernels`` exactly; the parity tests assert agreement.
"""

from libc.stdlib cimport free, malloc


cdef Py_UCS4* _ucs4(str s, Py_ssize_t n) except NULL:
    cdef Py_UCS4* buf = <Py_UCS4*> malloc((n if n > 0 else 1) * sizeof(Py_UCS4))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = s[i]
    return buf


def levenshtein(str a, str b):
    """Minimum number of single-character edits transforming ``a`` into ``b``."""
    if a == b:
        return 0
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef Py_UCS4* ua = _ucs4(a, la)
    cdef Py_UCS4* ub = _ucs4(b, lb)
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(ua); free(ub); free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j, best, cand, result
    cdef Py_ssize_t* tmp
    cdef Py_UCS4 ca
    with nogil:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            cur[0] = i
            ca = ua[i - 1]
            for j in range(1, lb + 1):
                best = prev[j - 1] + (0 if ca == ub[j - 1] else 1)
                cand = prev[j] + 1
                if cand < best:
                    best = cand
                cand = cur[j - 1] + 1
                if cand < best:
                    best = cand
                cur[j] = best
            tmp = prev; prev = cur; cur = tmp
        result = prev[lb]
    free(ua); free(ub); free(prev); free(cur)
    return result


def needleman_wunsch(str a, str b, double match, double mismatch, double gap):
    """Optimal global-alignment score with linear gap penalties."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb * gap
    if lb == 0:
        return la * gap
    cdef Py_UCS4* ua = _ucs4(a, la)
    cdef Py_UCS4* ub = _ucs4(b, lb)
    cdef double* prev = <double*> malloc((lb + 1) * sizeof(double))
    cdef double* cur = <double*> malloc((lb + 1) * sizeof(double))
    if prev == NULL or cur == NULL:
        free(ua); free(ub); free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef double score, cand, left, result
    cdef double* tmp
    cdef Py_UCS4 ca
    with nogil:
        for j in range(lb + 1):
            prev[j] = j * gap
        for i in range(1, la + 1):
            left = i * gap
            cur[0] = left
            ca = ua[i - 1]
            for j in range(1, lb + 1):
                score = prev[j - 1] + (match if ca == ub[j - 1] else mismatch)
                cand = prev[j] + gap
                if cand > score:
                    score = cand
                cand = left + gap
                if cand > score:
                    score = cand
                left = score
                cur[j] = score
            tmp = prev; prev = cur; cur = tmp
        result = prev[lb]
    free(ua); free(ub); free(prev); free(cur)
    return result


def smith_waterman(str a, str b, double match, double mismatch, double gap):
    """Optimal local-alignment score (>= 0 by construction)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0 or lb == 0:
        return 0.0
    cdef Py_UCS4* ua = _ucs4(a, la)
    cdef Py_UCS4* ub = _ucs4(b, lb)
    cdef double* prev = <double*> malloc((lb + 1) * sizeof(double))
    cdef double* cur = <double*> malloc((lb + 1) * sizeof(double))
    if prev == NULL or cur == NULL:
        free(ua); free(ub); free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef double score, cand, left, best
    cdef double* tmp
    cdef Py_UCS4 ca
    with nogil:
        best = 0.0
        for j in range(lb + 1):
            prev[j] = 0.0
            cur[j] = 0.0
        for i in range(1, la + 1):
            ca = ua[i - 1]
            left = 0.0
            for j in range(1, lb + 1):
                score = prev[j - 1] + (match if ca == ub[j - 1] else mismatch)
                cand = prev[j] + gap
                if cand > score:
                    score = cand
                cand = left + gap
                if cand > score:
                    score = cand
                if score < 0.0:
                    score = 0.0
                left = score
                cur[j] = score
                if score > best:
                    best = score
            tmp = prev; prev = cur; cur = tmp
    free(ua); free(ub); free(prev); free(cur)
    return best


def jaro_winkler(str a, str b):
    """Jaro similarity with the Winkler prefix boost (prefix <= 4, scale 0.1).

    The window scan for matches is replaced by per-character position
    cursors for ASCII characters (valid because the window's lower bound
    only grows with i); non-ASCII characters fall back to the plain scan.
    Results are identical to the reference implementation.
    """
    if a == b:
        return 1.0
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0 or lb == 0:
        return 0.0
    cdef Py_UCS4* ua = _ucs4(a, la)
    cdef Py_UCS4* ub = _ucs4(b, lb)
    cdef unsigned char* a_flags = <unsigned char*> malloc(la)
    cdef unsigned char* b_flags = <unsigned char*> malloc(lb)
    cdef Py_ssize_t* positions = <Py_ssize_t*> malloc((lb if lb > 0 else 1) * sizeof(Py_ssize_t))
    if a_flags == NULL or b_flags == NULL or positions == NULL:
        free(ua); free(ub); free(a_flags); free(b_flags); free(positions)
        raise MemoryError()
    cdef Py_ssize_t search_range = (la if la > lb else lb) // 2 - 1
    if search_range < 0:
        search_range = 0
    cdef Py_ssize_t counts[128]
    cdef Py_ssize_t starts[128]
    cdef Py_ssize_t cursors[128]
    cdef Py_ssize_t ends[128]
    cdef Py_ssize_t i, j, lo, hi, k, c, cur, total
    cdef Py_ssize_t matches, half_transpositions, prefix
    cdef double jaro, result
    cdef Py_UCS4 ca
    with nogil:
        for i in range(la):
            a_flags[i] = 0
        for j in range(lb):
            b_flags[j] = 0
        # Bucket-sort the positions of b's ASCII characters.
        for c in range(128):
            counts[c] = 0
        for j in range(lb):
            if ub[j] < 128:
                counts[<Py_ssize_t> ub[j]] += 1
        total = 0
        for c in range(128):
            starts[c] = total
            cursors[c] = total
            total += counts[c]
            ends[c] = total
        for j in range(lb):
            if ub[j] < 128:
                c = <Py_ssize_t> ub[j]
                positions[starts[c]] = j
                starts[c] += 1

        matches = 0
        for i in range(la):
            ca = ua[i]
            lo = i - search_range if i > search_range else 0
            hi = i + search_range + 1
            if hi > lb:
                hi = lb
            if lo >= hi:
                continue
            if ca < 128:
                c = <Py_ssize_t> ca
                cur = cursors[c]
                while cur < ends[c] and (positions[cur] < lo or b_flags[positions[cur]]):
                    cur += 1
                cursors[c] = cur
                if cur < ends[c] and positions[cur] < hi:
                    j = positions[cur]
                    a_flags[i] = 1
                    b_flags[j] = 1
                    matches += 1
                    cursors[c] = cur + 1
            else:
                for j in range(lo, hi):
                    if b_flags[j] == 0 and ub[j] == ca:
                        a_flags[i] = 1
                        b_flags[j] = 1
                        matches += 1
                        break
        if matches == 0:
            result = 0.0
        else:
            half_transpositions = 0
            k = 0
            for i in range(la):
                if a_flags[i]:
                    while b_flags[k] == 0:
                        k += 1
                    if ua[i] != ub[k]:
                        half_transpositions += 1
                    k += 1
            jaro = (
                <double> matches / la
                + <double> matches / lb
                + <double> (matches - half_transpositions // 2) / matches
            ) / 3.0
            prefix = 0
            for i in range(la if la < lb else lb):
                if ua[i] != ub[i] or prefix == 4:
                    break
                prefix += 1
            result = jaro + prefix * 0.1 * (1.0 - jaro)
    free(ua); free(ub); free(a_flags); free(b_flags); free(positions)
    return result
