# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Levenshtein kernel over int-encoded symbol sequences.

Unit insert/delete/substitute costs, two rolling rows. This is the inner
loop of case retrieval, which rescans the whole case base per query; the
pure-Python twin lives in sciwb.editdist.
"""

from libc.stdlib cimport free, malloc


def levenshtein_i32(int[::1] a, int[::1] b):
    cdef Py_ssize_t la = a.shape[0]
    cdef Py_ssize_t lb = b.shape[0]
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef int *prev = <int *> malloc((lb + 1) * sizeof(int))
    cdef int *curr = <int *> malloc((lb + 1) * sizeof(int))
    if prev == NULL or curr == NULL:
        if prev != NULL:
            free(prev)
        if curr != NULL:
            free(curr)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int sub, dele, ins, best
    cdef int *tmp
    try:
        for j in range(lb + 1):
            prev[j] = <int> j
        for i in range(1, la + 1):
            curr[0] = <int> i
            for j in range(1, lb + 1):
                sub = prev[j - 1] + (0 if a[i - 1] == b[j - 1] else 1)
                dele = prev[j] + 1
                ins = curr[j - 1] + 1
                best = sub
                if dele < best:
                    best = dele
                if ins < best:
                    best = ins
                curr[j] = best
            tmp = prev
            prev = curr
            curr = tmp
        return prev[lb]
    finally:
        free(prev)
        free(curr)
