# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled day-simulation kernel; mirrors _kernel_py draw for draw."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free

BACKEND_NAME = "compiled"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15UL


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9UL
    z ^= z >> 27
    z *= 0x94D049BB133111EBUL
    z ^= z >> 31
    return z


cdef inline uint64_t _below(uint64_t key, uint64_t* ctr, uint64_t n) noexcept nogil:
    cdef uint64_t threshold = (0UL - n) % n
    cdef uint64_t r
    while True:
        ctr[0] += 1
        r = _mix64(key + GOLDEN * ctr[0])
        if r >= threshold:
            return r % n


def sim_days(okey, octr, n_days, cum_nums, den, d, lkey, lctr, n_levels,
             sample_levels, record_outcomes, record_levels):
    """Same contract as _kernel_py.sim_days; den must be below 2**63."""
    cdef uint64_t c_okey = okey
    cdef uint64_t c_octr = octr
    cdef uint64_t c_lkey = lkey
    cdef uint64_t c_lctr = lctr
    cdef uint64_t c_den = den
    cdef Py_ssize_t c_days = n_days
    cdef Py_ssize_t c_d = d
    cdef Py_ssize_t c_levels = n_levels if n_levels > 0 else 1
    cdef bint do_levels = bool(sample_levels)
    cdef bint rec_out = bool(record_outcomes)
    cdef bint rec_lvl = bool(record_levels)

    cdef uint64_t* cums = <uint64_t*> calloc(c_d, sizeof(uint64_t))
    cdef long long* counts = <long long*> calloc(c_d, sizeof(long long))
    cdef long long* tally = NULL
    if cums == NULL or counts == NULL:
        raise MemoryError()
    if do_levels:
        tally = <long long*> calloc(c_levels * c_d, sizeof(long long))
        if tally == NULL:
            free(cums); free(counts)
            raise MemoryError()
    cdef Py_ssize_t i
    for i in range(c_d):
        cums[i] = cum_nums[i]

    outcomes = [] if rec_out else None
    levels = [] if rec_lvl else None

    cdef uint64_t u
    cdef Py_ssize_t idx, v
    cdef Py_ssize_t day
    try:
        for day in range(c_days):
            u = _below(c_okey, &c_octr, c_den)
            idx = 0
            while cums[idx] <= u:
                idx += 1
            counts[idx] += 1
            if rec_out:
                outcomes.append(idx + 1)
            if do_levels:
                v = <Py_ssize_t> _below(c_lkey, &c_lctr, <uint64_t> n_levels)
                tally[v * c_d + idx] += 1
                if rec_lvl:
                    levels.append(v)
        counts_list = [counts[i] for i in range(c_d)]
        if do_levels:
            tally_list = [
                [tally[v * c_d + i] for i in range(c_d)] for v in range(n_levels)
            ]
        else:
            tally_list = None
        return int(c_octr), int(c_lctr), counts_list, tally_list, outcomes, levels
    finally:
        free(cums)
        free(counts)
        if tally != NULL:
            free(tally)


def draw_level_counts(lkey, lctr, n_days, n_levels, record):
    cdef uint64_t c_lkey = lkey
    cdef uint64_t c_lctr = lctr
    cdef Py_ssize_t c_days = n_days
    cdef Py_ssize_t c_levels = n_levels
    cdef bint rec = bool(record)
    cdef long long* counts = <long long*> calloc(c_levels, sizeof(long long))
    if counts == NULL:
        raise MemoryError()
    seq = [] if rec else None
    cdef Py_ssize_t v, day
    try:
        for day in range(c_days):
            v = <Py_ssize_t> _below(c_lkey, &c_lctr, <uint64_t> n_levels)
            counts[v] += 1
            if rec:
                seq.append(v)
        return int(c_lctr), [counts[v] for v in range(c_levels)], seq
    finally:
        free(counts)
