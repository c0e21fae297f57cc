# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: bitsliced circuit evaluation and the U query sweep."""

from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t, uint8_t

DEF OP_CONST0 = 0
DEF OP_CONST1 = 1
DEF OP_INPUT = 2
DEF OP_NOT = 3
DEF OP_AND = 4
DEF OP_OR = 5


def eval_bits(const int8_t[::1] op, const int32_t[::1] a, const int32_t[::1] b,
              const uint64_t[:, ::1] inputs, uint64_t[:, ::1] val):
    """Two-valued evaluation; ``val`` is an (s, L) scratch buffer."""
    cdef Py_ssize_t s = op.shape[0], L = inputs.shape[1], g, k
    cdef int32_t x, y
    cdef uint64_t full = ~(<uint64_t>0)
    with nogil:
        for g in range(s):
            x = a[g]
            y = b[g]
            if op[g] == OP_AND:
                for k in range(L):
                    val[g, k] = val[x, k] & val[y, k]
            elif op[g] == OP_OR:
                for k in range(L):
                    val[g, k] = val[x, k] | val[y, k]
            elif op[g] == OP_NOT:
                for k in range(L):
                    val[g, k] = ~val[x, k]
            elif op[g] == OP_INPUT:
                for k in range(L):
                    val[g, k] = inputs[x, k]
            elif op[g] == OP_CONST1:
                for k in range(L):
                    val[g, k] = full
            else:
                for k in range(L):
                    val[g, k] = 0


def eval_planes(const int8_t[::1] op, const int32_t[::1] a, const int32_t[::1] b,
                const uint64_t[:, ::1] in_one, const uint64_t[:, ::1] in_zero,
                uint64_t[:, ::1] one, uint64_t[:, ::1] zero):
    """Three-valued evaluation with known-one / known-zero planes."""
    cdef Py_ssize_t s = op.shape[0], L = in_one.shape[1], g, k
    cdef int32_t x, y
    cdef uint64_t full = ~(<uint64_t>0)
    with nogil:
        for g in range(s):
            x = a[g]
            y = b[g]
            if op[g] == OP_AND:
                for k in range(L):
                    one[g, k] = one[x, k] & one[y, k]
                    zero[g, k] = zero[x, k] | zero[y, k]
            elif op[g] == OP_OR:
                for k in range(L):
                    one[g, k] = one[x, k] | one[y, k]
                    zero[g, k] = zero[x, k] & zero[y, k]
            elif op[g] == OP_NOT:
                for k in range(L):
                    one[g, k] = zero[x, k]
                    zero[g, k] = one[x, k]
            elif op[g] == OP_INPUT:
                for k in range(L):
                    one[g, k] = in_one[x, k]
                    zero[g, k] = in_zero[x, k]
            elif op[g] == OP_CONST1:
                for k in range(L):
                    one[g, k] = full
                    zero[g, k] = 0
            else:
                for k in range(L):
                    one[g, k] = 0
                    zero[g, k] = full


def sweep(const uint8_t[::1] tape, int64_t z, int64_t s0, int64_t step,
          int64_t clock, int64_t[::1] out=None):
    """One query-resolution sweep over cells 1..s0 of a configuration tape.

    The head reaches cell p+1 at ``clock + 1 + step*p``; the answer is the
    bit in cell z+1. Returns ``(answer, clock after the sweep)``.
    """
    cdef int64_t p, c = clock + 1
    cdef int answer = 0
    cdef bint record = out is not None
    for p in range(s0):
        if record:
            out[p] = c
        if p == z:
            answer = tape[p + 1]
        c += step
    c += s0 + 1
    c += 1
    return answer, c
