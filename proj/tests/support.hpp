#pragma once

#include <doctest.h>

#include "random_states.hpp"

// Magnitude-based comparison for complex values.
#define CHECK_CPLX(lhs, rhs, tol)                                                                 \
    do {                                                                                          \
        modval::Complex cplx_l = (lhs);                                                           \
        modval::Complex cplx_r = (rhs);                                                           \
        CHECK_MESSAGE(std::abs(cplx_l - cplx_r) <= (tol),                                         \
                      "|", cplx_l.real(), "+", cplx_l.imag(), "i - (", cplx_r.real(), "+",        \
                      cplx_r.imag(), "i)| > ", (tol));                                            \
    } while (0)
