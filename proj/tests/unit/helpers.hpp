#pragma once

#include <doctest.h>

#include "relevance/error.hpp"

// Runs `expr` and checks that it throws relevance::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                          \
  do {                                                                 \
    bool thrown_ = false;                                              \
    try {                                                              \
      (void)(expr);                                                    \
    } catch (const relevance::Error& e_) {                             \
      thrown_ = true;                                                  \
      CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());          \
    }                                                                  \
    CHECK_MESSAGE(thrown_, "expected relevance::Error from " #expr);   \
  } while (false)
