#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lojvar/error.hpp"

namespace lojvar::test {

inline constexpr double kPi = std::numbers::pi;

}  // namespace lojvar::test

// Asserts that `stmt` throws lojvar::Error with the given code.
#define EXPECT_LOJVAR_ERROR(stmt, expected_code)                         \
  do {                                                                   \
    try {                                                                \
      stmt;                                                              \
      ADD_FAILURE() << "expected " << #expected_code << ", nothing thrown"; \
    } catch (const ::lojvar::Error& e_) {                                \
      EXPECT_EQ(e_.code(), ::lojvar::ErrorCode::expected_code) << e_.what(); \
    }                                                                    \
  } while (0)
