#pragma once

#include <optional>

#include "biphoton/error.hpp"

// Error code thrown by f, or nullopt if it returned normally.
template <typename F>
std::optional<biphoton::ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const biphoton::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
