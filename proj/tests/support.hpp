#pragma once

#include <functional>

#include "doctest.h"
#include "hoferlab/errors.hpp"

// Runs f and returns the kind of the hoferlab::Error it throws.
inline hoferlab::ErrorKind thrown_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const hoferlab::Error& e) {
    return e.kind();
  }
  FAIL("no hoferlab::Error thrown");
  return hoferlab::ErrorKind::IoError;
}
