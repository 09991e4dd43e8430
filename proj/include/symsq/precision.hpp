#pragma once

#include <stdexcept>

#include "symsq/real.hpp"

namespace symsq {

// Governs every numeric operation: target precision, internal guard bits,
// series truncation threshold (as a binary exponent) and an iteration cap.
struct PrecisionContext {
  long bits = 192;
  long guard_bits = 32;
  // A series is truncated once its rigorous tail falls below
  // 2^-cutoff_bits relative to the partial sum; 0 means bits + guard_bits.
  long cutoff_bits = 0;
  long max_terms = 4'000'000;

  static PrecisionContext with_bits(long b) {
    PrecisionContext c;
    c.bits = b;
    c.validate();
    return c;
  }

  long internal_bits() const { return bits + guard_bits; }
  long series_cutoff_bits() const { return cutoff_bits > 0 ? cutoff_bits : bits + guard_bits; }

  void validate() const {
    if (bits < 64) throw std::invalid_argument("precision below 64 bits");
    if (guard_bits < 0) throw std::invalid_argument("negative guard bits");
    if (max_terms <= 0) throw std::invalid_argument("max_terms must be positive");
  }
};

// Thrown when a requested accuracy cannot be reached within the budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symsq
