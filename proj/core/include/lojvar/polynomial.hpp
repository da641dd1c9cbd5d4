#pragma once

#include <string>
#include <vector>

#include "lojvar/types.hpp"

namespace lojvar {

struct Monomial {
  std::vector<int> exponents;
  double coefficient = 0.0;
};

/// Sparse real polynomial on R^n with exact gradient.
class Polynomial {
 public:
  Polynomial(int dim, std::vector<Monomial> terms);

  int dim() const noexcept { return dim_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  /// Human-readable form such as "1*x0^2 + 1*x1^4".
  std::string to_string() const;

 private:
  int dim_;
  std::vector<Monomial> terms_;
};

}  // namespace lojvar
