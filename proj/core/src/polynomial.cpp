#include "lojvar/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "lojvar/error.hpp"

namespace lojvar {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

Polynomial::Polynomial(int dim, std::vector<Monomial> terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim_ < 1) throw Error(ErrorCode::invalid_argument, "polynomial needs at least one variable");
  for (const auto& m : terms_) {
    if (static_cast<int>(m.exponents.size()) != dim_) {
      throw Error(ErrorCode::length_mismatch, "monomial exponent tuple does not match dimension");
    }
    for (int e : m.exponents) {
      if (e < 0) throw Error(ErrorCode::invalid_argument, "negative exponent in monomial");
    }
  }
}

double Polynomial::value(const Vec& x) const {
  if (x.size() != dim_) throw Error(ErrorCode::length_mismatch, "point dimension mismatch");
  double acc = 0.0;
  for (const auto& m : terms_) {
    double t = m.coefficient;
    for (int a = 0; a < dim_; ++a) t *= ipow(x(a), m.exponents[a]);
    acc += t;
  }
  return acc;
}

Vec Polynomial::gradient(const Vec& x) const {
  if (x.size() != dim_) throw Error(ErrorCode::length_mismatch, "point dimension mismatch");
  Vec g = Vec::Zero(dim_);
  for (const auto& m : terms_) {
    for (int j = 0; j < dim_; ++j) {
      if (m.exponents[j] == 0) continue;
      double t = m.coefficient * m.exponents[j];
      for (int a = 0; a < dim_; ++a) t *= ipow(x(a), a == j ? m.exponents[a] - 1 : m.exponents[a]);
      g(j) += t;
    }
  }
  return g;
}

std::string Polynomial::to_string() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (k > 0) out << " + ";
    out << terms_[k].coefficient;
    for (int a = 0; a < dim_; ++a) {
      if (terms_[k].exponents[a] > 0) out << "*x" << a << "^" << terms_[k].exponents[a];
    }
  }
  return out.str();
}

}  // namespace lojvar
