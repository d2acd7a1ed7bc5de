#include "mgibbs/logistic.hpp"

#include <cmath>

#include "mgibbs/parallel.hpp"

namespace mgibbs {

double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_loglik(const DesignData& design, std::span<const double> theta,
                       std::span<const std::size_t> rows) {
  const std::size_t n = rows.empty() ? design.row_count() : rows.size();
  return det_sum(n, [&](std::size_t i) {
    const std::size_t r = rows.empty() ? i : rows[i];
    const double eta = design.linear_value(r, theta) + design.offset[r];
    return (design.is_data[r] ? eta : 0.0) - log1pexp(eta);
  });
}

std::vector<double> logistic_gradient(const DesignData& design,
                                      std::span<const double> theta,
                                      std::span<const std::size_t> rows) {
  const std::size_t n = rows.empty() ? design.row_count() : rows.size();
  const std::size_t dim = static_cast<std::size_t>(design.layout.dim);
  using Acc = std::vector<double>;
  return det_reduce<Acc>(
      n, Acc(dim, 0.0),
      [&](std::size_t i, Acc& acc) {
        const std::size_t r = rows.empty() ? i : rows[i];
        const double eta = design.linear_value(r, theta) + design.offset[r];
        const double resid =
            (design.is_data[r] ? 1.0 : 0.0) - sigmoid(eta);
        const auto& cols = design.row_support(r);
        const auto vals = design.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          acc[static_cast<std::size_t>(cols[k])] += vals[k] * resid;
        }
      },
      [](Acc& a, Acc& b) {
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
      });
}

}  // namespace mgibbs
