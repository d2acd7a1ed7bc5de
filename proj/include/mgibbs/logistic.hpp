#pragma once

#include <span>
#include <vector>

#include "mgibbs/design.hpp"

namespace mgibbs {

// Numerically stable log(1 + exp(x)) and logistic function.
double log1pexp(double x);
double sigmoid(double x);

// Logistic pseudo-likelihood
//   sum_u t(u) (theta^T b(u) + o(u)) - log[1 + exp(theta^T b(u) + o(u))]
// over the given rows (all rows when `rows` is empty). Reductions run over
// fixed blocks so results are bit-identical for any thread count.
double logistic_loglik(const DesignData& design, std::span<const double> theta,
                       std::span<const std::size_t> rows = {});

// Gradient B^T (t - sigma(B theta + o)).
std::vector<double> logistic_gradient(const DesignData& design,
                                      std::span<const double> theta,
                                      std::span<const std::size_t> rows = {});

}  // namespace mgibbs
