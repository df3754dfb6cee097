#include "kpirl/projection_irl.hpp"

#include <algorithm>
#include <cmath>

namespace kpirl {

std::pair<double, RkhsVector> projection_step(const RkhsVector& mu_bar_prev,
                                              const RkhsVector& mu_i, const RkhsVector& mu_e,
                                              const KernelSpec& spec) {
  // beta = <mu_i - mu_bar, mu_E - mu_bar> / <mu_i - mu_bar, mu_i - mu_bar>,
  // expanded through pairwise dots so no difference expansion is formed.
  const double d_ii = dot(mu_i, mu_i, spec);
  const double d_bb = dot(mu_bar_prev, mu_bar_prev, spec);
  const double d_ib = dot(mu_i, mu_bar_prev, spec);
  const double d_ie = dot(mu_i, mu_e, spec);
  const double d_be = dot(mu_bar_prev, mu_e, spec);

  const double denom = d_ii - 2.0 * d_ib + d_bb;
  if (denom <= 1e-15)
    throw DegenerateStepError("projection_step: mu_i coincides with previous mu_bar");
  const double numer = d_ie - d_be - d_ib + d_bb;

  double beta = std::clamp(numer / denom, 0.0, 1.0);
  RkhsVector mu_bar = lin_comb(1.0 - beta, mu_bar_prev, beta, mu_i);
  return {beta, std::move(mu_bar)};
}

}  // namespace kpirl
