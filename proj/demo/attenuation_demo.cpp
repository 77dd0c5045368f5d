// Prints zero-order and partial correlations for every pair of a small
// one-factor model, computed from the loadings alone and by inverting the
// implied correlation matrix.

#include <cstdio>

#include "unifactor/partialcorr.hpp"

int main() {
  const auto lambda = unifactor::validate_loadings({0.8, 0.7, -0.6, 0.5, 0.4});
  const auto r = unifactor::implied_correlation(lambda);

  std::printf("  i  j   zero-order      partial          K   |precision - closed|\n");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t j = i + 1; j < lambda.size(); ++j) {
      const auto cf = unifactor::partial_corr_closed_form(lambda, i, j);
      const double dense = unifactor::partial_corr_precision(r, i, j);
      std::printf("%3zu%3zu  %11.6f  %11.6f  %9.6f   %.2e\n", i, j, cf.zero_order, cf.partial,
                  *cf.k_value, std::abs(dense - cf.partial));
    }
  }
}
