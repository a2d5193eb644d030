// Distinct alleles per class when theta_l = alpha_l n^beta: E K / norm(n)
// approaches the regime limit as n grows.

#include "esf/esf.hpp"

#include <cstdio>

int main() {
  using namespace esf;
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    const RegimeSpec spec(beta, {1.0, 2.0});
    std::printf("beta = %.1f\n%8s %3s %14s %14s %12s %12s\n", beta, "n", "l", "E K", "Var K", "E K / norm", "limit");
    for (int n : {100, 1000, 10'000, 100'000}) {
      const FloatParams theta = spec.theta_at(n);
      for (int l = 0; l < spec.k(); ++l) {
        const auto pred = regime_prediction(spec, l);
        const double e = expected_k(n, theta, l);
        std::printf("%8d %3d %14.4f %14.4f %12.5f %12.5f\n", n, l, e, var_k(n, theta, l), e / pred.norm(n, beta), pred.limit);
      }
    }
  }
}
