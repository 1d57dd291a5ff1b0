// Prints alpha_n(m) for both bands, exact and decimal, with the worst response error at N = 64.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "lwave/filter_design.hpp"

int main(int argc, char** argv) {
  const int max_order = argc > 1 ? std::atoi(argv[1]) : 4;
  for (auto band : {lwave::FilterBand::ZeroMax, lwave::FilterBand::Central}) {
    std::cout << lwave::to_string(band) << '\n';
    for (int n = 1; n <= max_order; ++n) {
      const auto f = lwave::design_filter(n, band);
      std::cout << "  n=" << n << ':';
      for (int m = 1; m <= n; ++m) std::printf("  %+.6f", f(m));
      double worst = 0.0;
      for (const auto& p : lwave::filter_error_curve(f, 64)) worst = std::max(worst, p.error);
      std::printf("   (max error %.3g)\n", worst);
    }
  }
  const auto third = lwave::design_filter(3, lwave::FilterBand::ZeroMax);
  std::cout << "exact n=3 zeromax:";
  for (const auto& a : third.exact_coeffs()) std::cout << ' ' << a;
  std::cout << '\n';
}
