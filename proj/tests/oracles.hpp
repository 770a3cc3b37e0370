#pragma once

#include "solitonkit/rational.hpp"

namespace oracles {

inline solitonkit::Rational hpn_eigenvalue(int n, int k) {
  return solitonkit::make_rational(k * k + k * (2 * n + 1), 2 * (n + 2));
}
inline solitonkit::Rational cap2_eigenvalue(int k) { return solitonkit::make_rational(k * k + 11 * k, 18); }

struct PinchCase {
  int n;
  long long kmin_num, kmin_den, kmax_num, kmax_den;
  bool certifies;
};

// Decisions worked out by hand from K_min >= 1/n and K_min / K_max > (n - 2) / (3n).
inline const PinchCase kPinchTable[] = {
    {4, 3, 10, 1, 1, true}, {4, 1, 5, 1, 1, false}, {4, 1, 4, 1, 1, true},  {4, 1, 4, 3, 2, false},
    {4, 1, 4, 7, 5, true},  {3, 1, 3, 1, 1, true},  {3, 1, 3, 3, 1, false}, {3, 1, 3, 2, 1, true},
    {3, 3, 10, 1, 1, false}, {5, 1, 5, 1, 1, false}, {5, 1, 5, 9, 10, true}, {5, 1, 4, 1, 1, true},
    {5, 1, 6, 1, 2, false}, {6, 1, 6, 1, 2, true},  {6, 1, 6, 3, 4, false}, {6, 1, 6, 2, 3, true},
    {2, 1, 2, 10, 1, true}, {2, 1, 3, 1, 1, false}, {8, 1, 8, 1, 2, false}, {8, 1, 8, 3, 8, true},
};

}  // namespace oracles
