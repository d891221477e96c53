#include "nbsc/rng.hpp"

#include <cmath>
#include <numbers>

namespace nbsc {

double Rng::exponential() { return -std::log1p(-uniform()); }

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace nbsc
