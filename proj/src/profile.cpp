#include "impact/profile.hpp"

#include <cmath>
#include <string>

#include "impact/errors.hpp"

namespace impact {

void ForceProfile::validate() const {
  if (time.size() != force.size()) {
    throw MalformedProfile("time and force columns differ in length (" + std::to_string(time.size()) + " vs " +
                           std::to_string(force.size()) + ")");
  }
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw MalformedProfile("sample rate must be positive");
  }
  const double dt = 1.0 / sample_rate_hz;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (!std::isfinite(time[i]) || !std::isfinite(force[i])) {
      throw MalformedProfile("non-finite sample at row " + std::to_string(i));
    }
    if (i > 0 && std::abs((time[i] - time[i - 1]) - dt) > 1e-6 * dt) {
      throw MalformedProfile("non-uniform sampling at row " + std::to_string(i));
    }
  }
}

}  // namespace impact
