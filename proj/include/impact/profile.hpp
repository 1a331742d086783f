#pragma once

#include <string>
#include <vector>

namespace impact {

/// Uniformly sampled normal contact force. Time zero is contact onset.
struct ForceProfile {
  double sample_rate_hz = 25000.0;
  std::vector<double> time;   ///< s
  std::vector<double> force;  ///< N
  /// Pre-impact normal velocity (m/s, negative when approaching).
  double v_pre = 0.0;
  std::string label;

  std::size_t size() const { return force.size(); }
  double duration() const { return time.empty() ? 0.0 : time.back() - time.front(); }

  /// Throws MalformedProfile on mismatched columns, non-finite samples or
  /// sampling that deviates from sample_rate_hz by more than 1e-6 relative.
  void validate() const;
};

}  // namespace impact
