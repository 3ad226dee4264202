#pragma once

// Reference loudness meter kept independent of the library: published 48 kHz
// K-weighting coefficients, Direct Form I filtering, and every 400 ms block
// summed directly from the filtered samples. Mono, 48 kHz only.

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline std::vector<double> k_weight_48k(const std::vector<double>& x) {
  const double b1[3] = {1.53512485958697, -2.69169618940638, 1.19839281085285};
  const double a1[3] = {1.0, -1.69065929318241, 0.73248077421585};
  const double b2[3] = {1.0, -2.0, 1.0};
  const double a2[3] = {1.0, -1.99004745483398, 0.99007225036621};
  std::vector<double> y1(x.size()), y2(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = b1[0] * x[n];
    if (n >= 1) acc += b1[1] * x[n - 1] - a1[1] * y1[n - 1];
    if (n >= 2) acc += b1[2] * x[n - 2] - a1[2] * y1[n - 2];
    y1[n] = acc;
  }
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = b2[0] * y1[n];
    if (n >= 1) acc += b2[1] * y1[n - 1] - a2[1] * y2[n - 1];
    if (n >= 2) acc += b2[2] * y1[n - 2] - a2[2] * y2[n - 2];
    y2[n] = acc;
  }
  return y2;
}

/// Integrated loudness in LUFS; NaN when every block is gated out.
inline double integrated_lufs_48k(const std::vector<double>& x) {
  const std::size_t block = 19200, step = 4800;
  const auto y = k_weight_48k(x);
  std::vector<double> z;
  for (std::size_t start = 0; start + block <= y.size(); start += step) {
    double s = 0.0;
    for (std::size_t n = start; n < start + block; ++n) s += y[n] * y[n];
    z.push_back(s / static_cast<double>(block));
  }
  auto lufs = [](double ms) { return -0.691 + 10.0 * std::log10(ms); };
  double sum = 0.0;
  int count = 0;
  for (double v : z)
    if (v > 0.0 && lufs(v) > -70.0) {
      sum += v;
      ++count;
    }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  const double gate = lufs(sum / count) - 10.0;
  sum = 0.0;
  count = 0;
  for (double v : z)
    if (v > 0.0 && lufs(v) > -70.0 && lufs(v) > gate) {
      sum += v;
      ++count;
    }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return lufs(sum / count);
}

}  // namespace oracle
