#include "microtext/models.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace microtext::models {

void TrainSettings::validate() const {
  if (!(c_reg > 0.0) || !std::isfinite(c_reg)) {
    throw InvalidArgument(fmt::format("C must be positive and finite, got {}", c_reg));
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument(fmt::format("alpha must be positive and finite, got {}", alpha));
  }
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
}

ClassId argmax(std::span<const double> scores) {
  ClassId best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = static_cast<ClassId>(c);
  }
  return best;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace microtext::models
