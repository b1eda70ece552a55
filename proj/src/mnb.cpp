#include <cmath>

#include <fmt/format.h>

#include "microtext/models.hpp"

namespace microtext::models {

MnbModel mnb_fit(std::span<const SparseVector> x, std::span<const ClassId> y,
                 std::size_t n_classes, std::size_t n_features, double alpha) {
  if (x.empty() || x.size() != y.size()) {
    throw InvalidArgument(fmt::format("need matching nonempty X and y, got {} and {}", x.size(), y.size()));
  }
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (n_classes == 0) throw InvalidArgument("n_classes must be positive");

  std::vector<std::size_t> class_docs(n_classes, 0);
  std::vector<double> mass(n_classes * n_features, 0.0);
  std::vector<double> total(n_classes, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const ClassId c = y[i];
    if (c >= n_classes) throw InvalidArgument(fmt::format("class id {} out of range", c));
    ++class_docs[c];
    const auto& v = x[i];
    for (std::size_t k = 0; k < v.indices.size(); ++k) {
      if (v.indices[k] >= n_features) throw InvalidArgument("feature index out of range");
      if (v.values[k] < 0.0) {
        throw InvalidArgument(fmt::format("negative feature value {} in example {}", v.values[k], i));
      }
      mass[c * n_features + v.indices[k]] += v.values[k];
      total[c] += v.values[k];
    }
  }

  MnbModel model;
  model.n_classes = n_classes;
  model.n_features = n_features;
  model.alpha = alpha;
  model.log_prior.resize(n_classes);
  model.log_likelihood.resize(n_classes * n_features);
  const double n = static_cast<double>(x.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (class_docs[c] == 0) {
      throw InvalidArgument(fmt::format("class {} has no training examples", c));
    }
    model.log_prior[c] = std::log(static_cast<double>(class_docs[c]) / n);
    const double log_denominator = std::log(alpha * static_cast<double>(n_features) + total[c]);
    for (std::size_t t = 0; t < n_features; ++t) {
      model.log_likelihood[c * n_features + t] =
          std::log(alpha + mass[c * n_features + t]) - log_denominator;
    }
  }
  return model;
}

Prediction mnb_predict(const MnbModel& model, const SparseVector& x) {
  Prediction p;
  p.scores.resize(model.n_classes);
  for (std::size_t c = 0; c < model.n_classes; ++c) {
    p.scores[c] = model.log_prior[c] + x.dot(model.class_log_likelihood(static_cast<ClassId>(c)));
  }
  p.label = argmax(p.scores);
  const double top = p.scores[p.label];
  double sum = 0.0;
  for (double s : p.scores) sum += std::exp(s - top);
  const double log_norm = top + std::log(sum);
  for (double& s : p.scores) s -= log_norm;
  return p;
}

}  // namespace microtext::models
