#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "microtext/error.hpp"
#include "microtext/features.hpp"

namespace microtext::models {

using features::SparseVector;
using ClassId = std::uint32_t;

/// Raised when an optimizer produces a non-finite objective.
class TrainingError : public Error {
 public:
  using Error::Error;
};

struct TrainSettings {
  double c_reg = 1.0;        // C
  double alpha = 1.0;        // additive smoothing for naive Bayes
  int max_iters = 1000;      // epochs
  double tol = 1e-6;         // relative objective change
  std::uint64_t seed = 0;    // unused by the deterministic solvers here

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Prediction {
  ClassId label = 0;
  std::vector<double> scores;
};

/// Index of the largest score; ties go to the smallest index.
ClassId argmax(std::span<const double> scores);

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

struct MnbModel {
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  double alpha = 1.0;
  std::vector<double> log_prior;       // n_classes
  std::vector<double> log_likelihood;  // n_classes x n_features, row-major

  std::span<const double> class_log_likelihood(ClassId c) const {
    return std::span<const double>(log_likelihood).subspan(c * n_features, n_features);
  }
};

/// log_prior[c] = ln(N_c / N) and
/// theta[c][t] = (alpha + sum of x_t over class c) / (alpha * V + total mass of class c).
/// Fractional feature values are accepted. Throws InvalidArgument if a class
/// in [0, n_classes) has no training example or a feature value is negative.
MnbModel mnb_fit(std::span<const SparseVector> x, std::span<const ClassId> y,
                 std::size_t n_classes, std::size_t n_features, double alpha = 1.0);

/// Scores are log-posteriors normalized so that their exponentials sum to 1.
Prediction mnb_predict(const MnbModel& model, const SparseVector& x);

// ---------------------------------------------------------------------------
// Linear models: one-vs-rest squared-hinge SVM and multinomial logistic regression

enum class LinearKind : std::uint8_t { kSvm, kLr };

struct TrainingMeta {
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_history;  // one entry per epoch, not persisted
};

struct LinearModel {
  LinearKind kind = LinearKind::kSvm;
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  double c_reg = 1.0;
  std::vector<double> weights;  // n_classes x n_features, row-major
  std::vector<double> bias;     // n_classes
  /// One entry per class for the SVM, a single entry for logistic regression.
  std::vector<TrainingMeta> meta;

  std::span<const double> class_weights(ClassId c) const {
    return std::span<const double>(weights).subspan(c * n_features, n_features);
  }
};

/// Binary squared-hinge primal objective
/// 0.5 * |w|^2 + C * sum_i max(0, 1 - s_i (w.x_i + b))^2, bias unregularized.
double squared_hinge_objective(std::span<const double> w, double b, std::span<const SparseVector> x,
                               std::span<const double> signs, double c_reg);

/// Gradient of squared_hinge_objective. `grad_w` must have w.size() entries.
void squared_hinge_gradient(std::span<const double> w, double b, std::span<const SparseVector> x,
                            std::span<const double> signs, double c_reg, std::span<double> grad_w,
                            double& grad_b);

/// One-vs-rest: class c is trained with s_i = +1 for y_i == c, -1 otherwise,
/// by truncated Newton iterations (conjugate gradient on the generalized
/// Hessian, Armijo line search). Stops when the relative objective change of
/// an iteration drops below tol, when no decrease is possible, or after
/// max_iters iterations. Throws InvalidArgument for fewer than two
/// classes and TrainingError on a non-finite objective.
LinearModel svm_fit(std::span<const SparseVector> x, std::span<const ClassId> y,
                    std::size_t n_classes, std::size_t n_features, const TrainSettings& settings);

/// Mean regularized negative log-likelihood
/// (1/N) * (sum_i -ln p(y_i | x_i) + |W|^2 / (2C)), bias unregularized.
double lr_objective(std::span<const double> weights, std::span<const double> bias,
                    std::span<const SparseVector> x, std::span<const ClassId> y,
                    std::size_t n_classes, double c_reg);

/// Gradient of lr_objective, written into grad_w (K x V) and grad_b (K).
void lr_gradient(std::span<const double> weights, std::span<const double> bias,
                 std::span<const SparseVector> x, std::span<const ClassId> y,
                 std::size_t n_classes, double c_reg, std::span<double> grad_w,
                 std::span<double> grad_b);

/// L-BFGS on lr_objective with the same stopping rule as svm_fit.
LinearModel lr_fit(std::span<const SparseVector> x, std::span<const ClassId> y,
                   std::size_t n_classes, std::size_t n_features, const TrainSettings& settings);

/// score(c) = w_c . x + b_c, argmax with smallest-id tie-break.
Prediction linear_predict(const LinearModel& model, const SparseVector& x);

/// Softmax of the linear scores.
std::vector<double> softmax(std::span<const double> scores);

}  // namespace microtext::models
