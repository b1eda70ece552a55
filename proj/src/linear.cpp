#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "microtext/models.hpp"

namespace microtext::models {
namespace {

// Armijo constant and halving budget of the line searches.
constexpr double kArmijo = 1e-4;
constexpr int kMaxLineSearch = 60;
// Conjugate gradient stops at this fraction of the gradient norm.
constexpr double kCgTolerance = 0.1;
constexpr int kMaxCgIterations = 250;

void check_inputs(std::span<const SparseVector> x, std::span<const ClassId> y,
                  std::size_t n_classes, std::size_t n_features, const TrainSettings& settings) {
  settings.validate();
  if (x.empty() || x.size() != y.size()) {
    throw InvalidArgument(fmt::format("need matching nonempty X and y, got {} and {}", x.size(), y.size()));
  }
  if (n_classes < 2) throw InvalidArgument("linear models need at least two classes");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] >= n_classes) throw InvalidArgument(fmt::format("class id {} out of range", y[i]));
    for (auto idx : x[i].indices) {
      if (idx >= n_features) throw InvalidArgument("feature index out of range");
    }
  }
}

bool converged(double previous, double current, double tol) {
  const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
  return std::abs(previous - current) <= tol * scale;
}

double hinge_sq(double r) { return r > 0.0 ? r * r : 0.0; }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Binary squared-hinge SVM by truncated Newton in the primal: conjugate
// gradient on the generalized Hessian gives the direction, an Armijo line
// search the step. The bias is an unregularized extra coordinate.
class SquaredHingeSolver {
 public:
  SquaredHingeSolver(std::span<const SparseVector> x, std::vector<double> signs, std::size_t n_features,
                     double c_reg)
      : x_(x), signs_(std::move(signs)), c_(c_reg), w_(n_features, 0.0), margin_(x.size(), 0.0) {}

  double objective() const { return objective_at(w_, b_); }

  /// One Newton iteration. Returns false when no decrease could be made.
  bool iterate() {
    const std::size_t v = w_.size();
    std::vector<double> grad(v + 1);
    gradient(grad);
    const double gnorm = std::sqrt(dot(grad, grad));
    if (gnorm == 0.0) return false;

    const auto dir = newton_direction(grad, gnorm);
    const std::span<const double> dw(dir.data(), v);
    const double db = dir[v];
    const double slope = dot(grad, dir);
    if (!(slope < 0.0)) return false;

    // Objective along the ray costs O(N + V) once X.d is known.
    std::vector<double> xd(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) xd[i] = x_[i].dot(dw) + db;
    const double ww = dot(w_, w_);
    const double wd = dot(w_, dw);
    const double dd = dot(dw, dw);
    const double f0 = 0.5 * ww + c_ * loss_along(xd, 0.0);
    double step = 1.0;
    for (int ls = 0; ls < kMaxLineSearch; ++ls, step *= 0.5) {
      const double f = 0.5 * (ww + 2.0 * step * wd + step * step * dd) + c_ * loss_along(xd, step);
      if (f <= f0 + kArmijo * step * slope) {
        for (std::size_t j = 0; j < v; ++j) w_[j] += step * dw[j];
        b_ += step * db;
        recompute_margins();
        return true;
      }
    }
    return false;
  }

  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  double objective_at(std::span<const double> w, double b) const {
    double loss = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) loss += hinge_sq(1.0 - signs_[i] * (x_[i].dot(w) + b));
    return 0.5 * dot(w, w) + c_ * loss;
  }

  double loss_along(std::span<const double> xd, double step) const {
    double loss = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      loss += hinge_sq(1.0 - signs_[i] * (margin_[i] + step * xd[i]));
    }
    return loss;
  }

  void recompute_margins() {
    for (std::size_t i = 0; i < x_.size(); ++i) margin_[i] = x_[i].dot(w_) + b_;
  }

  bool active(std::size_t i) const { return 1.0 - signs_[i] * margin_[i] > 0.0; }

  // [grad_w | grad_b]
  void gradient(std::span<double> g) const {
    const std::size_t v = w_.size();
    std::copy(w_.begin(), w_.end(), g.begin());
    g[v] = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double r = 1.0 - signs_[i] * margin_[i];
      if (r <= 0.0) continue;
      const double coef = -2.0 * c_ * signs_[i] * r;
      const auto& xi = x_[i];
      for (std::size_t k = 0; k < xi.indices.size(); ++k) g[xi.indices[k]] += coef * xi.values[k];
      g[v] += coef;
    }
  }

  // Generalized Hessian times p: p_w + 2C sum over active i of x~_i (x~_i . p),
  // with x~_i = [x_i, 1] and no regularization on the bias.
  void hessian_times(std::span<const double> p, std::span<double> out) const {
    const std::size_t v = w_.size();
    const std::span<const double> pw = p.first(v);
    std::copy(pw.begin(), pw.end(), out.begin());
    out[v] = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!active(i)) continue;
      const auto& xi = x_[i];
      const double coef = 2.0 * c_ * (xi.dot(pw) + p[v]);
      for (std::size_t k = 0; k < xi.indices.size(); ++k) out[xi.indices[k]] += coef * xi.values[k];
      out[v] += coef;
    }
  }

  std::vector<double> newton_direction(std::span<const double> grad, double gnorm) const {
    const std::size_t n = grad.size();
    std::vector<double> d(n, 0.0);
    std::vector<double> r(grad.begin(), grad.end());
    for (double& v : r) v = -v;
    std::vector<double> p = r;
    std::vector<double> hp(n);
    double rr = dot(r, r);
    for (int it = 0; it < kMaxCgIterations; ++it) {
      if (std::sqrt(rr) <= kCgTolerance * gnorm) break;
      hessian_times(p, hp);
      const double curvature = dot(p, hp);
      if (!(curvature > 0.0)) break;
      const double a = rr / curvature;
      for (std::size_t k = 0; k < n; ++k) {
        d[k] += a * p[k];
        r[k] -= a * hp[k];
      }
      const double rr_next = dot(r, r);
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
    // The first CG step can only fail on a flat bias direction; fall back to descent.
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
      for (std::size_t k = 0; k < n; ++k) d[k] = -grad[k];
    }
    return d;
  }

  std::span<const SparseVector> x_;
  std::vector<double> signs_;
  double c_;
  std::vector<double> w_;
  double b_ = 0.0;
  std::vector<double> margin_;  // w . x_i + b
};

// Objective and gradient of the mean regularized multinomial NLL.
double lr_evaluate(std::span<const double> weights, std::span<const double> bias,
                   std::span<const SparseVector> x, std::span<const ClassId> y,
                   std::size_t n_classes, double c_reg, std::span<double> grad_w,
                   std::span<double> grad_b) {
  const std::size_t n_features = weights.size() / n_classes;
  const bool want_grad = !grad_b.empty();
  if (want_grad) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
  }
  std::vector<double> z(n_classes);
  double nll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      z[c] = bias[c] + x[i].dot(weights.subspan(c * n_features, n_features));
    }
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    const double lse = top + std::log(sum);
    nll += lse - z[y[i]];
    if (!want_grad) continue;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double coef = std::exp(z[c] - lse) - (c == y[i] ? 1.0 : 0.0);
      grad_b[c] += coef;
      double* row = grad_w.data() + c * n_features;
      const auto& v = x[i];
      for (std::size_t k = 0; k < v.indices.size(); ++k) row[v.indices[k]] += coef * v.values[k];
    }
  }
  double reg = 0.0;
  for (double v : weights) reg += v * v;
  const double inv_n = 1.0 / static_cast<double>(x.size());
  if (want_grad) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
      grad_w[k] = (grad_w[k] + weights[k] / c_reg) * inv_n;
    }
    for (double& g : grad_b) g *= inv_n;
  }
  return (nll + 0.5 * reg / c_reg) * inv_n;
}

}  // namespace

double squared_hinge_objective(std::span<const double> w, double b, std::span<const SparseVector> x,
                               std::span<const double> signs, double c_reg) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    loss += hinge_sq(1.0 - signs[i] * (x[i].dot(w) + b));
  }
  return 0.5 * reg + c_reg * loss;
}

void squared_hinge_gradient(std::span<const double> w, double b, std::span<const SparseVector> x,
                            std::span<const double> signs, double c_reg, std::span<double> grad_w,
                            double& grad_b) {
  std::copy(w.begin(), w.end(), grad_w.begin());
  grad_b = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = 1.0 - signs[i] * (x[i].dot(w) + b);
    if (r <= 0.0) continue;
    const double coef = -2.0 * c_reg * signs[i] * r;
    grad_b += coef;
    for (std::size_t k = 0; k < x[i].indices.size(); ++k) {
      grad_w[x[i].indices[k]] += coef * x[i].values[k];
    }
  }
}

LinearModel svm_fit(std::span<const SparseVector> x, std::span<const ClassId> y,
                    std::size_t n_classes, std::size_t n_features, const TrainSettings& settings) {
  check_inputs(x, y, n_classes, n_features, settings);

  LinearModel model;
  model.kind = LinearKind::kSvm;
  model.n_classes = n_classes;
  model.n_features = n_features;
  model.c_reg = settings.c_reg;
  model.weights.assign(n_classes * n_features, 0.0);
  model.bias.assign(n_classes, 0.0);
  model.meta.resize(n_classes);

  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<double> signs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) signs[i] = y[i] == c ? 1.0 : -1.0;
    SquaredHingeSolver solver(x, std::move(signs), n_features, settings.c_reg);
    auto& meta = model.meta[c];
    double previous = solver.objective();
    meta.objective_history.push_back(previous);
    for (int iter = 1; iter <= settings.max_iters; ++iter) {
      const bool moved = solver.iterate();
      const double current = solver.objective();
      if (!std::isfinite(current)) {
        throw TrainingError(fmt::format("SVM objective became {} for class {} at iteration {} (C={})",
                                        current, c, iter, settings.c_reg));
      }
      meta.objective_history.push_back(current);
      meta.iterations = iter;
      const bool done = !moved || converged(previous, current, settings.tol);
      previous = current;
      if (done) break;
    }
    meta.objective = previous;
    if (meta.iterations == settings.max_iters) {
      spdlog::debug("SVM class {} stopped at max_iters={}", c, settings.max_iters);
    }
    std::copy(solver.weights().begin(), solver.weights().end(),
              model.weights.begin() + static_cast<std::ptrdiff_t>(c * n_features));
    model.bias[c] = solver.bias();
  }
  return model;
}

double lr_objective(std::span<const double> weights, std::span<const double> bias,
                    std::span<const SparseVector> x, std::span<const ClassId> y,
                    std::size_t n_classes, double c_reg) {
  return lr_evaluate(weights, bias, x, y, n_classes, c_reg, {}, {});
}

void lr_gradient(std::span<const double> weights, std::span<const double> bias,
                 std::span<const SparseVector> x, std::span<const ClassId> y,
                 std::size_t n_classes, double c_reg, std::span<double> grad_w,
                 std::span<double> grad_b) {
  lr_evaluate(weights, bias, x, y, n_classes, c_reg, grad_w, grad_b);
}

LinearModel lr_fit(std::span<const SparseVector> x, std::span<const ClassId> y,
                   std::size_t n_classes, std::size_t n_features, const TrainSettings& settings) {
  check_inputs(x, y, n_classes, n_features, settings);
  const std::size_t n_w = n_classes * n_features;
  const std::size_t n_params = n_w + n_classes;
  // Parameters are [W | b]; history depth shrinks for very large problems.
  const std::size_t memory = std::clamp<std::size_t>((std::size_t{1} << 27) / (16 * n_params), 3, 10);

  std::vector<double> theta(n_params, 0.0);
  std::vector<double> grad(n_params);
  auto eval = [&](std::span<const double> params, std::span<double> g) {
    return lr_evaluate(params.first(n_w), params.subspan(n_w), x, y, n_classes, settings.c_reg,
                       g.first(n_w), g.subspan(n_w));
  };

  LinearModel model;
  model.kind = LinearKind::kLr;
  model.n_classes = n_classes;
  model.n_features = n_features;
  model.c_reg = settings.c_reg;
  model.meta.resize(1);
  auto& meta = model.meta.front();

  double f = eval(theta, grad);
  meta.objective_history.push_back(f);
  std::deque<std::vector<double>> s_hist;
  std::deque<std::vector<double>> y_hist;
  std::deque<double> rho_hist;
  std::vector<double> direction(n_params);
  std::vector<double> trial(n_params);
  std::vector<double> trial_grad(n_params);
  std::vector<double> alpha(memory);

  // First-step scaling: one curvature bound for the weight block,
  // (1/C + mean_k sum_i x_ik^2 / 4) / N, and 1/4 for the unregularized biases.
  std::vector<double> inv_diag(n_params, 4.0);
  {
    double sq = 0.0;
    for (const auto& v : x) sq += v.squared_norm();
    const double n = static_cast<double>(x.size());
    const double mean_sq = n_features == 0 ? 0.0 : sq / static_cast<double>(n_features);
    std::fill(inv_diag.begin(), inv_diag.begin() + static_cast<std::ptrdiff_t>(n_w),
              n / (1.0 / settings.c_reg + 0.25 * mean_sq));
  }
  int quiet = 0;
  for (int iter = 1; iter <= settings.max_iters; ++iter) {
    // Two-loop recursion for direction = -H * grad.
    for (std::size_t k = 0; k < n_params; ++k) direction[k] = -grad[k];
    for (std::size_t m = s_hist.size(); m-- > 0;) {
      alpha[m] = rho_hist[m] * dot(s_hist[m], direction);
      for (std::size_t k = 0; k < n_params; ++k) direction[k] -= alpha[m] * y_hist[m][k];
    }
    if (s_hist.empty()) {
      for (std::size_t k = 0; k < n_params; ++k) direction[k] *= inv_diag[k];
    } else {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t m = 0; m < s_hist.size(); ++m) {
      const double beta = rho_hist[m] * dot(y_hist[m], direction);
      for (std::size_t k = 0; k < n_params; ++k) direction[k] += (alpha[m] - beta) * s_hist[m][k];
    }
    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t k = 0; k < n_params; ++k) direction[k] = -grad[k];
      slope = dot(grad, direction);
    }
    if (slope == 0.0) break;  // zero gradient

    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      for (std::size_t k = 0; k < n_params; ++k) trial[k] = theta[k] + step * direction[k];
      f_new = eval(trial, trial_grad);
      if (!std::isfinite(f_new)) continue;
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!std::isfinite(f_new)) {
        throw TrainingError(fmt::format("LR objective became {} at iteration {} (C={})", f_new,
                                        iter, settings.c_reg));
      }
      break;  // no further decrease representable
    }

    std::vector<double> s(n_params);
    std::vector<double> yv(n_params);
    for (std::size_t k = 0; k < n_params; ++k) {
      s[k] = trial[k] - theta[k];
      yv[k] = trial_grad[k] - grad[k];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-12) {
      if (s_hist.size() == memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }
    theta.swap(trial);
    grad.swap(trial_grad);
    quiet = converged(f, f_new, settings.tol) ? quiet + 1 : 0;
    const bool done = quiet >= 2;
    f = f_new;
    meta.objective_history.push_back(f);
    meta.iterations = iter;
    if (done) break;
  }
  meta.objective = f;
  model.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(n_w));
  model.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(n_w), theta.end());
  return model;
}

Prediction linear_predict(const LinearModel& model, const SparseVector& x) {
  Prediction p;
  p.scores.resize(model.n_classes);
  for (std::size_t c = 0; c < model.n_classes; ++c) {
    p.scores[c] = model.bias[c] + x.dot(model.class_weights(static_cast<ClassId>(c)));
  }
  p.label = argmax(p.scores);
  return p;
}

}  // namespace microtext::models
