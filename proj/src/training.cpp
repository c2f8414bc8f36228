#include "credsel/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "credsel/random.hpp"

namespace credsel {
namespace {

void check_shapes(const Model& model, const Matrix& x, std::span<const int> y) {
  if (x.cols() != input_dim(model)) {
    throw std::invalid_argument("data has " + std::to_string(x.cols()) +
                                " features, model expects " + std::to_string(input_dim(model)));
  }
  if (x.rows() != y.size()) throw std::invalid_argument("label count does not match rows");
  if (x.rows() == 0) throw std::invalid_argument("empty training data");
}

double sample_loss(double f, int y) {
  const double q = clamp_probability(f);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

// Loss and (optionally) parameter gradient in one pass. The gradient of the
// loss with respect to the output logit is (f - y).
double loss_and_gradient(const Model& model, const Matrix& x, std::span<const int> y,
                         std::vector<double>* grad) {
  const std::size_t n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad) grad->assign(parameter_count(model), 0.0);
  double loss = 0.0;

  if (const auto* lr = std::get_if<LogisticModel>(&model)) {
    const std::size_t p = lr->input_dim();
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.row(i);
      const double f = sigmoid(lr->bias + dot(lr->coefficients, xi));
      loss += sample_loss(f, y[i]);
      if (grad) {
        const double r = f - y[i];
        for (std::size_t j = 0; j < p; ++j) (*grad)[j] += r * xi[j];
        (*grad)[p] += r;
      }
    }
  } else {
    const auto& m = std::get<MlpModel>(model);
    const std::size_t p = m.input_dim();
    const std::size_t h = m.hidden_units();
    const std::size_t off_hb = h * p;
    const std::size_t off_ow = off_hb + h;
    const std::size_t off_ob = off_ow + h;
    std::vector<double> a(h);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.row(i);
      double t = m.output_bias;
      for (std::size_t k = 0; k < h; ++k) {
        a[k] = sigmoid(m.hidden_biases[k] + dot(m.hidden_weights.row(k), xi));
        t += m.output_weights[k] * a[k];
      }
      const double f = sigmoid(t);
      loss += sample_loss(f, y[i]);
      if (grad) {
        auto& g = *grad;
        const double r = f - y[i];
        g[off_ob] += r;
        for (std::size_t k = 0; k < h; ++k) {
          g[off_ow + k] += r * a[k];
          const double delta = r * m.output_weights[k] * a[k] * (1.0 - a[k]);
          g[off_hb + k] += delta;
          double* wk = g.data() + k * p;
          for (std::size_t j = 0; j < p; ++j) wk[j] += delta * xi[j];
        }
      }
    }
  }
  if (grad) {
    for (double& v : *grad) v *= inv_n;
  }
  return loss * inv_n;
}

Model constant_model(ModelKind kind, std::size_t inputs, double rate) {
  const double q = std::clamp(rate, 1e-6, 1.0 - 1e-6);
  const double bias = std::log(q / (1.0 - q));
  if (kind == ModelKind::logistic) {
    return LogisticModel{std::vector<double>(inputs, 0.0), bias};
  }
  MlpModel m(inputs, hidden_units(kind));
  m.output_bias = bias;
  return m;
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::logistic: return "logistic";
    case ModelKind::mlp2: return "mlp2";
    case ModelKind::mlp5: return "mlp5";
  }
  return "logistic";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "logistic" || s == "lr") return ModelKind::logistic;
  if (s == "mlp2" || s == "nn") return ModelKind::mlp2;
  if (s == "mlp5" || s == "diffnet") return ModelKind::mlp5;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

std::size_t hidden_units(ModelKind k) {
  switch (k) {
    case ModelKind::logistic: return 0;
    case ModelKind::mlp2: return 2;
    case ModelKind::mlp5: return 5;
  }
  return 0;
}

void TrainConfig::validate() const {
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("gradient_tolerance must be > 0");
  if (!(init_scale > 0.0)) throw std::invalid_argument("init_scale must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("backtrack_factor must lie in (0,1)");
  }
}

std::string TrainTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,loss,gradient_norm\n";
  os << 0 << ',' << initial_loss << ',' << initial_gradient_norm << '\n';
  for (std::size_t e = 0; e < losses.size(); ++e) {
    os << (e + 1) << ',' << losses[e] << ',' << gradient_norms[e] << '\n';
  }
  return os.str();
}

double cross_entropy_loss(const Model& model, const Matrix& x, std::span<const int> y) {
  check_shapes(model, x, y);
  return loss_and_gradient(model, x, y, nullptr);
}

double cross_entropy_loss(const Model& model, const Dataset& data) {
  return cross_entropy_loss(model, data.features(), data.labels());
}

std::vector<double> parameter_gradient(const Model& model, const Matrix& x,
                                       std::span<const int> y) {
  check_shapes(model, x, y);
  std::vector<double> g;
  loss_and_gradient(model, x, y, &g);
  return g;
}

std::vector<double> parameter_gradient(const Model& model, const Dataset& data) {
  return parameter_gradient(model, data.features(), data.labels());
}

Model initial_model(ModelKind kind, std::size_t inputs, const TrainConfig& config) {
  Rng rng(config.seed);
  const double s = config.init_scale;
  if (kind == ModelKind::logistic) {
    LogisticModel m{std::vector<double>(inputs), 0.0};
    for (double& w : m.coefficients) w = uniform(rng, -s, s);
    return m;
  }
  MlpModel m(inputs, hidden_units(kind));
  for (double& w : m.hidden_weights.data()) w = uniform(rng, -s, s);
  for (double& w : m.output_weights) w = uniform(rng, -s, s);
  return m;
}

TrainResult train(ModelKind kind, const Matrix& x, std::span<const int> y,
                  const TrainConfig& config) {
  config.validate();
  if (x.rows() == 0 || x.rows() != y.size()) {
    throw std::invalid_argument("training data is empty or labels do not match rows");
  }
  std::size_t positives = 0;
  for (int v : y) positives += (v == 1);
  if (positives == 0 || positives == y.size()) {
    TrainResult r{constant_model(kind, x.cols(),
                                 static_cast<double>(positives) / static_cast<double>(y.size())),
                  {}};
    r.trace.degenerate = true;
    r.trace.initial_loss = cross_entropy_loss(r.model, x, y);
    r.trace.final_gradient_norm = norm2(parameter_gradient(r.model, x, y));
    r.trace.initial_gradient_norm = r.trace.final_gradient_norm;
    return r;
  }

  Model model = initial_model(kind, x.cols(), config);
  std::vector<double> theta = flatten_parameters(model);
  const std::size_t dim = theta.size();

  Model probe = model;
  auto eval = [&](std::span<const double> params, std::vector<double>* grad) {
    assign_parameters(probe, params);
    return loss_and_gradient(probe, x, y, grad);
  };

  TrainTrace trace;
  std::vector<double> grad;
  double loss = eval(theta, &grad);
  trace.initial_loss = loss;
  trace.initial_gradient_norm = norm2(grad);

  std::vector<double> dir(dim), prev_grad, prev_dir, trial(dim), trial_grad;
  double prev_step = 0.0;
  double prev_slope = 0.0;
  bool restart = true;

  auto at = [&](double alpha) {
    for (std::size_t i = 0; i < dim; ++i) trial[i] = theta[i] + alpha * dir[i];
    return eval(trial, nullptr);
  };

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double gnorm = norm2(grad);
    if (gnorm < config.gradient_tolerance) {
      trace.converged = true;
      break;
    }

    bool steepest = restart;
    if (!restart) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        num += grad[i] * (grad[i] - prev_grad[i]);
        den += prev_grad[i] * prev_grad[i];
      }
      const double beta = std::max(0.0, num / den);
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i] + beta * prev_dir[i];
      steepest = (beta == 0.0);
      if (dot(grad, dir) >= 0.0) steepest = true;
    }
    if (steepest) {
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
    }

    bool accepted = false;
    double alpha = 0.0;
    double new_loss = loss;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const double slope = dot(grad, dir);
      if (!(slope < 0.0)) break;
      double alpha0 = 1.0 / std::max(1.0, norm2(dir));
      if (prev_step > 0.0 && prev_slope < 0.0) {
        alpha0 = prev_step * prev_slope / slope;
      }
      alpha = alpha0;
      for (int k = 0; k < 60; ++k) {
        const double l = at(alpha);
        if (std::isfinite(l) && l <= loss + config.armijo_c * alpha * slope) {
          accepted = true;
          new_loss = l;
          break;
        }
        alpha *= config.backtrack_factor;
      }
      if (accepted && alpha == alpha0) {
        // The first trial was accepted: extend while the loss keeps falling.
        for (int k = 0; k < 20; ++k) {
          const double bigger = alpha / config.backtrack_factor;
          const double l = at(bigger);
          if (!(std::isfinite(l) && l < new_loss &&
                l <= loss + config.armijo_c * bigger * slope)) {
            break;
          }
          alpha = bigger;
          new_loss = l;
        }
      }
      if (!accepted) {
        trace.line_search_failures.push_back(epoch);
        if (steepest) break;
        steepest = true;
        for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
        prev_step = 0.0;
      } else {
        prev_slope = slope;
      }
    }
    if (!accepted) break;

    for (std::size_t i = 0; i < dim; ++i) theta[i] += alpha * dir[i];
    prev_grad = grad;
    prev_dir = dir;
    prev_step = alpha;
    loss = eval(theta, &grad);
    restart = false;

    trace.losses.push_back(loss);
    trace.gradient_norms.push_back(norm2(grad));
    trace.epochs_run = epoch;
  }
  trace.final_gradient_norm = norm2(grad);
  if (trace.final_gradient_norm < config.gradient_tolerance) trace.converged = true;
  assign_parameters(model, theta);
  return {std::move(model), std::move(trace)};
}

TrainResult train(ModelKind kind, const Dataset& data, const TrainConfig& config) {
  return train(kind, data.features(), data.labels(), config);
}

}  // namespace credsel
