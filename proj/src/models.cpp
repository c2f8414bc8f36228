#include "credsel/models.hpp"

#include <cmath>

namespace credsel {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_input(const Model& model, std::span<const double> x) {
  if (x.size() != input_dim(model)) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(input_dim(model)));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite model input");
  }
}

double hidden_activation(const MlpModel& m, std::size_t k, std::span<const double> x) {
  return sigmoid(m.hidden_biases[k] + dot(m.hidden_weights.row(k), x));
}

}  // namespace

int predict(double probability, Threshold tau) { return probability >= tau.value() ? 1 : 0; }

std::size_t input_dim(const Model& model) {
  return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

std::size_t parameter_count(const Model& model) {
  return std::visit([](const auto& m) { return m.parameter_count(); }, model);
}

double forward(const Model& model, std::span<const double> x) {
  check_input(model, x);
  return std::visit(
      Overloaded{
          [&](const LogisticModel& m) { return sigmoid(m.bias + dot(m.coefficients, x)); },
          [&](const MlpModel& m) {
            double t = m.output_bias;
            for (std::size_t k = 0; k < m.hidden_units(); ++k) {
              t += m.output_weights[k] * hidden_activation(m, k, x);
            }
            return sigmoid(t);
          },
      },
      model);
}

std::vector<double> input_gradient(const Model& model, std::span<const double> x) {
  check_input(model, x);
  return std::visit(
      Overloaded{
          [&](const LogisticModel& m) {
            const double f = sigmoid(m.bias + dot(m.coefficients, x));
            std::vector<double> g(m.coefficients);
            for (double& v : g) v *= f * (1.0 - f);
            return g;
          },
          [&](const MlpModel& m) {
            const std::size_t h = m.hidden_units();
            std::vector<double> a(h);
            double t = m.output_bias;
            for (std::size_t k = 0; k < h; ++k) {
              a[k] = hidden_activation(m, k, x);
              t += m.output_weights[k] * a[k];
            }
            const double f = sigmoid(t);
            const double df_dt = f * (1.0 - f);
            std::vector<double> g(m.input_dim(), 0.0);
            for (std::size_t k = 0; k < h; ++k) {
              const double coef = df_dt * m.output_weights[k] * a[k] * (1.0 - a[k]);
              const auto w = m.hidden_weights.row(k);
              for (std::size_t j = 0; j < g.size(); ++j) g[j] += coef * w[j];
            }
            return g;
          },
      },
      model);
}

std::vector<double> flatten_parameters(const Model& model) {
  return std::visit(
      Overloaded{
          [](const LogisticModel& m) {
            std::vector<double> p(m.coefficients);
            p.push_back(m.bias);
            return p;
          },
          [](const MlpModel& m) {
            std::vector<double> p(m.hidden_weights.data());
            p.insert(p.end(), m.hidden_biases.begin(), m.hidden_biases.end());
            p.insert(p.end(), m.output_weights.begin(), m.output_weights.end());
            p.push_back(m.output_bias);
            return p;
          },
      },
      model);
}

void assign_parameters(Model& model, std::span<const double> params) {
  if (params.size() != parameter_count(model)) {
    throw std::invalid_argument("parameter vector has wrong length");
  }
  std::visit(Overloaded{
                 [&](LogisticModel& m) {
                   std::copy(params.begin(), params.end() - 1, m.coefficients.begin());
                   m.bias = params.back();
                 },
                 [&](MlpModel& m) {
                   auto it = params.begin();
                   auto& w = m.hidden_weights.data();
                   std::copy(it, it + static_cast<std::ptrdiff_t>(w.size()), w.begin());
                   it += static_cast<std::ptrdiff_t>(w.size());
                   const auto h = static_cast<std::ptrdiff_t>(m.hidden_units());
                   std::copy(it, it + h, m.hidden_biases.begin());
                   it += h;
                   std::copy(it, it + h, m.output_weights.begin());
                   it += h;
                   m.output_bias = *it;
                 },
             },
             model);
}

std::string model_kind_name(const Model& model) {
  return std::holds_alternative<LogisticModel>(model) ? "logistic" : "mlp";
}

}  // namespace credsel
