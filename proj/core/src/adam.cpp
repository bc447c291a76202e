#include <cmath>

#include "nameproxy/bilstm.hpp"
#include "nameproxy/error.hpp"

namespace nameproxy::nn {

AdamState AdamState::for_params(const NetworkParams& params, const AdamConfig& config) {
  return AdamState{config, NetworkParams::zeros(params.shape), NetworkParams::zeros(params.shape), 0};
}

void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> first_moment,
                 std::span<double> second_moment, std::int64_t step, const AdamConfig& config) {
  if (grad.size() != theta.size() || first_moment.size() != theta.size() || second_moment.size() != theta.size()) {
    fail(ErrorCode::shape_mismatch, "Adam buffers differ in length");
  }
  if (step < 1) fail(ErrorCode::invalid_argument, "Adam step index starts at 1");
  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double g = grad[i];
    if (!config.decoupled_decay) g += config.weight_decay * theta[i];
    first_moment[i] = config.beta1 * first_moment[i] + (1.0 - config.beta1) * g;
    second_moment[i] = config.beta2 * second_moment[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = first_moment[i] / correction1;
    const double v_hat = second_moment[i] / correction2;
    if (config.decoupled_decay) theta[i] -= config.learning_rate * config.weight_decay * theta[i];
    theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

void adam_step(NetworkParams& params, const NetworkParams& gradients, AdamState& state) {
  if (!(params.shape == gradients.shape) || !(params.shape == state.first_moment.shape) ||
      !(params.shape == state.second_moment.shape)) {
    fail(ErrorCode::shape_mismatch, "parameters, gradients and optimizer state differ in shape");
  }
  gradients.validate_shapes();
  ++state.step;
  std::vector<std::span<const double>> grads;
  std::vector<std::span<double>> m;
  std::vector<std::span<double>> v;
  for_each_tensor(gradients, [&](const std::string&, std::span<const double> t) { grads.push_back(t); });
  for_each_tensor(state.first_moment, [&](const std::string&, std::span<double> t) { m.push_back(t); });
  for_each_tensor(state.second_moment, [&](const std::string&, std::span<double> t) { v.push_back(t); });
  std::size_t k = 0;
  for_each_tensor(params, [&](const std::string&, std::span<double> theta) {
    adam_update(theta, grads[k], m[k], v[k], state.step, state.config);
    ++k;
  });
}

}  // namespace nameproxy::nn
