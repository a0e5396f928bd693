#include "segkit/optimizer.hpp"

#include "segkit/error.hpp"

#include <cmath>
#include <numbers>

namespace segkit {

AdamW::AdamW(std::size_t parameter_count, AdamWConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamW::step(std::span<double> params, std::span<double const> gradient, double lr) {
    if (params.size() != m_.size() || gradient.size() != m_.size()) {
        throw ArgumentError("optimizer state does not match the parameter count");
    }
    ++steps_;
    double const b1 = config_.beta1, b2 = config_.beta2;
    double const c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    double const c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= lr * config_.weight_decay * params[i];
        m_[i] = b1 * m_[i] + (1.0 - b1) * gradient[i];
        v_[i] = b2 * v_[i] + (1.0 - b2) * gradient[i] * gradient[i];
        double const mhat = m_[i] / c1;
        double const vhat = v_[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
}

double cosine_learning_rate(double base, std::size_t epoch, std::size_t epochs) {
    if (epochs == 0) {
        return base;
    }
    double const t = static_cast<double>(epoch) / static_cast<double>(epochs);
    return base * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

} // namespace segkit
