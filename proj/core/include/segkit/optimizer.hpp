#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace segkit {

struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
};

/// Adam with decoupled weight decay: params shrink by lr * weight_decay
/// before the bias-corrected moment step.
class AdamW {
  public:
    AdamW(std::size_t parameter_count, AdamWConfig config = {});

    void step(std::span<double> params, std::span<double const> gradient, double learning_rate);
    std::size_t steps() const { return steps_; }

  private:
    AdamWConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t steps_ = 0;
};

/// base * (1 + cos(pi * epoch / epochs)) / 2: equals base at epoch 0 and decays toward 0.
double cosine_learning_rate(double base, std::size_t epoch, std::size_t epochs);

} // namespace segkit
