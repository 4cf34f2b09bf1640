#ifndef MSSD_ADAM_HPP
#define MSSD_ADAM_HPP

#include <string>
#include <vector>

#include "mssd/tensor.hpp"

namespace mssd {

/// Named slot of a trainable tensor inside a model.
struct Param {
    std::string name;
    Tensor* value = nullptr;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/**
 * Adam with bias correction. Moment buffers are zero-initialized on the
 * first step and keyed by parameter position, so the same parameter list
 * (in the same order) must be passed to every step.
 */
class Adam {
public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    void step(std::vector<Param>& params, const Gradients& grads);
    void reset();

    const AdamConfig& config() const { return config_; }
    long long steps_taken() const { return step_count_; }

private:
    AdamConfig config_;
    long long step_count_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

} // namespace mssd

#endif // MSSD_ADAM_HPP
