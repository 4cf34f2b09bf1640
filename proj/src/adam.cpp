#include "mssd/adam.hpp"

#include <cmath>

namespace mssd {

void Adam::step(std::vector<Param>& params, const Gradients& grads) {
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(params[i].value->size(), 0.0);
            v_[i].assign(params[i].value->size(), 0.0);
        }
    }
    if (m_.size() != params.size())
        throw ContractError("adam: parameter count changed between steps");

    ++step_count_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));

    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& value = *params[i].value;
        const std::size_t n = value.size();
        if (m_[i].size() != n)
            throw ContractError("adam: state shape mismatch for parameter " + params[i].name);

        auto grad = grads.find(value);
        if (!grad.empty() && grad.size() != n)
            throw ContractError("adam: gradient shape mismatch for parameter " + params[i].name);

        std::vector<double> updated = value.to_vector();
        const double* gp = grad.empty() ? nullptr : grad.data();
        for (std::size_t j = 0; j < n; ++j) {
            const double g = gp ? gp[j] : 0.0;
            m_[i][j] = config_.beta1 * m_[i][j] + (1.0 - config_.beta1) * g;
            v_[i][j] = config_.beta2 * v_[i][j] + (1.0 - config_.beta2) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            updated[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
        value = Tensor::from(value.shape(), std::move(updated));
    }
}

void Adam::reset() {
    step_count_ = 0;
    m_.clear();
    v_.clear();
}

} // namespace mssd
