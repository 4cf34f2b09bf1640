#ifndef MSSD_MODEL_HPP
#define MSSD_MODEL_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mssd/adam.hpp"
#include "mssd/decompose.hpp"
#include "mssd/ops.hpp"
#include "mssd/tensor.hpp"

namespace mssd {

/// Per-variable standardization statistics from the training split.
struct NormStats {
    double mean = 0.0;
    double stddev = 1.0;
    bool fitted = false;
};

/**
 * Learned affine map from all phase-labeled input positions to all
 * phase-labeled horizon positions, used for the ascending and descending
 * components.
 */
struct LinearPhasePredictor {
    Tensor weight; // [horizon_positions x input_positions]
    Tensor bias;   // [horizon_positions]

    static LinearPhasePredictor init(std::size_t input_positions, std::size_t horizon_positions,
                                     std::mt19937_64& rng);

    /// Starts at the seasonal-repeat solution: each horizon slot copies the
    /// same within-phase slot of the most recent period. Rows sum to one,
    /// so the initial map follows level shifts exactly.
    static LinearPhasePredictor seasonal_init(std::size_t input_positions,
                                              std::size_t horizon_positions,
                                              std::size_t per_period);

    Tensor forward(GradTape* tape, const Tensor& phase_values) const;
    std::size_t parameter_count() const { return weight.size() + bias.size(); }
    void collect_parameters(const std::string& prefix, std::vector<Param>& out);
};

struct SDNetConfig {
    int num_heads = 2;
    std::vector<int> kernel_scales{2, 3}; // one per head; local conv kernel = stride = scale
    int tcn_layers = 3;
    int tcn_kernel = 3;
    int channels = 16;
    int grid_rows = 4;
    double dropout = 0.05;
    bool causal_tcn = true;   // off: same-padded standard convolution in the temporal stack
    bool global_block = true; // off: skip the 2-D grid convolution block

    void validate(std::size_t input_len) const;
};

/**
 * Multi-scale convolutional predictor for the peak component.
 *
 * The input is recentered around its mean before the branches and the
 * mean is added back through a learnable gain, so a level shift of the
 * input shifts the output instead of pushing the convolutions off their
 * training range. Each head compresses the sequence with a
 * stride-`scale` convolution, mixes global structure through a 2-D
 * convolution over a grid reshape, runs a stack of dilated causal
 * convolutions, and projects to the horizon; head outputs are
 * concatenated and merged by a linear layer.
 */
class SDNet {
public:
    SDNet() = default;
    SDNet(const SDNetConfig& config, std::size_t input_len, std::size_t output_len,
          std::mt19937_64& rng);

    Tensor forward(GradTape* tape, const Tensor& x, std::mt19937_64* dropout_rng = nullptr) const;

    /// Per-head projections before the merge layer.
    std::vector<Tensor> head_outputs(GradTape* tape, const Tensor& x,
                                     std::mt19937_64* dropout_rng = nullptr) const;

    const SDNetConfig& config() const { return config_; }
    std::size_t input_len() const { return input_len_; }
    std::size_t output_len() const { return output_len_; }
    /// Compressed sequence length of each head's local block.
    std::vector<std::size_t> local_lengths() const;

    void collect_parameters(const std::string& prefix, std::vector<Param>& out);
    std::size_t parameter_count() const;

private:
    struct NormLayer {
        Tensor gain;
        Tensor shift;
    };
    struct TcnBlock {
        Tensor weight;
        Tensor bias;
        NormLayer norm;
        int dilation = 1;
    };
    struct Head {
        int scale = 1;
        std::size_t local_len = 0;
        Tensor embed_weight, embed_bias; // 1 -> C, kernel 1
        Tensor local_weight, local_bias; // C -> C, kernel = stride = scale
        NormLayer local_norm;
        Tensor grid_weight, grid_bias;   // C -> C, 3x3, same padding
        std::vector<TcnBlock> tcn;
        Tensor proj_weight, proj_bias;   // [output_len x C*local_len]
    };

    Tensor head_forward(GradTape* tape, const Head& head, const Tensor& x,
                        std::mt19937_64* dropout_rng) const;

    SDNetConfig config_;
    std::size_t input_len_ = 0;
    std::size_t output_len_ = 0;
    std::vector<Head> heads_;
    Tensor merge_weight, merge_bias;
    Tensor anchor_gain; // scalar, init 1
};

struct MssdConfig {
    int samples_per_hour = 1;
    std::size_t input_len = 96;
    std::size_t horizon = 24;
    SDNetConfig sdnet;
    std::uint64_t seed = 42;
};

/**
 * The composite model: a period spec, two linear phase predictors, one
 * SDNet and the normalization statistics of the variable it was trained
 * on. Input and horizon lengths must be multiples of the period so every
 * window carries the same number of positions per phase regardless of
 * where it starts in the day.
 */
class MssdModel {
public:
    MssdModel() = default;
    explicit MssdModel(const MssdConfig& config);

    /// Forecast of length horizon from a normalized window of length
    /// input_len; start_offset is the in-day position of the window start.
    Tensor forward(GradTape* tape, const Tensor& window, int start_offset,
                   std::mt19937_64* dropout_rng = nullptr) const;

    std::vector<double> forward_values(std::span<const double> normalized_window,
                                       int start_offset) const;

    std::vector<Param> parameters();
    std::size_t parameter_count() const;

    std::vector<Tensor> snapshot_parameters() const;
    void restore_parameters(const std::vector<Tensor>& snapshot);
    void detach_parameters();
    void zero_parameters(); // test/diagnostic helper

    const MssdConfig& config() const { return config_; }
    const PeriodSpec& period() const { return period_; }
    std::size_t inputs_per_phase() const { return inputs_per_phase_; }
    std::size_t outputs_per_phase() const { return outputs_per_phase_; }

    NormStats norm;
    LinearPhasePredictor ascending;
    LinearPhasePredictor descending;
    SDNet peak;

private:
    MssdConfig config_;
    PeriodSpec period_;
    std::size_t inputs_per_phase_ = 0;
    std::size_t outputs_per_phase_ = 0;
};

} // namespace mssd

#endif // MSSD_MODEL_HPP
