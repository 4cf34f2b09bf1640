#include "mssd/model.hpp"

#include <cmath>

namespace mssd {

namespace {

Tensor init_weight(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
    return Tensor::randn(std::move(shape), rng, std::sqrt(1.0 / static_cast<double>(fan_in)));
}

} // namespace

LinearPhasePredictor LinearPhasePredictor::init(std::size_t input_positions,
                                                std::size_t horizon_positions,
                                                std::mt19937_64& rng) {
    if (input_positions < 1 || horizon_positions < 1)
        throw ContractError("linear phase predictor needs at least one input and output position");
    LinearPhasePredictor p;
    p.weight = init_weight({horizon_positions, input_positions}, input_positions, rng);
    p.bias = Tensor::zeros({horizon_positions});
    return p;
}

Tensor LinearPhasePredictor::forward(GradTape* tape, const Tensor& phase_values) const {
    return ops::linear(tape, phase_values, weight, bias);
}

LinearPhasePredictor LinearPhasePredictor::seasonal_init(std::size_t input_positions,
                                                         std::size_t horizon_positions,
                                                         std::size_t per_period) {
    if (per_period < 1 || per_period > input_positions)
        throw ContractError("seasonal_init: positions per period out of range");
    LinearPhasePredictor p;
    std::vector<double> w(horizon_positions * input_positions, 0.0);
    for (std::size_t j = 0; j < horizon_positions; ++j)
        w[j * input_positions + (input_positions - per_period + j % per_period)] = 1.0;
    p.weight = Tensor::from({horizon_positions, input_positions}, std::move(w));
    p.bias = Tensor::zeros({horizon_positions});
    return p;
}

void LinearPhasePredictor::collect_parameters(const std::string& prefix,
                                              std::vector<Param>& out) {
    out.push_back({prefix + ".weight", &weight});
    out.push_back({prefix + ".bias", &bias});
}

void SDNetConfig::validate(std::size_t input_len) const {
    if (num_heads < 1) throw ConfigError("sdnet: num_heads must be >= 1");
    if (static_cast<int>(kernel_scales.size()) != num_heads)
        throw ConfigError("sdnet: expected " + std::to_string(num_heads) +
                          " kernel scales, got " + std::to_string(kernel_scales.size()));
    for (int s : kernel_scales) {
        if (s < 1) throw ConfigError("sdnet: kernel scales must be >= 1");
        if (static_cast<std::size_t>(s) > input_len)
            throw ConfigError("sdnet: kernel scale " + std::to_string(s) +
                              " exceeds input length " + std::to_string(input_len));
    }
    if (tcn_layers < 1) throw ConfigError("sdnet: tcn_layers must be >= 1");
    if (tcn_kernel < 1) throw ConfigError("sdnet: tcn_kernel must be >= 1");
    if (channels < 1) throw ConfigError("sdnet: channels must be >= 1");
    if (grid_rows < 1) throw ConfigError("sdnet: grid_rows must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("sdnet: dropout must be in [0, 1)");
}

SDNet::SDNet(const SDNetConfig& config, std::size_t input_len, std::size_t output_len,
             std::mt19937_64& rng)
    : config_(config), input_len_(input_len), output_len_(output_len) {
    config.validate(input_len);
    if (output_len < 1) throw ConfigError("sdnet: output length must be >= 1");

    const auto c = static_cast<std::size_t>(config.channels);
    const auto k = static_cast<std::size_t>(config.tcn_kernel);
    heads_.reserve(config.kernel_scales.size());
    for (int scale : config.kernel_scales) {
        Head head;
        head.scale = scale;
        head.local_len = (input_len - 1) / static_cast<std::size_t>(scale) + 1;
        head.embed_weight = init_weight({c, 1, 1}, 1, rng);
        head.embed_bias = Tensor::zeros({c});
        const auto ks = static_cast<std::size_t>(scale);
        head.local_weight = init_weight({c, c, ks}, c * ks, rng);
        head.local_bias = Tensor::zeros({c});
        head.local_norm = {Tensor::full({c}, 1.0), Tensor::zeros({c})};
        head.grid_weight = init_weight({c, c, 3, 3}, c * 9, rng);
        head.grid_bias = Tensor::zeros({c});
        head.tcn.resize(static_cast<std::size_t>(config.tcn_layers));
        int dilation = 1;
        for (auto& block : head.tcn) {
            block.weight = init_weight({c, c, k}, c * k, rng);
            block.bias = Tensor::zeros({c});
            block.norm = {Tensor::full({c}, 1.0), Tensor::zeros({c})};
            block.dilation = dilation;
            dilation *= 2;
        }
        const std::size_t flat = c * head.local_len;
        head.proj_weight = init_weight({output_len, flat}, flat, rng);
        head.proj_bias = Tensor::zeros({output_len});
        heads_.push_back(std::move(head));
    }
    const std::size_t merged = heads_.size() * output_len;
    merge_weight = init_weight({output_len, merged}, merged, rng);
    merge_bias = Tensor::zeros({output_len});
    anchor_gain = Tensor::full({1}, 1.0);
}

Tensor SDNet::head_forward(GradTape* tape, const Head& head, const Tensor& x,
                           std::mt19937_64* dropout_rng) const {
    // Embed the raw sequence into channels.
    Tensor h = ops::reshape(tape, x, {1, x.size()});
    h = ops::conv1d(tape, h, head.embed_weight, head.embed_bias, 1, 1, true);

    // Local compression: kernel = stride = scale.
    h = ops::conv1d(tape, h, head.local_weight, head.local_bias, head.scale, 1, true);
    h = ops::layer_norm(tape, h, head.local_norm.gain, head.local_norm.shift);
    h = ops::relu(tape, h);

    if (config_.global_block) {
        // Grid reshape, same-padded 2-D convolution, residual.
        const std::size_t rows = static_cast<std::size_t>(config_.grid_rows);
        const std::size_t len = h.dim(1);
        const std::size_t cols = (len + rows - 1) / rows;
        const std::size_t padded = rows * cols;
        Tensor g = h;
        if (padded != len) g = ops::pad1d(tape, g, 0, padded - len);
        g = ops::reshape(tape, g, {h.dim(0), rows, cols});
        g = ops::conv2d(tape, g, head.grid_weight, head.grid_bias, ops::Pad2d::Same);
        g = ops::relu(tape, g);
        g = ops::reshape(tape, g, {h.dim(0), padded});
        if (padded != len) g = ops::slice_last(tape, g, 0, len);
        h = ops::add(tape, h, g);
    }

    for (const auto& block : head.tcn) {
        Tensor t;
        if (config_.causal_tcn) {
            t = ops::conv1d(tape, h, block.weight, block.bias, 1, block.dilation, true);
        } else {
            const std::size_t span = static_cast<std::size_t>(config_.tcn_kernel) - 1;
            Tensor padded = ops::pad1d(tape, h, span / 2, span - span / 2);
            t = ops::conv1d(tape, padded, block.weight, block.bias, 1, 1, false);
        }
        t = ops::layer_norm(tape, t, block.norm.gain, block.norm.shift);
        t = ops::relu(tape, t);
        if (dropout_rng && config_.dropout > 0.0)
            t = ops::dropout(tape, t, config_.dropout, *dropout_rng);
        h = ops::add(tape, h, t);
    }

    Tensor flat = ops::reshape(tape, h, {h.size()});
    return ops::linear(tape, flat, head.proj_weight, head.proj_bias);
}

std::vector<Tensor> SDNet::head_outputs(GradTape* tape, const Tensor& x,
                                        std::mt19937_64* dropout_rng) const {
    if (x.ndim() != 1 || x.dim(0) != input_len_)
        throw ShapeError("sdnet: expected input of length " + std::to_string(input_len_) +
                         ", got " + shape_str(x.shape()));
    Tensor anchor = ops::mean_all(tape, x);
    Tensor centered = ops::add_scalar(tape, x, anchor, -1.0);
    std::vector<Tensor> outputs;
    outputs.reserve(heads_.size());
    for (const auto& head : heads_)
        outputs.push_back(head_forward(tape, head, centered, dropout_rng));
    return outputs;
}

Tensor SDNet::forward(GradTape* tape, const Tensor& x, std::mt19937_64* dropout_rng) const {
    std::vector<Tensor> outputs = head_outputs(tape, x, dropout_rng);
    Tensor merged = outputs.size() == 1 ? outputs[0] : ops::concat(tape, outputs, 0);
    Tensor projected = ops::linear(tape, merged, merge_weight, merge_bias);
    Tensor anchor = ops::mean_all(tape, x);
    Tensor gained = ops::mul(tape, anchor, anchor_gain);
    return ops::add_scalar(tape, projected, gained, 1.0);
}

std::vector<std::size_t> SDNet::local_lengths() const {
    std::vector<std::size_t> lengths;
    lengths.reserve(heads_.size());
    for (const auto& head : heads_) lengths.push_back(head.local_len);
    return lengths;
}

void SDNet::collect_parameters(const std::string& prefix, std::vector<Param>& out) {
    for (std::size_t i = 0; i < heads_.size(); ++i) {
        auto& head = heads_[i];
        const std::string hp = prefix + ".head" + std::to_string(i);
        out.push_back({hp + ".embed.weight", &head.embed_weight});
        out.push_back({hp + ".embed.bias", &head.embed_bias});
        out.push_back({hp + ".local.weight", &head.local_weight});
        out.push_back({hp + ".local.bias", &head.local_bias});
        out.push_back({hp + ".local_norm.gain", &head.local_norm.gain});
        out.push_back({hp + ".local_norm.shift", &head.local_norm.shift});
        if (config_.global_block) {
            out.push_back({hp + ".grid.weight", &head.grid_weight});
            out.push_back({hp + ".grid.bias", &head.grid_bias});
        }
        for (std::size_t l = 0; l < head.tcn.size(); ++l) {
            const std::string bp = hp + ".tcn" + std::to_string(l);
            out.push_back({bp + ".weight", &head.tcn[l].weight});
            out.push_back({bp + ".bias", &head.tcn[l].bias});
            out.push_back({bp + ".norm.gain", &head.tcn[l].norm.gain});
            out.push_back({bp + ".norm.shift", &head.tcn[l].norm.shift});
        }
        out.push_back({hp + ".proj.weight", &head.proj_weight});
        out.push_back({hp + ".proj.bias", &head.proj_bias});
    }
    out.push_back({prefix + ".merge.weight", &merge_weight});
    out.push_back({prefix + ".merge.bias", &merge_bias});
    out.push_back({prefix + ".anchor_gain", &anchor_gain});
}

std::size_t SDNet::parameter_count() const {
    std::size_t total = 0;
    auto& self = const_cast<SDNet&>(*this);
    std::vector<Param> params;
    self.collect_parameters("sdnet", params);
    for (const auto& p : params) total += p.value->size();
    return total;
}

MssdModel::MssdModel(const MssdConfig& config) : config_(config) {
    period_ = make_period_spec(config.samples_per_hour);
    const auto period = static_cast<std::size_t>(period_.period);
    if (config.input_len < 1 || config.horizon < 1)
        throw ConfigError("input length and horizon must be positive");
    if (config.input_len % period != 0)
        throw ConfigError("input length " + std::to_string(config.input_len) +
                          " must be a multiple of the period " + std::to_string(period) +
                          " so every phase is covered by the same number of positions");
    if (config.horizon % period != 0)
        throw ConfigError("horizon " + std::to_string(config.horizon) +
                          " must be a multiple of the period " + std::to_string(period));
    inputs_per_phase_ = config.input_len / 3;
    outputs_per_phase_ = config.horizon / 3;
    config_.sdnet.validate(inputs_per_phase_);

    std::mt19937_64 rng(config.seed);
    const auto per_period = static_cast<std::size_t>(period_.phase_len);
    ascending = LinearPhasePredictor::seasonal_init(inputs_per_phase_, outputs_per_phase_,
                                                    per_period);
    descending = LinearPhasePredictor::seasonal_init(inputs_per_phase_, outputs_per_phase_,
                                                     per_period);
    peak = SDNet(config_.sdnet, inputs_per_phase_, outputs_per_phase_, rng);
}

Tensor MssdModel::forward(GradTape* tape, const Tensor& window, int start_offset,
                          std::mt19937_64* dropout_rng) const {
    if (window.ndim() != 1 || window.dim(0) != config_.input_len)
        throw ShapeError("mssd: expected window of length " + std::to_string(config_.input_len) +
                         ", got " + shape_str(window.shape()));
    const int horizon_offset =
        start_offset + static_cast<int>(config_.input_len % static_cast<std::size_t>(period_.period));

    auto in_u = phase_positions(period_, config_.input_len, start_offset, PhaseKind::Ascending);
    auto in_p = phase_positions(period_, config_.input_len, start_offset, PhaseKind::Peak);
    auto in_d = phase_positions(period_, config_.input_len, start_offset, PhaseKind::Descending);
    auto out_u = phase_positions(period_, config_.horizon, horizon_offset, PhaseKind::Ascending);
    auto out_p = phase_positions(period_, config_.horizon, horizon_offset, PhaseKind::Peak);
    auto out_d = phase_positions(period_, config_.horizon, horizon_offset, PhaseKind::Descending);

    Tensor y_u = ascending.forward(tape, ops::gather(tape, window, std::move(in_u)));
    Tensor y_p = peak.forward(tape, ops::gather(tape, window, std::move(in_p)), dropout_rng);
    Tensor y_d = descending.forward(tape, ops::gather(tape, window, std::move(in_d)));

    Tensor forecast = ops::scatter_to(tape, y_u, std::move(out_u), config_.horizon);
    forecast = ops::add(tape, forecast,
                        ops::scatter_to(tape, y_p, std::move(out_p), config_.horizon));
    forecast = ops::add(tape, forecast,
                        ops::scatter_to(tape, y_d, std::move(out_d), config_.horizon));
    return forecast;
}

std::vector<double> MssdModel::forward_values(std::span<const double> normalized_window,
                                              int start_offset) const {
    Tensor window = Tensor::from({normalized_window.size()},
                                 std::vector<double>(normalized_window.begin(),
                                                     normalized_window.end()));
    return forward(nullptr, window, start_offset).to_vector();
}

std::vector<Param> MssdModel::parameters() {
    std::vector<Param> out;
    ascending.collect_parameters("ascending", out);
    descending.collect_parameters("descending", out);
    peak.collect_parameters("peak", out);
    return out;
}

std::size_t MssdModel::parameter_count() const {
    auto params = const_cast<MssdModel&>(*this).parameters();
    std::size_t total = 0;
    for (const auto& p : params) total += p.value->size();
    return total;
}

std::vector<Tensor> MssdModel::snapshot_parameters() const {
    auto params = const_cast<MssdModel&>(*this).parameters();
    std::vector<Tensor> snapshot;
    snapshot.reserve(params.size());
    for (const auto& p : params) snapshot.push_back(p.value->detached());
    return snapshot;
}

void MssdModel::restore_parameters(const std::vector<Tensor>& snapshot) {
    auto params = parameters();
    if (snapshot.size() != params.size())
        throw ContractError("parameter snapshot does not match model structure");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (snapshot[i].shape() != params[i].value->shape())
            throw ContractError("parameter snapshot shape mismatch at " + params[i].name);
        *params[i].value = snapshot[i].detached();
    }
}

void MssdModel::detach_parameters() {
    for (auto& p : parameters()) *p.value = p.value->detached();
}

void MssdModel::zero_parameters() {
    for (auto& p : parameters()) *p.value = Tensor::zeros(p.value->shape());
}

} // namespace mssd
