#ifndef MSSD_OPS_HPP
#define MSSD_OPS_HPP

#include <random>
#include <vector>

#include "mssd/tensor.hpp"

namespace mssd::ops {

enum class Pad2d { Same, Valid };

// Every op records its backward rule on `tape` when one is given; with
// tape == nullptr the result is a plain value.

Tensor add(GradTape* tape, const Tensor& a, const Tensor& b);
Tensor sub(GradTape* tape, const Tensor& a, const Tensor& b);
Tensor mul(GradTape* tape, const Tensor& a, const Tensor& b);
Tensor scale(GradTape* tape, const Tensor& a, double factor);
Tensor relu(GradTape* tape, const Tensor& a);
Tensor reshape(GradTape* tape, const Tensor& a, Shape new_shape);
Tensor concat(GradTape* tape, const std::vector<Tensor>& parts, std::size_t axis);

/// Prefix/interior slice along the last axis.
Tensor slice_last(GradTape* tape, const Tensor& a, std::size_t start, std::size_t length);
/// Zero padding along the last axis.
Tensor pad1d(GradTape* tape, const Tensor& a, std::size_t left, std::size_t right);

Tensor mean_all(GradTape* tape, const Tensor& a);
Tensor mse_loss(GradTape* tape, const Tensor& pred, const Tensor& target);

/// out[i] = a[i] + factor * s[0] for a scalar tensor s.
Tensor add_scalar(GradTape* tape, const Tensor& a, const Tensor& s, double factor = 1.0);

/// out[j] = a[indices[j]] over a 1-D tensor.
Tensor gather(GradTape* tape, const Tensor& a, std::vector<std::size_t> indices);
/// Scatters a 1-D tensor into a zero vector of length out_len:
/// out[indices[j]] = a[j]. Indices must be unique.
Tensor scatter_to(GradTape* tape, const Tensor& a, std::vector<std::size_t> indices,
                  std::size_t out_len);

/// Inverted dropout: kept positions scaled by 1/(1-p). p == 0 returns the
/// input unchanged without consuming randomness.
Tensor dropout(GradTape* tape, const Tensor& a, double p, std::mt19937_64& rng);

/// weight[n_out x n_in] * input[n_in] + bias[n_out]
Tensor linear(GradTape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias);

/**
 * 1-D cross-correlation over input[c_in x length] with
 * weight[c_out x c_in x kernel] and bias[c_out].
 *
 * causal_pad left-pads (kernel-1)*dilation zeros, so out_length is
 * ceil(length/stride) and output position t depends only on input
 * positions <= t*stride. Without it the convolution is valid:
 * out_length = floor((length - dilation*(kernel-1) - 1)/stride) + 1.
 */
Tensor conv1d(GradTape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias,
              int stride, int dilation, bool causal_pad);

/// 2-D cross-correlation over input[c_in x h x w] with
/// weight[c_out x c_in x kh x kw], stride 1. Same padding preserves h and w.
Tensor conv2d(GradTape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias,
              Pad2d padding);

/// Per-position normalization over channels of input[channels x length],
/// followed by a learned per-channel gain and shift.
Tensor layer_norm(GradTape* tape, const Tensor& input, const Tensor& gain, const Tensor& shift,
                  double eps = 1e-5);

} // namespace mssd::ops

#endif // MSSD_OPS_HPP
