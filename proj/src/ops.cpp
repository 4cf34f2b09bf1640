#include "mssd/ops.hpp"

#include <algorithm>
#include <cmath>

namespace mssd::ops {

namespace {

std::int64_t nid(GradTape* tape, const Tensor& t) {
    return tape ? tape->node_of(t) : -1;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
}

} // namespace

Tensor add(GradTape* tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::size_t n = a.size();
    std::vector<double> out(n);
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] + pb[i];
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a), nb = nid(tape, b);
    return tape->emit(std::move(result), [na, nb, n](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na))
            for (std::size_t i = 0; i < n; ++i) ga[i] += og[i];
        if (double* gb = p.grad(nb))
            for (std::size_t i = 0; i < n; ++i) gb[i] += og[i];
    });
}

Tensor sub(GradTape* tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::size_t n = a.size();
    std::vector<double> out(n);
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] - pb[i];
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a), nb = nid(tape, b);
    return tape->emit(std::move(result), [na, nb, n](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na))
            for (std::size_t i = 0; i < n; ++i) ga[i] += og[i];
        if (double* gb = p.grad(nb))
            for (std::size_t i = 0; i < n; ++i) gb[i] -= og[i];
    });
}

Tensor mul(GradTape* tape, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::size_t n = a.size();
    std::vector<double> out(n);
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] * pb[i];
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a), nb = nid(tape, b);
    return tape->emit(std::move(result),
                      [na, nb, n, a, b](const double* og, GradTape::Pass& p) {
                          const double* pa = a.data();
                          const double* pb = b.data();
                          if (double* ga = p.grad(na))
                              for (std::size_t i = 0; i < n; ++i) ga[i] += og[i] * pb[i];
                          if (double* gb = p.grad(nb))
                              for (std::size_t i = 0; i < n; ++i) gb[i] += og[i] * pa[i];
                      });
}

Tensor scale(GradTape* tape, const Tensor& a, double factor) {
    std::size_t n = a.size();
    std::vector<double> out(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] * factor;
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result), [na, n, factor](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na))
            for (std::size_t i = 0; i < n; ++i) ga[i] += og[i] * factor;
    });
}

Tensor relu(GradTape* tape, const Tensor& a) {
    std::size_t n = a.size();
    std::vector<double> out(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] > 0.0 ? pa[i] : 0.0;
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result), [na, n, a](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na)) {
            const double* pa = a.data();
            for (std::size_t i = 0; i < n; ++i)
                if (pa[i] > 0.0) ga[i] += og[i];
        }
    });
}

Tensor reshape(GradTape* tape, const Tensor& a, Shape new_shape) {
    Tensor result = a.detached().with_shape(std::move(new_shape));
    if (!tape) return result;
    const auto na = nid(tape, a);
    const std::size_t n = a.size();
    return tape->emit(std::move(result), [na, n](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na))
            for (std::size_t i = 0; i < n; ++i) ga[i] += og[i];
    });
}

Tensor concat(GradTape* tape, const std::vector<Tensor>& parts, std::size_t axis) {
    if (parts.empty()) throw ContractError("concat: no inputs");
    const Shape& base = parts[0].shape();
    if (axis >= base.size())
        throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                         shape_str(base));
    std::size_t axis_total = 0;
    for (const Tensor& t : parts) {
        if (t.ndim() != base.size())
            throw ShapeError("concat: rank mismatch");
        for (std::size_t d = 0; d < base.size(); ++d)
            if (d != axis && t.dim(d) != base[d])
                throw ShapeError("concat: shape mismatch " + shape_str(t.shape()) + " vs " +
                                 shape_str(base));
        axis_total += t.dim(axis);
    }
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= base[d];
    for (std::size_t d = axis + 1; d < base.size(); ++d) inner *= base[d];

    Shape out_shape = base;
    out_shape[axis] = axis_total;
    std::vector<double> out(outer * axis_total * inner);
    std::size_t offset = 0;
    for (const Tensor& t : parts) {
        const std::size_t block = t.dim(axis) * inner;
        const double* src = t.data();
        for (std::size_t o = 0; o < outer; ++o)
            std::copy(src + o * block, src + (o + 1) * block,
                      out.begin() + static_cast<std::ptrdiff_t>(o * axis_total * inner + offset));
        offset += block;
    }
    Tensor result = Tensor::from(std::move(out_shape), std::move(out));
    if (!tape) return result;

    std::vector<std::int64_t> ids(parts.size());
    std::vector<std::size_t> blocks(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        ids[i] = nid(tape, parts[i]);
        blocks[i] = parts[i].dim(axis) * inner;
    }
    const std::size_t row = axis_total * inner;
    return tape->emit(std::move(result),
                      [ids, blocks, outer, row](const double* og, GradTape::Pass& p) {
                          std::size_t offset = 0;
                          for (std::size_t i = 0; i < ids.size(); ++i) {
                              if (double* g = p.grad(ids[i])) {
                                  for (std::size_t o = 0; o < outer; ++o) {
                                      const double* src = og + o * row + offset;
                                      double* dst = g + o * blocks[i];
                                      for (std::size_t j = 0; j < blocks[i]; ++j) dst[j] += src[j];
                                  }
                              }
                              offset += blocks[i];
                          }
                      });
}

Tensor slice_last(GradTape* tape, const Tensor& a, std::size_t start, std::size_t length) {
    const std::size_t last = a.dim(a.ndim() - 1);
    if (length < 1 || start + length > last)
        throw ShapeError("slice_last: range [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") out of " + std::to_string(last));
    const std::size_t rows = a.size() / last;
    Shape out_shape = a.shape();
    out_shape.back() = length;
    std::vector<double> out(rows * length);
    const double* src = a.data();
    for (std::size_t r = 0; r < rows; ++r)
        std::copy(src + r * last + start, src + r * last + start + length,
                  out.begin() + static_cast<std::ptrdiff_t>(r * length));
    Tensor result = Tensor::from(std::move(out_shape), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result),
                      [na, rows, last, start, length](const double* og, GradTape::Pass& p) {
                          if (double* ga = p.grad(na))
                              for (std::size_t r = 0; r < rows; ++r)
                                  for (std::size_t j = 0; j < length; ++j)
                                      ga[r * last + start + j] += og[r * length + j];
                      });
}

Tensor pad1d(GradTape* tape, const Tensor& a, std::size_t left, std::size_t right) {
    const std::size_t last = a.dim(a.ndim() - 1);
    const std::size_t rows = a.size() / last;
    const std::size_t padded = last + left + right;
    Shape out_shape = a.shape();
    out_shape.back() = padded;
    std::vector<double> out(rows * padded, 0.0);
    const double* src = a.data();
    for (std::size_t r = 0; r < rows; ++r)
        std::copy(src + r * last, src + (r + 1) * last,
                  out.begin() + static_cast<std::ptrdiff_t>(r * padded + left));
    Tensor result = Tensor::from(std::move(out_shape), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result),
                      [na, rows, last, left, padded](const double* og, GradTape::Pass& p) {
                          if (double* ga = p.grad(na))
                              for (std::size_t r = 0; r < rows; ++r)
                                  for (std::size_t j = 0; j < last; ++j)
                                      ga[r * last + j] += og[r * padded + left + j];
                      });
}

Tensor mean_all(GradTape* tape, const Tensor& a) {
    const std::size_t n = a.size();
    const double* pa = a.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += pa[i];
    Tensor result = Tensor::scalar(sum / static_cast<double>(n));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result), [na, n](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na)) {
            const double g = og[0] / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) ga[i] += g;
        }
    });
}

Tensor mse_loss(GradTape* tape, const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "mse_loss");
    const std::size_t n = pred.size();
    const double* pp = pred.data();
    const double* pt = target.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pp[i] - pt[i];
        sum += d * d;
    }
    Tensor result = Tensor::scalar(sum / static_cast<double>(n));
    if (!tape) return result;
    const auto np = nid(tape, pred), nt = nid(tape, target);
    return tape->emit(std::move(result),
                      [np, nt, n, pred, target](const double* og, GradTape::Pass& p) {
                          const double* pp = pred.data();
                          const double* pt = target.data();
                          const double c = 2.0 * og[0] / static_cast<double>(n);
                          if (double* gp = p.grad(np))
                              for (std::size_t i = 0; i < n; ++i) gp[i] += c * (pp[i] - pt[i]);
                          if (double* gt = p.grad(nt))
                              for (std::size_t i = 0; i < n; ++i) gt[i] -= c * (pp[i] - pt[i]);
                      });
}

Tensor add_scalar(GradTape* tape, const Tensor& a, const Tensor& s, double factor) {
    if (s.size() != 1)
        throw ShapeError("add_scalar: expected a scalar second operand, got " +
                         shape_str(s.shape()));
    const std::size_t n = a.size();
    const double shift = factor * s.at(0);
    std::vector<double> out(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] + shift;
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a), ns = nid(tape, s);
    return tape->emit(std::move(result), [na, ns, n, factor](const double* og, GradTape::Pass& p) {
        if (double* ga = p.grad(na))
            for (std::size_t i = 0; i < n; ++i) ga[i] += og[i];
        if (double* gs = p.grad(ns)) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += og[i];
            gs[0] += factor * sum;
        }
    });
}

Tensor gather(GradTape* tape, const Tensor& a, std::vector<std::size_t> indices) {
    if (a.ndim() != 1) throw ShapeError("gather: expected a 1-D tensor, got " + shape_str(a.shape()));
    if (indices.empty()) throw ContractError("gather: empty index list");
    const std::size_t n = a.size();
    std::vector<double> out(indices.size());
    const double* pa = a.data();
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= n)
            throw ContractError("gather: index " + std::to_string(indices[j]) + " out of range");
        out[j] = pa[indices[j]];
    }
    Tensor result = Tensor::from({indices.size()}, std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result),
                      [na, indices = std::move(indices)](const double* og, GradTape::Pass& p) {
                          if (double* ga = p.grad(na))
                              for (std::size_t j = 0; j < indices.size(); ++j)
                                  ga[indices[j]] += og[j];
                      });
}

Tensor scatter_to(GradTape* tape, const Tensor& a, std::vector<std::size_t> indices,
                  std::size_t out_len) {
    if (a.ndim() != 1)
        throw ShapeError("scatter_to: expected a 1-D tensor, got " + shape_str(a.shape()));
    if (indices.size() != a.size())
        throw ShapeError("scatter_to: " + std::to_string(indices.size()) + " indices for " +
                         std::to_string(a.size()) + " values");
    std::vector<double> out(out_len, 0.0);
    std::vector<bool> seen(out_len, false);
    const double* pa = a.data();
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const std::size_t k = indices[j];
        if (k >= out_len)
            throw ContractError("scatter_to: index " + std::to_string(k) + " out of range");
        if (seen[k]) throw ContractError("scatter_to: duplicate index " + std::to_string(k));
        seen[k] = true;
        out[k] = pa[j];
    }
    Tensor result = Tensor::from({out_len}, std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result),
                      [na, indices = std::move(indices)](const double* og, GradTape::Pass& p) {
                          if (double* ga = p.grad(na))
                              for (std::size_t j = 0; j < indices.size(); ++j)
                                  ga[j] += og[indices[j]];
                      });
}

Tensor dropout(GradTape* tape, const Tensor& a, double p, std::mt19937_64& rng) {
    if (p < 0.0 || p >= 1.0)
        throw ContractError("dropout: p must be in [0, 1), got " + std::to_string(p));
    if (p == 0.0) return a;
    const std::size_t n = a.size();
    auto mask = std::make_shared<std::vector<double>>(n);
    std::bernoulli_distribution keep(1.0 - p);
    const double gain = 1.0 / (1.0 - p);
    for (std::size_t i = 0; i < n; ++i) (*mask)[i] = keep(rng) ? gain : 0.0;
    std::vector<double> out(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = pa[i] * (*mask)[i];
    Tensor result = Tensor::from(a.shape(), std::move(out));
    if (!tape) return result;
    const auto na = nid(tape, a);
    return tape->emit(std::move(result), [na, n, mask](const double* og, GradTape::Pass& p2) {
        if (double* ga = p2.grad(na))
            for (std::size_t i = 0; i < n; ++i) ga[i] += og[i] * (*mask)[i];
    });
}

Tensor linear(GradTape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias) {
    if (input.ndim() != 1)
        throw ShapeError("linear: expected 1-D input, got " + shape_str(input.shape()));
    if (weight.ndim() != 2)
        throw ShapeError("linear: expected 2-D weight, got " + shape_str(weight.shape()));
    const std::size_t n_out = weight.dim(0);
    const std::size_t n_in = weight.dim(1);
    if (input.dim(0) != n_in)
        throw ShapeError("linear: input " + shape_str(input.shape()) + " does not match weight " +
                         shape_str(weight.shape()));
    if (bias.ndim() != 1 || bias.dim(0) != n_out)
        throw ShapeError("linear: bias " + shape_str(bias.shape()) + " does not match weight " +
                         shape_str(weight.shape()));

    std::vector<double> out(n_out);
    const double* x = input.data();
    const double* w = weight.data();
    const double* b = bias.data();
    for (std::size_t o = 0; o < n_out; ++o) {
        double acc = b[o];
        const double* wr = w + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) acc += wr[i] * x[i];
        out[o] = acc;
    }
    Tensor result = Tensor::from({n_out}, std::move(out));
    if (!tape) return result;
    const auto nx = nid(tape, input), nw = nid(tape, weight), nb = nid(tape, bias);
    return tape->emit(
        std::move(result),
        [nx, nw, nb, n_out, n_in, input, weight](const double* og, GradTape::Pass& p) {
            const double* x = input.data();
            const double* w = weight.data();
            double* gx = p.grad(nx);
            double* gw = p.grad(nw);
            double* gb = p.grad(nb);
            for (std::size_t o = 0; o < n_out; ++o) {
                const double go = og[o];
                if (gb) gb[o] += go;
                const double* wr = w + o * n_in;
                double* gwr = gw ? gw + o * n_in : nullptr;
                for (std::size_t i = 0; i < n_in; ++i) {
                    if (gx) gx[i] += go * wr[i];
                    if (gwr) gwr[i] += go * x[i];
                }
            }
        });
}

Tensor conv1d(GradTape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias,
              int stride, int dilation, bool causal_pad) {
    if (stride < 1) throw ContractError("conv1d: stride must be >= 1");
    if (dilation < 1) throw ContractError("conv1d: dilation must be >= 1");
    if (input.ndim() != 2)
        throw ShapeError("conv1d: expected input [channels x length], got " +
                         shape_str(input.shape()));
    if (weight.ndim() != 3)
        throw ShapeError("conv1d: expected weight [c_out x c_in x kernel], got " +
                         shape_str(weight.shape()));
    const std::size_t c_in = input.dim(0);
    const std::size_t len = input.dim(1);
    const std::size_t c_out = weight.dim(0);
    const std::size_t kernel = weight.dim(2);
    if (weight.dim(1) != c_in)
        throw ShapeError("conv1d: weight expects " + std::to_string(weight.dim(1)) +
                         " input channels, input has " + std::to_string(c_in));
    if (bias.ndim() != 1 || bias.dim(0) != c_out)
        throw ShapeError("conv1d: bias " + shape_str(bias.shape()) + " does not match " +
                         std::to_string(c_out) + " output channels");

    const long long pad =
        causal_pad ? static_cast<long long>(dilation) * (static_cast<long long>(kernel) - 1) : 0;
    std::size_t out_len;
    if (causal_pad) {
        out_len = (len - 1) / static_cast<std::size_t>(stride) + 1;
    } else {
        const long long span =
            static_cast<long long>(dilation) * (static_cast<long long>(kernel) - 1) + 1;
        if (span > static_cast<long long>(len))
            throw ShapeError("conv1d: kernel span " + std::to_string(span) +
                             " exceeds input length " + std::to_string(len) +
                             " (empty output)");
        out_len = (len - static_cast<std::size_t>(span)) / static_cast<std::size_t>(stride) + 1;
    }

    std::vector<double> out(c_out * out_len);
    const double* x = input.data();
    const double* w = weight.data();
    const double* b = bias.data();
    for (std::size_t oc = 0; oc < c_out; ++oc) {
        double* orow = out.data() + oc * out_len;
        for (std::size_t t = 0; t < out_len; ++t) orow[t] = b[oc];
        for (std::size_t ic = 0; ic < c_in; ++ic) {
            const double* xr = x + ic * len;
            const double* wr = w + (oc * c_in + ic) * kernel;
            for (std::size_t t = 0; t < out_len; ++t) {
                const long long base = static_cast<long long>(t) * stride - pad;
                double acc = 0.0;
                for (std::size_t j = 0; j < kernel; ++j) {
                    const long long s = base + static_cast<long long>(j) * dilation;
                    if (s >= 0 && s < static_cast<long long>(len)) acc += wr[j] * xr[s];
                }
                orow[t] += acc;
            }
        }
    }
    Tensor result = Tensor::from({c_out, out_len}, std::move(out));
    if (!tape) return result;
    const auto nx = nid(tape, input), nw = nid(tape, weight), nb = nid(tape, bias);
    return tape->emit(
        std::move(result),
        [nx, nw, nb, c_in, c_out, len, kernel, out_len, stride, dilation, pad, input,
         weight](const double* og, GradTape::Pass& p) {
            const double* x = input.data();
            const double* w = weight.data();
            double* gx = p.grad(nx);
            double* gw = p.grad(nw);
            double* gb = p.grad(nb);
            for (std::size_t oc = 0; oc < c_out; ++oc) {
                const double* ogr = og + oc * out_len;
                if (gb) {
                    double s = 0.0;
                    for (std::size_t t = 0; t < out_len; ++t) s += ogr[t];
                    gb[oc] += s;
                }
                if (!gx && !gw) continue;
                for (std::size_t ic = 0; ic < c_in; ++ic) {
                    const double* xr = x + ic * len;
                    const double* wr = w + (oc * c_in + ic) * kernel;
                    double* gxr = gx ? gx + ic * len : nullptr;
                    double* gwr = gw ? gw + (oc * c_in + ic) * kernel : nullptr;
                    for (std::size_t t = 0; t < out_len; ++t) {
                        const double go = ogr[t];
                        const long long base = static_cast<long long>(t) * stride - pad;
                        for (std::size_t j = 0; j < kernel; ++j) {
                            const long long s = base + static_cast<long long>(j) * dilation;
                            if (s < 0 || s >= static_cast<long long>(len)) continue;
                            if (gxr) gxr[s] += go * wr[j];
                            if (gwr) gwr[j] += go * xr[s];
                        }
                    }
                }
            }
        });
}

Tensor conv2d(GradTape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias,
              Pad2d padding) {
    if (input.ndim() != 3)
        throw ShapeError("conv2d: expected input [channels x h x w], got " +
                         shape_str(input.shape()));
    if (weight.ndim() != 4)
        throw ShapeError("conv2d: expected weight [c_out x c_in x kh x kw], got " +
                         shape_str(weight.shape()));
    const std::size_t c_in = input.dim(0);
    const std::size_t h = input.dim(1);
    const std::size_t w_len = input.dim(2);
    const std::size_t c_out = weight.dim(0);
    const std::size_t kh = weight.dim(2);
    const std::size_t kw = weight.dim(3);
    if (weight.dim(1) != c_in)
        throw ShapeError("conv2d: weight expects " + std::to_string(weight.dim(1)) +
                         " input channels, input has " + std::to_string(c_in));
    if (bias.ndim() != 1 || bias.dim(0) != c_out)
        throw ShapeError("conv2d: bias does not match output channels");

    long long pad_h = 0, pad_w = 0;
    std::size_t oh, ow;
    if (padding == Pad2d::Same) {
        pad_h = (static_cast<long long>(kh) - 1) / 2;
        pad_w = (static_cast<long long>(kw) - 1) / 2;
        oh = h;
        ow = w_len;
    } else {
        if (kh > h || kw > w_len)
            throw ShapeError("conv2d: kernel larger than input (empty output)");
        oh = h - kh + 1;
        ow = w_len - kw + 1;
    }

    std::vector<double> out(c_out * oh * ow);
    const double* x = input.data();
    const double* w = weight.data();
    const double* b = bias.data();
    for (std::size_t oc = 0; oc < c_out; ++oc) {
        double* oplane = out.data() + oc * oh * ow;
        for (std::size_t i = 0; i < oh * ow; ++i) oplane[i] = b[oc];
        for (std::size_t ic = 0; ic < c_in; ++ic) {
            const double* xp = x + ic * h * w_len;
            const double* wp = w + (oc * c_in + ic) * kh * kw;
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = 0.0;
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const long long sy = static_cast<long long>(oy) + ky - pad_h;
                        if (sy < 0 || sy >= static_cast<long long>(h)) continue;
                        for (std::size_t kx = 0; kx < kw; ++kx) {
                            const long long sx = static_cast<long long>(ox) + kx - pad_w;
                            if (sx < 0 || sx >= static_cast<long long>(w_len)) continue;
                            acc += wp[ky * kw + kx] * xp[sy * w_len + sx];
                        }
                    }
                    oplane[oy * ow + ox] += acc;
                }
            }
        }
    }
    Tensor result = Tensor::from({c_out, oh, ow}, std::move(out));
    if (!tape) return result;
    const auto nx = nid(tape, input), nw = nid(tape, weight), nb = nid(tape, bias);
    return tape->emit(
        std::move(result),
        [nx, nw, nb, c_in, c_out, h, w_len, kh, kw, oh, ow, pad_h, pad_w, input,
         weight](const double* og, GradTape::Pass& p) {
            const double* x = input.data();
            const double* w = weight.data();
            double* gx = p.grad(nx);
            double* gw = p.grad(nw);
            double* gb = p.grad(nb);
            for (std::size_t oc = 0; oc < c_out; ++oc) {
                const double* ogp = og + oc * oh * ow;
                if (gb) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < oh * ow; ++i) s += ogp[i];
                    gb[oc] += s;
                }
                if (!gx && !gw) continue;
                for (std::size_t ic = 0; ic < c_in; ++ic) {
                    const double* xp = x + ic * h * w_len;
                    const double* wp = w + (oc * c_in + ic) * kh * kw;
                    double* gxp = gx ? gx + ic * h * w_len : nullptr;
                    double* gwp = gw ? gw + (oc * c_in + ic) * kh * kw : nullptr;
                    for (std::size_t oy = 0; oy < oh; ++oy) {
                        for (std::size_t ox = 0; ox < ow; ++ox) {
                            const double go = ogp[oy * ow + ox];
                            if (go == 0.0) continue;
                            for (std::size_t ky = 0; ky < kh; ++ky) {
                                const long long sy = static_cast<long long>(oy) + ky - pad_h;
                                if (sy < 0 || sy >= static_cast<long long>(h)) continue;
                                for (std::size_t kx = 0; kx < kw; ++kx) {
                                    const long long sx = static_cast<long long>(ox) + kx - pad_w;
                                    if (sx < 0 || sx >= static_cast<long long>(w_len)) continue;
                                    if (gxp) gxp[sy * w_len + sx] += go * wp[ky * kw + kx];
                                    if (gwp) gwp[ky * kw + kx] += go * xp[sy * w_len + sx];
                                }
                            }
                        }
                    }
                }
            }
        });
}

Tensor layer_norm(GradTape* tape, const Tensor& input, const Tensor& gain, const Tensor& shift,
                  double eps) {
    if (input.ndim() != 2)
        throw ShapeError("layer_norm: expected input [channels x length], got " +
                         shape_str(input.shape()));
    const std::size_t c = input.dim(0);
    const std::size_t len = input.dim(1);
    if (gain.ndim() != 1 || gain.dim(0) != c || shift.ndim() != 1 || shift.dim(0) != c)
        throw ShapeError("layer_norm: gain/shift must be [channels]");

    auto normalized = std::make_shared<std::vector<double>>(c * len);
    auto inv_std = std::make_shared<std::vector<double>>(len);
    std::vector<double> out(c * len);
    const double* x = input.data();
    const double* g = gain.data();
    const double* s = shift.data();
    for (std::size_t t = 0; t < len; ++t) {
        double mean = 0.0;
        for (std::size_t ch = 0; ch < c; ++ch) mean += x[ch * len + t];
        mean /= static_cast<double>(c);
        double var = 0.0;
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double d = x[ch * len + t] - mean;
            var += d * d;
        }
        var /= static_cast<double>(c);
        const double is = 1.0 / std::sqrt(var + eps);
        (*inv_std)[t] = is;
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double nh = (x[ch * len + t] - mean) * is;
            (*normalized)[ch * len + t] = nh;
            out[ch * len + t] = g[ch] * nh + s[ch];
        }
    }
    Tensor result = Tensor::from({c, len}, std::move(out));
    if (!tape) return result;
    const auto nx = nid(tape, input), ng = nid(tape, gain), ns = nid(tape, shift);
    return tape->emit(
        std::move(result),
        [nx, ng, ns, c, len, gain, normalized, inv_std](const double* og, GradTape::Pass& p) {
            const double* g = gain.data();
            double* gx = p.grad(nx);
            double* gg = p.grad(ng);
            double* gs = p.grad(ns);
            for (std::size_t t = 0; t < len; ++t) {
                if (gx) {
                    double m1 = 0.0, m2 = 0.0;
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        const double d = og[ch * len + t] * g[ch];
                        m1 += d;
                        m2 += d * (*normalized)[ch * len + t];
                    }
                    m1 /= static_cast<double>(c);
                    m2 /= static_cast<double>(c);
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        const double d = og[ch * len + t] * g[ch];
                        gx[ch * len + t] +=
                            (d - m1 - (*normalized)[ch * len + t] * m2) * (*inv_std)[t];
                    }
                }
                for (std::size_t ch = 0; ch < c; ++ch) {
                    if (gg) gg[ch] += og[ch * len + t] * (*normalized)[ch * len + t];
                    if (gs) gs[ch] += og[ch * len + t];
                }
            }
        });
}

} // namespace mssd::ops
