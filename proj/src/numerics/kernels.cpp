/*
 * Copyright 2026 The spose Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "numerics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spose::kernels {

namespace {

Shape with_last(const Shape &s, std::size_t last) {
    Shape out = s;
    out.back() = last;
    return out;
}

Shape seq_shape(const Grid &like, std::size_t batch, std::size_t length, std::size_t width) {
    if (like.rank() == 2) return {length, width};
    return {batch, length, width};
}

}  // namespace

Grid linear(const Grid &x, const Grid &w, const Grid &b) {
    require(w.rank() == 2, ErrorKind::dimension, "linear weight must be rank 2, got " + shape_str(w.shape()));
    const std::size_t din = w.dim(0), dout = w.dim(1);
    require(x.shape().back() == din, ErrorKind::dimension,
            "linear: input " + shape_str(x.shape()) + " does not match weight " + shape_str(w.shape()));
    require(b.size() == dout, ErrorKind::dimension, "linear: bias size mismatch");
    const std::size_t rows = rows_of(x);
    Grid y(with_last(x.shape(), dout));
    for (std::size_t r = 0; r < rows; ++r) {
        const double *xr = &x[r * din];
        double *yr = &y[r * dout];
        for (std::size_t o = 0; o < dout; ++o) yr[o] = b[o];
        for (std::size_t i = 0; i < din; ++i) {
            const double xi = xr[i];
            const double *wi = &w[i * dout];
            for (std::size_t o = 0; o < dout; ++o) yr[o] += xi * wi[o];
        }
    }
    return y;
}

LinearGrads linear_backward(const Grid &x, const Grid &w, const Grid &dy) {
    const std::size_t din = w.dim(0), dout = w.dim(1);
    const std::size_t rows = rows_of(x);
    LinearGrads g{Grid(x.shape()), Grid(w.shape()), Grid({dout})};
    for (std::size_t r = 0; r < rows; ++r) {
        const double *xr = &x[r * din];
        const double *dyr = &dy[r * dout];
        double *dxr = &g.dx[r * din];
        for (std::size_t o = 0; o < dout; ++o) g.db[o] += dyr[o];
        for (std::size_t i = 0; i < din; ++i) {
            const double *wi = &w[i * dout];
            double *dwi = &g.dw[i * dout];
            double acc = 0.0;
            const double xi = xr[i];
            for (std::size_t o = 0; o < dout; ++o) {
                acc += wi[o] * dyr[o];
                dwi[o] += xi * dyr[o];
            }
            dxr[i] = acc;
        }
    }
    return g;
}

std::size_t strided_length(std::size_t length, std::size_t stride) {
    require(stride >= 1, ErrorKind::config, "stride must be >= 1");
    require(length >= 1, ErrorKind::dimension, "sequence length must be >= 1");
    return (length - 1) / stride + 1;
}

Grid conv1d_strided(const Grid &x, const Grid &kernel, const Grid &bias, std::size_t stride) {
    require(kernel.rank() == 3, ErrorKind::dimension, "conv kernel must be [K, Din, Dout]");
    const std::size_t K = kernel.dim(0), din = kernel.dim(1), dout = kernel.dim(2);
    require(K % 2 == 1, ErrorKind::config, "conv kernel size must be odd, got " + std::to_string(K));
    require(stride >= 1, ErrorKind::config, "conv stride must be >= 1");
    const auto [B, T, width] = seq_view(x, "conv1d_strided");
    require(width == din, ErrorKind::dimension,
            "conv1d: input " + shape_str(x.shape()) + " does not match kernel " + shape_str(kernel.shape()));
    require(bias.size() == dout, ErrorKind::dimension, "conv1d: bias size mismatch");
    const std::size_t out_len = strided_length(T, stride);
    const long pad = static_cast<long>(K / 2);
    Grid y(seq_shape(x, B, out_len, dout));
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t t = 0; t < out_len; ++t) {
            double *yr = &y[(b * out_len + t) * dout];
            for (std::size_t o = 0; o < dout; ++o) yr[o] = bias[o];
            for (std::size_t k = 0; k < K; ++k) {
                const long src = static_cast<long>(stride * t + k) - pad;
                if (src < 0 || src >= static_cast<long>(T)) continue;
                const double *xr = &x[(b * T + static_cast<std::size_t>(src)) * din];
                for (std::size_t i = 0; i < din; ++i) {
                    const double xi = xr[i];
                    const double *ki = &kernel[(k * din + i) * dout];
                    for (std::size_t o = 0; o < dout; ++o) yr[o] += xi * ki[o];
                }
            }
        }
    }
    return y;
}

ConvGrads conv1d_strided_backward(const Grid &x, const Grid &kernel, std::size_t stride, const Grid &dy) {
    const std::size_t K = kernel.dim(0), din = kernel.dim(1), dout = kernel.dim(2);
    const auto [B, T, width] = seq_view(x, "conv1d_strided");
    (void)width;
    const std::size_t out_len = strided_length(T, stride);
    const long pad = static_cast<long>(K / 2);
    ConvGrads g{Grid(x.shape()), Grid(kernel.shape()), Grid({dout})};
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t t = 0; t < out_len; ++t) {
            const double *dyr = &dy[(b * out_len + t) * dout];
            for (std::size_t o = 0; o < dout; ++o) g.dbias[o] += dyr[o];
            for (std::size_t k = 0; k < K; ++k) {
                const long src = static_cast<long>(stride * t + k) - pad;
                if (src < 0 || src >= static_cast<long>(T)) continue;
                const std::size_t row = (b * T + static_cast<std::size_t>(src)) * din;
                for (std::size_t i = 0; i < din; ++i) {
                    const double xi = x[row + i];
                    const double *ki = &kernel[(k * din + i) * dout];
                    double *dki = &g.dkernel[(k * din + i) * dout];
                    double acc = 0.0;
                    for (std::size_t o = 0; o < dout; ++o) {
                        acc += ki[o] * dyr[o];
                        dki[o] += xi * dyr[o];
                    }
                    g.dx[row + i] += acc;
                }
            }
        }
    }
    return g;
}

Grid maxpool1d(const Grid &x, std::size_t stride, std::vector<std::size_t> *argmax) {
    require(stride >= 1, ErrorKind::config, "pool stride must be >= 1");
    const auto [B, T, D] = seq_view(x, "maxpool1d");
    const std::size_t out_len = strided_length(T, stride);
    Grid y(seq_shape(x, B, out_len, D));
    if (argmax) argmax->assign(y.size(), 0);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t t = 0; t < out_len; ++t) {
            const std::size_t begin = t * stride;
            const std::size_t end = std::min(begin + stride, T);  // -inf padding never wins
            for (std::size_t d = 0; d < D; ++d) {
                double best = -std::numeric_limits<double>::infinity();
                std::size_t best_idx = 0;
                for (std::size_t s = begin; s < end; ++s) {
                    const std::size_t idx = (b * T + s) * D + d;
                    if (x[idx] > best || s == begin) {
                        best = x[idx];
                        best_idx = idx;
                    }
                }
                const std::size_t out_idx = (b * out_len + t) * D + d;
                y[out_idx] = best;
                if (argmax) (*argmax)[out_idx] = best_idx;
            }
        }
    }
    return y;
}

Grid maxpool1d_backward(const Shape &x_shape, const std::vector<std::size_t> &argmax, const Grid &dy) {
    Grid dx(x_shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax[i]] += dy[i];
    return dx;
}

namespace {

struct AxisLayout {
    std::size_t outer, extent, inner;
};

AxisLayout axis_layout(const Shape &s, std::size_t axis) {
    require(axis < s.size(), ErrorKind::dimension, "axis out of range");
    AxisLayout l{1, s[axis], 1};
    for (std::size_t i = 0; i < axis; ++i) l.outer *= s[i];
    for (std::size_t i = axis + 1; i < s.size(); ++i) l.inner *= s[i];
    return l;
}

}  // namespace

Grid softmax(const Grid &x, std::size_t axis) {
    x.check_finite("softmax input");
    const auto l = axis_layout(x.shape(), axis);
    Grid y(x.shape());
    for (std::size_t o = 0; o < l.outer; ++o) {
        for (std::size_t in = 0; in < l.inner; ++in) {
            const std::size_t base = o * l.extent * l.inner + in;
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < l.extent; ++a) mx = std::max(mx, x[base + a * l.inner]);
            double sum = 0.0;
            for (std::size_t a = 0; a < l.extent; ++a) {
                const double e = std::exp(x[base + a * l.inner] - mx);
                y[base + a * l.inner] = e;
                sum += e;
            }
            for (std::size_t a = 0; a < l.extent; ++a) y[base + a * l.inner] /= sum;
        }
    }
    return y;
}

Grid softmax_backward(const Grid &y, const Grid &dy, std::size_t axis) {
    const auto l = axis_layout(y.shape(), axis);
    Grid dx(y.shape());
    for (std::size_t o = 0; o < l.outer; ++o) {
        for (std::size_t in = 0; in < l.inner; ++in) {
            const std::size_t base = o * l.extent * l.inner + in;
            double dot = 0.0;
            for (std::size_t a = 0; a < l.extent; ++a) dot += y[base + a * l.inner] * dy[base + a * l.inner];
            for (std::size_t a = 0; a < l.extent; ++a) {
                const std::size_t i = base + a * l.inner;
                dx[i] = y[i] * (dy[i] - dot);
            }
        }
    }
    return dx;
}

Grid relu(const Grid &x) {
    Grid y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    return y;
}

Grid layer_norm(const Grid &x, const Grid &gain, const Grid &shift, double eps, NormSaved *saved) {
    const std::size_t D = x.shape().back();
    require(D >= 1, ErrorKind::dimension, "layer_norm needs D >= 1");
    require(gain.size() == D && shift.size() == D, ErrorKind::dimension,
            "layer_norm: affine parameters do not match width " + std::to_string(D));
    const std::size_t rows = rows_of(x);
    Grid y(x.shape());
    NormSaved local;
    NormSaved &s = saved ? *saved : local;
    s.xhat = Grid(x.shape());
    s.inv_std.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double *xr = &x[r * D];
        double mean = 0.0;
        for (std::size_t d = 0; d < D; ++d) mean += xr[d];
        mean /= static_cast<double>(D);
        double var = 0.0;
        for (std::size_t d = 0; d < D; ++d) var += (xr[d] - mean) * (xr[d] - mean);
        var /= static_cast<double>(D);
        const double inv = 1.0 / std::sqrt(var + eps);
        s.inv_std[r] = inv;
        for (std::size_t d = 0; d < D; ++d) {
            const double h = (xr[d] - mean) * inv;
            s.xhat[r * D + d] = h;
            y[r * D + d] = gain[d] * h + shift[d];
        }
    }
    return y;
}

NormGrads layer_norm_backward(const NormSaved &saved, const Grid &gain, const Grid &dy) {
    const std::size_t D = gain.size();
    const std::size_t rows = rows_of(dy);
    NormGrads g{Grid(dy.shape()), Grid({D}), Grid({D})};
    std::vector<double> dh(D);
    for (std::size_t r = 0; r < rows; ++r) {
        double mean_dh = 0.0, mean_dh_h = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
            const std::size_t i = r * D + d;
            g.dgain[d] += dy[i] * saved.xhat[i];
            g.dshift[d] += dy[i];
            dh[d] = dy[i] * gain[d];
            mean_dh += dh[d];
            mean_dh_h += dh[d] * saved.xhat[i];
        }
        mean_dh /= static_cast<double>(D);
        mean_dh_h /= static_cast<double>(D);
        for (std::size_t d = 0; d < D; ++d) {
            const std::size_t i = r * D + d;
            g.dx[i] = saved.inv_std[r] * (dh[d] - mean_dh - saved.xhat[i] * mean_dh_h);
        }
    }
    return g;
}

Grid batch_norm_train(const Grid &x, const Grid &gain, const Grid &shift, BatchNormStats &stats, double momentum,
                      double eps, NormSaved *saved) {
    const std::size_t C = x.shape().back();
    require(gain.size() == C && shift.size() == C, ErrorKind::dimension, "batch_norm: affine size mismatch");
    require(stats.running_mean.size() == C && stats.running_var.size() == C, ErrorKind::dimension,
            "batch_norm: running statistics size mismatch");
    const std::size_t n = rows_of(x);
    require(n >= 1, ErrorKind::dimension, "batch_norm needs at least one row in train mode");
    std::vector<double> mean(C, 0.0), var(C, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < C; ++c) mean[c] += x[r * C + c];
    for (auto &m : mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const double d = x[r * C + c] - mean[c];
            var[c] += d * d;
        }
    for (auto &v : var) v /= static_cast<double>(n);

    NormSaved local;
    NormSaved &s = saved ? *saved : local;
    s.xhat = Grid(x.shape());
    s.inv_std.assign(C, 0.0);
    for (std::size_t c = 0; c < C; ++c) s.inv_std[c] = 1.0 / std::sqrt(var[c] + eps);
    Grid y(x.shape());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const std::size_t i = r * C + c;
            s.xhat[i] = (x[i] - mean[c]) * s.inv_std[c];
            y[i] = gain[c] * s.xhat[i] + shift[c];
        }

    const double unbias = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 1.0;
    for (std::size_t c = 0; c < C; ++c) {
        stats.running_mean[c] = (1.0 - momentum) * stats.running_mean[c] + momentum * mean[c];
        stats.running_var[c] = (1.0 - momentum) * stats.running_var[c] + momentum * var[c] * unbias;
    }
    stats.updated = true;
    return y;
}

Grid batch_norm_eval(const Grid &x, const Grid &gain, const Grid &shift, const BatchNormStats &stats, double eps) {
    const std::size_t C = x.shape().back();
    require(gain.size() == C && shift.size() == C, ErrorKind::dimension, "batch_norm: affine size mismatch");
    const std::size_t n = rows_of(x);
    Grid y(x.shape());
    for (std::size_t c = 0; c < C; ++c) {
        const double inv = 1.0 / std::sqrt(stats.running_var[c] + eps);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = r * C + c;
            y[i] = gain[c] * (x[i] - stats.running_mean[c]) * inv + shift[c];
        }
    }
    return y;
}

NormGrads batch_norm_train_backward(const NormSaved &saved, const Grid &gain, const Grid &dy) {
    const std::size_t C = gain.size();
    const std::size_t n = rows_of(dy);
    NormGrads g{Grid(dy.shape()), Grid({C}), Grid({C})};
    std::vector<double> mean_dh(C, 0.0), mean_dh_h(C, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const std::size_t i = r * C + c;
            g.dgain[c] += dy[i] * saved.xhat[i];
            g.dshift[c] += dy[i];
            const double dh = dy[i] * gain[c];
            mean_dh[c] += dh;
            mean_dh_h[c] += dh * saved.xhat[i];
        }
    for (std::size_t c = 0; c < C; ++c) {
        mean_dh[c] /= static_cast<double>(n);
        mean_dh_h[c] /= static_cast<double>(n);
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const std::size_t i = r * C + c;
            g.dx[i] = saved.inv_std[c] * (dy[i] * gain[c] - mean_dh[c] - saved.xhat[i] * mean_dh_h[c]);
        }
    return g;
}

Grid dropout(const Grid &x, double p, RngStream &rng, bool train, Grid *mask) {
    require(p >= 0.0 && p < 1.0, ErrorKind::config, "dropout probability must lie in [0, 1)");
    if (!train || p == 0.0) {
        if (mask) *mask = Grid(x.shape(), 1.0);
        return x;
    }
    const double keep_scale = 1.0 / (1.0 - p);
    Grid m(x.shape());
    Grid y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = rng.uniform() < p ? 0.0 : keep_scale;
        y[i] = x[i] * m[i];
    }
    if (mask) *mask = std::move(m);
    return y;
}

Grid attention(const Grid &q, const Grid &k, const Grid &v, std::size_t heads, Grid *maps) {
    require(q.shape() == k.shape() && q.shape() == v.shape(), ErrorKind::dimension,
            "attention: q, k, v shapes differ");
    const auto [B, L, D] = seq_view(q, "attention");
    require(heads >= 1 && D % heads == 0, ErrorKind::config,
            "attention: width " + std::to_string(D) + " not divisible by " + std::to_string(heads) + " heads");
    const std::size_t dk = D / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    Grid y(q.shape());
    Grid a({B, heads, L, L});
    std::vector<double> row(L);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t off = h * dk;
            for (std::size_t i = 0; i < L; ++i) {
                const double *qi = &q[(b * L + i) * D + off];
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < L; ++j) {
                    const double *kj = &k[(b * L + j) * D + off];
                    double s = 0.0;
                    for (std::size_t c = 0; c < dk; ++c) s += qi[c] * kj[c];
                    row[j] = s * scale;
                    mx = std::max(mx, row[j]);
                }
                double sum = 0.0;
                for (std::size_t j = 0; j < L; ++j) {
                    row[j] = std::exp(row[j] - mx);
                    sum += row[j];
                }
                double *arow = &a[((b * heads + h) * L + i) * L];
                double *yi = &y[(b * L + i) * D + off];
                for (std::size_t j = 0; j < L; ++j) {
                    arow[j] = row[j] / sum;
                    const double *vj = &v[(b * L + j) * D + off];
                    for (std::size_t c = 0; c < dk; ++c) yi[c] += arow[j] * vj[c];
                }
            }
        }
    }
    if (maps) *maps = std::move(a);
    return y;
}

AttentionGrads attention_backward(const Grid &q, const Grid &k, const Grid &v, const Grid &maps, std::size_t heads,
                                  const Grid &dy) {
    const auto [B, L, D] = seq_view(q, "attention");
    const std::size_t dk = D / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    AttentionGrads g{Grid(q.shape()), Grid(k.shape()), Grid(v.shape())};
    std::vector<double> da(L), ds(L);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t off = h * dk;
            for (std::size_t i = 0; i < L; ++i) {
                const double *arow = &maps[((b * heads + h) * L + i) * L];
                const double *dyi = &dy[(b * L + i) * D + off];
                double dot = 0.0;
                for (std::size_t j = 0; j < L; ++j) {
                    const double *vj = &v[(b * L + j) * D + off];
                    double *dvj = &g.dv[(b * L + j) * D + off];
                    double s = 0.0;
                    for (std::size_t c = 0; c < dk; ++c) {
                        s += dyi[c] * vj[c];
                        dvj[c] += arow[j] * dyi[c];
                    }
                    da[j] = s;
                    dot += s * arow[j];
                }
                for (std::size_t j = 0; j < L; ++j) ds[j] = arow[j] * (da[j] - dot) * scale;
                const double *qi = &q[(b * L + i) * D + off];
                double *dqi = &g.dq[(b * L + i) * D + off];
                for (std::size_t j = 0; j < L; ++j) {
                    const double *kj = &k[(b * L + j) * D + off];
                    double *dkj = &g.dk[(b * L + j) * D + off];
                    for (std::size_t c = 0; c < dk; ++c) {
                        dqi[c] += ds[j] * kj[c];
                        dkj[c] += ds[j] * qi[c];
                    }
                }
            }
        }
    }
    return g;
}

}  // namespace spose::kernels
