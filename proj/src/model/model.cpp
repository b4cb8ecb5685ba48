// Copyright (c) 2026 The MMVP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>

#include "mmvp/error.hpp"
#include "mmvp/model.hpp"
#include "mmvp/ops.hpp"

namespace mmvp {

namespace {

template <typename T>
Tensor<T> lrelu(const Tensor<T>& x) {
    return leaky_relu(x, static_cast<T>(nn::kLeakySlope));
}

std::string level_name(std::size_t level) { return std::to_string(level); }

}  // namespace

template <typename T>
Model<T>::Model(const ModelConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    comp_levels_ = config_.composition_levels();
    Prng rng(seed);
    const auto& c = config_;
    const std::size_t top = c.top_level();
    const std::size_t ml = c.matrix_level();
    auto used = [&](std::size_t l) {
        return l == ml || std::find(comp_levels_.begin(), comp_levels_.end(), l) != comp_levels_.end();
    };

    stem_ = nn::Conv2d<T>::create(params_, "encoder.stem", c.C_in, c.C_img, 3, 1, rng);
    for (std::size_t l = 0; l <= top; ++l) {
        if (l > 0) {
            down_[l] = nn::Conv2d<T>::create(params_, "encoder.down" + level_name(l), c.channels_at(l - 1),
                                             c.channels_at(l), 3, 2, rng);
        }
        if (used(l)) {
            enc_rrdb_[l] = nn::RrdbBlock<T>::create(params_, "encoder.rrdb" + level_name(l),
                                                    nn::RrdbConfig::for_channels(c.channels_at(l)), rng);
        }
    }

    if (c.use_filter) {
        filter1_ = nn::Conv2d<T>::create(params_, "filter.conv1", c.channels_at(ml), c.C_img, 3, 1, rng);
        filter2_ = nn::Conv2d<T>::create(params_, "filter.conv2", c.C_img, c.C_img, 3, 1, rng);
    }

    const std::size_t hw = c.grid_size();
    pred1_ = nn::Conv3d<T>::create(params_, "predictor.conv1", hw, c.C_motion, 3, rng);
    pred2_ = nn::Conv3d<T>::create(params_, "predictor.conv2", c.C_motion, c.C_motion, 3, rng);
    pred3_ = nn::Conv3d<T>::create(params_, "predictor.conv3", c.C_motion, hw * c.predictor_repeats(), 3, rng);

    const std::size_t coarsest = comp_levels_.back();
    for (std::size_t l = coarsest + 1; l-- > 0;) {
        const std::size_t ch = c.channels_at(l);
        if (l < coarsest) {
            up_[l] = nn::Conv2d<T>::create(params_, "decoder.up" + level_name(l), c.channels_at(l + 1), 4 * ch, 3, 1,
                                           rng);
            std::size_t extra = 0;
            if (std::find(comp_levels_.begin(), comp_levels_.end(), l) != comp_levels_.end()) extra += ch;
            if (l == 0 && c.include_image) extra += c.C_in;
            if (extra > 0) {
                fuse_[l] = nn::Conv2d<T>::create(params_, "decoder.fuse" + level_name(l), ch + extra, ch, 3, 1, rng);
            }
        }
        dec_rrdb_[l] = nn::RrdbBlock<T>::create(params_, "decoder.rrdb" + level_name(l),
                                                nn::RrdbConfig::for_channels(ch), rng);
    }
    head_ = nn::Conv2d<T>::create(params_, "decoder.head", c.C_img, c.C_in, 3, 1, rng);
}

template <typename T>
ParamBreakdown Model<T>::count_params() const {
    ParamBreakdown b;
    b.encoder = params_.count_with_prefix("encoder.");
    b.filter = params_.count_with_prefix("filter.");
    b.predictor = params_.count_with_prefix("predictor.");
    b.decoder = params_.count_with_prefix("decoder.");
    b.total = params_.total_count();
    return b;
}

template <typename T>
typename Model<T>::Pyramid Model<T>::encode(const Tensor<T>& frames) const {
    const auto& c = config_;
    if (frames.rank() != 4 || frames.dim(1) != c.C_in || frames.dim(2) != c.H || frames.dim(3) != c.W) {
        fail(ErrorCode::kShapeMismatch, "encoder expects (B, " + std::to_string(c.C_in) + ", " + std::to_string(c.H) +
                                            ", " + std::to_string(c.W) + "), got " + shape_str(frames.shape()));
    }
    Pyramid p;
    Tensor<T> x = lrelu(stem_(frames));
    for (std::size_t l = 0; l <= c.top_level(); ++l) {
        if (l > 0) x = lrelu(down_.at(l)(x));
        if (auto it = enc_rrdb_.find(l); it != enc_rrdb_.end()) x = it->second.forward(x);
        p.levels[l] = x;
    }
    p.g = filter(p.levels.at(c.matrix_level()));
    return p;
}

template <typename T>
Tensor<T> Model<T>::filter(const Tensor<T>& f) const {
    const auto& c = config_;
    if (f.rank() != 4 || f.dim(1) != c.channels_at(c.matrix_level()) || f.dim(2) != c.grid_h() ||
        f.dim(3) != c.grid_w()) {
        fail(ErrorCode::kShapeMismatch, "filter expects the 1/" + std::to_string(c.S) + " feature map, got " +
                                            shape_str(f.shape()));
    }
    if (!c.use_filter) return f;
    return filter2_(lrelu(filter1_(f)));
}

template <typename T>
MotionMatrices<T> Model<T>::predict_matrices(const MotionMatrices<T>& raw) const {
    const auto& c = config_;
    const auto& v = raw.values;
    const std::size_t hw = c.grid_size();
    if (raw.normalized) fail(ErrorCode::kInvalidArgument, "predictor consumes raw (unnormalized) matrices");
    if (v.rank() != 4 || v.dim(1) < 1 || v.dim(2) != hw || v.dim(3) != hw) {
        fail(ErrorCode::kShapeMismatch, "predictor expects (N, >=1, " + std::to_string(hw) + ", " +
                                            std::to_string(hw) + "), got " + shape_str(v.shape()));
    }
    const std::size_t n = v.dim(0), steps = v.dim(1);
    // Channels = flattened target heatmap, depth = matrix index, plane = source grid.
    Tensor<T> x = reshape(permute(v, {0, 3, 1, 2}), {n, hw, steps, c.grid_h(), c.grid_w()});
    x = lrelu(pred1_(x));
    x = lrelu(pred2_(x));
    x = pred3_(x);
    const std::size_t k = pred3_.weight.dim(0) / hw;
    x = permute(reshape(x, {n, k, hw, steps, hw}), {0, 1, 3, 4, 2});
    x = reshape(x, {n, k * steps, hw, hw});
    if (k * steps < c.T_prime) {
        fail(ErrorCode::kShapeMismatch, "predictor yields " + std::to_string(k * steps) + " matrices for T'=" +
                                            std::to_string(c.T_prime));
    }
    return {slice(x, 1, 0, c.T_prime), false};
}

template <typename T>
typename Model<T>::Composed Model<T>::compose(const Pyramid& pyramid, const Tensor<T>& frames, std::size_t batch,
                                              const MotionMatrices<T>& raw_normalized,
                                              const MotionMatrices<T>& future_normalized) const {
    const auto& c = config_;
    if (!raw_normalized.normalized || !future_normalized.normalized) {
        fail(ErrorCode::kInvalidArgument, "composition requires normalized matrices");
    }
    const std::size_t t = c.T, tp = c.T_prime, gh = c.grid_h(), gw = c.grid_w();
    std::vector<Tensor<T>> parts;
    std::vector<std::size_t> widths;
    for (auto l : comp_levels_) {
        auto it = pyramid.levels.find(l);
        if (it == pyramid.levels.end()) fail(ErrorCode::kInvalidArgument, "pyramid lacks level " + std::to_string(l));
        parts.push_back(to_grid(it->second, gh));
        widths.push_back(parts.back().dim(1));
    }
    if (c.include_image) {
        parts.push_back(to_grid(frames, gh));
        widths.push_back(parts.back().dim(1));
    }
    const Tensor<T> stacked = parts.size() == 1 ? parts[0] : concat(parts, 1);
    const std::size_t d = stacked.dim(1);
    if (stacked.dim(0) != batch * t) fail(ErrorCode::kShapeMismatch, "composition batch does not match N*T");
    const Tensor<T> x = reshape(stacked, {batch, t, d, gh * gw});
    const Tensor<T> out = compose_flat(x, raw_normalized.values, future_normalized.values, c.average_composition);
    const Tensor<T> grid = reshape(out, {batch * tp, d, gh, gw});

    Composed result;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const Tensor<T> piece = slice(grid, 1, offset, widths[i]);
        offset += widths[i];
        if (i < comp_levels_.size()) {
            const std::size_t l = comp_levels_[i];
            result.levels[l] = from_grid(piece, c.H >> l);
        } else {
            result.image = from_grid(piece, c.H);
        }
    }
    return result;
}

template <typename T>
Tensor<T> Model<T>::decode(const Composed& composed) const {
    const auto& c = config_;
    for (auto l : comp_levels_) {
        if (composed.levels.find(l) == composed.levels.end()) {
            fail(ErrorCode::kInvalidArgument, "decoder is missing composed scale 1/" + std::to_string(std::size_t(1) << l));
        }
    }
    if (c.include_image && !composed.image.defined()) fail(ErrorCode::kInvalidArgument, "decoder is missing the composed image");
    const std::size_t coarsest = comp_levels_.back();
    Tensor<T> x = dec_rrdb_.at(coarsest).forward(composed.levels.at(coarsest));
    for (std::size_t l = coarsest; l-- > 0;) {
        x = lrelu(nn::pixel_shuffle(up_.at(l)(x), 2));
        std::vector<Tensor<T>> parts{x};
        if (auto it = composed.levels.find(l); it != composed.levels.end()) parts.push_back(it->second);
        if (l == 0 && c.include_image) parts.push_back(composed.image);
        if (parts.size() > 1) x = lrelu(fuse_.at(l)(concat(parts, 1)));
        x = dec_rrdb_.at(l).forward(x);
    }
    return head_(x);
}

template <typename T>
typename Model<T>::Output Model<T>::forward(const Tensor<T>& frames, const Tensor<T>& targets) const {
    const auto& c = config_;
    if (frames.rank() != 5 || frames.dim(1) != c.T || frames.dim(2) != c.C_in || frames.dim(3) != c.H ||
        frames.dim(4) != c.W) {
        fail(ErrorCode::kShapeMismatch, "forward expects frames (N, " + std::to_string(c.T) + ", " +
                                            std::to_string(c.C_in) + ", " + std::to_string(c.H) + ", " +
                                            std::to_string(c.W) + "), got " + shape_str(frames.shape()));
    }
    const std::size_t n = frames.dim(0);
    if (targets.defined() && targets.shape() != Shape{n, c.T_prime, c.C_in, c.H, c.W}) {
        fail(ErrorCode::kShapeMismatch, "targets " + shape_str(targets.shape()) + " do not match (N, T', C, H, W)");
    }
    const Tensor<T> flat = reshape(frames, {n * c.T, c.C_in, c.H, c.W});
    const Pyramid pyramid = encode(flat);
    const Tensor<T> g = reshape(pyramid.g, {n, c.T, pyramid.g.dim(1), c.grid_size()});

    Output out;
    out.raw = build_motion_matrices(g);
    const MotionMatrices<T> raw_n = normalize_matrix(out.raw);
    out.future = normalize_matrix(predict_matrices(out.raw));
    const Composed composed = compose(pyramid, flat, n, raw_n, out.future);
    out.predictions = reshape(decode(composed), {n, c.T_prime, c.C_in, c.H, c.W});
    if (targets.defined()) out.loss = mse_loss(out.predictions, targets);
    return out;
}

template <typename T>
Tensor<T> Model<T>::predict(const Tensor<T>& frames) const {
    NoGradScope<T> no_grad;
    return clamp(forward(frames, Tensor<T>()).predictions, T(0), T(1));
}

template class Model<float>;
template class Model<double>;
template class Model<long double>;

}  // namespace mmvp
