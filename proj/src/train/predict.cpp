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


#include "common/parallel.hpp"
#include "mmvp/error.hpp"
#include "mmvp/train.hpp"

namespace mmvp::train {

namespace {

void check_geometry(const ModelConfig& c, const data::SequenceDataset& ds, std::size_t needed) {
    if (ds.channels != c.C_in || ds.height != c.H || ds.width != c.W) {
        fail(ErrorCode::kShapeMismatch, "dataset frames are " + std::to_string(ds.channels) + "x" +
                                            std::to_string(ds.height) + "x" + std::to_string(ds.width) +
                                            " but the model expects " + std::to_string(c.C_in) + "x" +
                                            std::to_string(c.H) + "x" + std::to_string(c.W));
    }
    if (ds.seq_len < needed) {
        fail(ErrorCode::kInvalidArgument, "sequences of length " + std::to_string(ds.seq_len) + " hold fewer than " +
                                              std::to_string(needed) + " frames");
    }
}

// (T, C, H, W) observed frames -> (T', C, H, W) clamped predictions.
Tensor<float> predict_one(const Model<float>& model, const Tensor<float>& observed) {
    Shape batched = observed.shape();
    batched.insert(batched.begin(), 1);
    const auto od = observed.data();
    const Tensor<float> out = model.predict(Tensor<float>(batched, std::vector<float>(od.begin(), od.end())));
    const Shape single(out.shape().begin() + 1, out.shape().end());
    const auto pd = out.data();
    return Tensor<float>(single, std::vector<float>(pd.begin(), pd.end()));
}

}  // namespace

data::SequenceDataset predict_dataset(const Model<float>& model, const data::SequenceDataset& ds, std::size_t threads) {
    const ModelConfig& c = model.config();
    check_geometry(c, ds, c.T);
    auto out = data::SequenceDataset::allocate(ds.num_sequences, static_cast<std::uint32_t>(c.T + c.T_prime), ds.height,
                                               ds.width, ds.channels);
    detail::parallel_for(ds.num_sequences, threads, [&](std::size_t s) {
        for (std::size_t t = 0; t < c.T; ++t) {
            const auto src = ds.frame(s, t);
            std::copy(src.begin(), src.end(), out.mutable_frame(s, t).begin());
        }
        const Tensor<float> pred = model.predict(ds.clip<float>({s}, 0, c.T));
        const std::size_t fs = ds.frame_size();
        for (std::size_t j = 0; j < c.T_prime; ++j) {
            auto dst = out.mutable_frame(s, c.T + j);
            for (std::size_t i = 0; i < fs; ++i) dst[i] = data::to_byte(pred.data()[j * fs + i]);
        }
    });
    return out;
}

metrics::Evaluation evaluate_model(const Model<float>& model, const data::SequenceDataset& ds, std::size_t threads) {
    const ModelConfig& c = model.config();
    check_geometry(c, ds, c.T + c.T_prime);
    return metrics::evaluate(
        ds, c.T, c.T_prime, [&](const Tensor<float>& observed) { return predict_one(model, observed); }, threads);
}

}  // namespace mmvp::train
