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
#include <cmath>

#include <json.hpp>

#include "common/parallel.hpp"
#include "mmvp/error.hpp"
#include "mmvp/metrics.hpp"

namespace mmvp::metrics {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0, carry = 0;
    void add(double v) {
        const double t = sum + v;
        carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

Tensor<double> frame_at(const Tensor<double>& frames, std::size_t f) {
    const Shape one(frames.shape().begin() + 1, frames.shape().end());
    const std::size_t n = shape_numel(one);
    const auto src = frames.data().subspan(f * n, n);
    return Tensor<double>(one, std::vector<double>(src.begin(), src.end()));
}

// Frames [t0, t0 + count) of one sequence as (count, C, H, W). Intensities are
// rounded through float, the precision the model consumes, so a predictor that
// reproduces its input frames scores exactly.
Tensor<double> frames_of(const data::SequenceDataset& ds, std::size_t seq, std::size_t t0, std::size_t count) {
    const std::size_t fs = ds.frame_size();
    std::vector<double> v(count * fs);
    for (std::size_t t = 0; t < count; ++t) {
        const auto bytes = ds.frame(seq, t0 + t);
        for (std::size_t i = 0; i < fs; ++i) v[t * fs + i] = static_cast<float>(bytes[i]) / 255.0f;
    }
    return Tensor<double>({count, ds.channels, ds.height, ds.width}, std::move(v));
}

Aggregate mean_of(const std::vector<const SequenceScore*>& members) {
    CompensatedSum p, s, m;
    for (const auto* seq : members) {
        p.add(seq->psnr);
        s.add(seq->ssim);
        m.add(seq->mse_sum);
    }
    Aggregate a;
    a.count = members.size();
    if (a.count) {
        const double n = double(a.count);
        a.psnr = p.value() / n;
        a.ssim = s.value() / n;
        a.mse_sum = m.value() / n;
    }
    return a;
}

nlohmann::json aggregate_json(const Aggregate& a) {
    if (a.count == 0) return {{"psnr", nullptr}, {"ssim", nullptr}, {"mse_sum", nullptr}};
    return {{"psnr", a.psnr}, {"ssim", a.ssim}, {"mse_sum", a.mse_sum}};
}

nlohmann::json report_tree(const MetricReport& r) {
    nlohmann::json j = aggregate_json(r.full);
    nlohmann::json counts = {{"full", r.full.count}};
    nlohmann::json subset = nlohmann::json::object();
    for (std::size_t d = 0; d < kDifficultyCount; ++d) {
        const char* name = difficulty_name(static_cast<Difficulty>(d));
        counts[name] = r.subsets[d].count;
        subset[name] = aggregate_json(r.subsets[d]);
    }
    j["counts"] = counts;
    j["subset"] = subset;
    nlohmann::json seqs = nlohmann::json::array();
    for (std::size_t i = 0; i < r.sequences.size(); ++i) {
        const auto& s = r.sequences[i];
        seqs.push_back({{"index", i},
                        {"psnr", s.psnr},
                        {"ssim", s.ssim},
                        {"mse_sum", s.mse_sum},
                        {"subset", difficulty_name(s.subset)},
                        {"split_ssim", s.split_ssim}});
    }
    j["sequences"] = seqs;
    return j;
}

}  // namespace

SequenceScore score_sequence(const Tensor<double>& pred, const Tensor<double>& gt,
                             const Tensor<double>& last_observed) {
    if (pred.rank() != 4 || pred.shape() != gt.shape()) {
        fail(ErrorCode::kShapeMismatch, "score_sequence: expected matching (T', C, H, W), got " +
                                            shape_str(pred.shape()) + " and " + shape_str(gt.shape()));
    }
    SequenceScore s;
    const std::size_t frames = pred.dim(0);
    CompensatedSum p, q;
    for (std::size_t f = 0; f < frames; ++f) {
        const Tensor<double> a = frame_at(pred, f), b = frame_at(gt, f);
        p.add(psnr(a, b));
        q.add(ssim(a, b));
    }
    s.psnr = p.value() / double(frames);
    s.ssim = q.value() / double(frames);
    s.mse_sum = mse_sum(pred, gt);
    s.split_ssim = ssim(last_observed, frame_at(gt, 0));
    s.subset = classify(s.split_ssim);
    return s;
}

MetricReport aggregate(std::vector<SequenceScore> sequences) {
    MetricReport r;
    r.sequences = std::move(sequences);
    std::vector<const SequenceScore*> all;
    std::array<std::vector<const SequenceScore*>, kDifficultyCount> groups;
    for (const auto& s : r.sequences) {
        all.push_back(&s);
        groups[static_cast<std::size_t>(s.subset)].push_back(&s);
    }
    r.full = mean_of(all);
    for (std::size_t d = 0; d < kDifficultyCount; ++d) r.subsets[d] = mean_of(groups[d]);
    return r;
}

MetricReport score_datasets(const data::SequenceDataset& pred, const data::SequenceDataset& gt, std::size_t t_obs) {
    if (pred.num_sequences != gt.num_sequences || pred.height != gt.height || pred.width != gt.width ||
        pred.channels != gt.channels || pred.seq_len > gt.seq_len) {
        fail(ErrorCode::kShapeMismatch, "prediction and ground-truth datasets differ in geometry");
    }
    if (t_obs < 1 || t_obs >= pred.seq_len) {
        fail(ErrorCode::kInvalidArgument, "observed frame count " + std::to_string(t_obs) +
                                              " leaves no predicted frames in sequences of length " +
                                              std::to_string(pred.seq_len));
    }
    const std::size_t future = pred.seq_len - t_obs;
    std::vector<SequenceScore> scores;
    for (std::size_t s = 0; s < gt.num_sequences; ++s) {
        scores.push_back(score_sequence(frames_of(pred, s, t_obs, future), frames_of(gt, s, t_obs, future),
                                        frame_at(frames_of(gt, s, t_obs - 1, 1), 0)));
    }
    return aggregate(std::move(scores));
}

Evaluation evaluate(const data::SequenceDataset& dataset, std::size_t t_obs, std::size_t t_future,
                    const Predictor& predict, std::size_t threads) {
    if (t_obs < 1 || t_future < 1) fail(ErrorCode::kInvalidArgument, "evaluate: T and T' must be positive");
    if (dataset.seq_len < t_obs + t_future) {
        fail(ErrorCode::kInvalidArgument, "evaluate: sequences of length " + std::to_string(dataset.seq_len) +
                                              " are shorter than T + T' = " + std::to_string(t_obs + t_future));
    }
    const std::size_t n = dataset.num_sequences;
    std::vector<SequenceScore> model(n), baseline(n);
    const Shape future_shape{t_future, dataset.channels, dataset.height, dataset.width};

    auto run_one = [&](std::size_t s) {
        const Tensor<double> observed = frames_of(dataset, s, 0, t_obs);
        const Tensor<double> gt = frames_of(dataset, s, t_obs, t_future);
        const Tensor<double> last = frame_at(observed, t_obs - 1);

        const auto od = observed.data();
        Tensor<float> input(observed.shape(), std::vector<float>(od.begin(), od.end()));
        const Tensor<float> out = predict(input);
        if (!out.defined() || out.shape() != future_shape) {
            fail(ErrorCode::kShapeMismatch, "predictor returned " + (out.defined() ? shape_str(out.shape()) : "nothing") +
                                                " for sequence " + std::to_string(s) + ", expected " +
                                                shape_str(future_shape));
        }
        const auto pd = out.data();
        model[s] = score_sequence(Tensor<double>(future_shape, std::vector<double>(pd.begin(), pd.end())), gt, last);

        std::vector<double> repeat;
        repeat.reserve(gt.numel());
        for (std::size_t f = 0; f < t_future; ++f) repeat.insert(repeat.end(), last.data().begin(), last.data().end());
        baseline[s] = score_sequence(Tensor<double>(future_shape, std::move(repeat)), gt, last);
    };

    detail::parallel_for(n, threads, run_one);
    return {aggregate(std::move(model)), aggregate(std::move(baseline)), t_obs, t_future};
}

std::string report_json(const MetricReport& report, std::size_t t_obs) {
    nlohmann::json j = report_tree(report);
    j["data_range"] = 1.0;
    j["t_obs"] = t_obs;
    return j.dump(2) + "\n";
}

std::string evaluation_json(const Evaluation& e) {
    nlohmann::json j = {{"data_range", 1.0},
                        {"t_obs", e.t_obs},
                        {"t_future", e.t_future},
                        {"model", report_tree(e.model)},
                        {"baseline", report_tree(e.baseline)}};
    return j.dump(2) + "\n";
}

}  // namespace mmvp::metrics
