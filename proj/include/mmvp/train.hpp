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


// Training: configuration, optimizer and schedule, checkpoints and the loop.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmvp/data.hpp"
#include "mmvp/metrics.hpp"
#include "mmvp/model.hpp"

namespace mmvp::train {

struct TrainConfig {
    ModelConfig model;
    double lr_max = 1e-3;
    double lr_min = 1e-6;
    std::size_t restart_period = 30;  // epochs
    std::size_t batch_size = 4;
    std::size_t total_epochs = 30;
    std::size_t max_steps = 0;  // 0: no step limit
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    std::size_t checkpoint_every = 10;  // epochs, 0 disables periodic checkpoints
    std::size_t eval_threads = 0;       // 0: hardware concurrency
    std::string train_data;
    std::string val_data;

    /// Throws kConfigInvalid naming the violated rule.
    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

/// Parses a JSON object. Unknown keys, wrongly typed values and invariant
/// violations throw kUnknownKey, kTypeMismatch and kConfigInvalid naming the
/// key. Missing keys keep their defaults.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::string& path);
/// Every key with its resolved value; parse_config(config_json(c)) == c.
std::string config_json(const TrainConfig& config);

/// Cosine schedule with warm restarts every restart_period epochs.
double lr_schedule(std::size_t epoch, const TrainConfig& config);

struct AdamWOptions {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8, weight_decay = 0.0;
};

/// Adam with decoupled weight decay:
///   theta -= lr * wd * theta + lr * mhat / (sqrt(vhat) + eps)
template <typename T>
class AdamW {
  public:
    struct Moments {
        std::vector<T> m, v;
    };

    explicit AdamW(AdamWOptions options = {}) : options_(options) {}

    /// One update of every parameter; throws if one has no gradient.
    void step(nn::ParamStore<T>& params, double lr);

    std::uint64_t steps() const { return steps_; }
    void set_steps(std::uint64_t s) { steps_ = s; }
    const AdamWOptions& options() const { return options_; }
    std::map<std::string, Moments>& moments() { return moments_; }
    const std::map<std::string, Moments>& moments() const { return moments_; }

  private:
    AdamWOptions options_;
    std::uint64_t steps_ = 0;
    std::map<std::string, Moments> moments_;
};

// Checkpoint file (little-endian):
//   "MMCK" | version u32 | count u32 | count x tensor
//   tensor: name_len u32 | name | rank u32 | dims u32[rank] | f32 payload
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<float> data;
    bool operator==(const NamedTensor&) const = default;
};

struct Checkpoint {
    std::vector<NamedTensor> tensors;

    const NamedTensor* find(const std::string& name) const;
    bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
/// Throws kBadMagic, kUnsupportedVersion or kTruncatedPayload.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Integers and text stored as tensors of exactly representable floats.
NamedTensor pack_u64(const std::string& name, std::uint64_t value);
std::uint64_t unpack_u64(const NamedTensor& t);
NamedTensor pack_text(const std::string& name, const std::string& text);
std::string unpack_text(const NamedTensor& t);

/// The training configuration echoed into a checkpoint.
TrainConfig checkpoint_config(const Checkpoint& ckpt);

struct EpochRecord {
    std::size_t epoch = 0;
    std::uint64_t step = 0;  // optimizer steps completed
    double loss = 0;         // mean per-pixel training MSE over the epoch's batches
    double lr = 0;
};

struct RunHooks {
    /// Receives one "epoch=<e> step=<s> loss=<v> lr=<v>" line per epoch.
    std::ostream* log = nullptr;
    /// Periodic and final checkpoints go here when non-empty.
    std::string out_dir;
    std::function<void(std::uint64_t step, double loss)> on_step;
    /// Checked before every step; returning true ends the run early.
    std::function<bool()> should_stop;
};

/// Single-threaded, deterministic trainer. Clip k of a batch is frames
/// [0, T) as input and [T, T + T') as target of its sequence.
class Trainer {
  public:
    Trainer(const TrainConfig& config, data::SequenceDataset train_set);

    /// Runs until total_epochs or max_steps, whichever comes first.
    std::vector<EpochRecord> run(const RunHooks& hooks = {});

    Checkpoint checkpoint() const;
    /// Restores parameters, optimizer state and position. The checkpoint's
    /// tensors must match this model's layout.
    void restore(const Checkpoint& ckpt);

    Model<float>& model() { return model_; }
    const Model<float>& model() const { return model_; }
    const AdamW<float>& optimizer() const { return optimizer_; }
    const TrainConfig& config() const { return config_; }
    std::uint64_t step() const { return step_; }
    std::size_t steps_per_epoch() const;

  private:
    /// Sequence order for one epoch.
    std::vector<std::size_t> epoch_order(std::size_t epoch) const;
    double train_step(const std::vector<std::size_t>& seqs, double lr);

    TrainConfig config_;
    data::SequenceDataset train_set_;
    Model<float> model_;
    AdamW<float> optimizer_;
    std::uint64_t step_ = 0;
};

/// Loads parameters from a checkpoint into a model built from the echoed
/// configuration.
Model<float> model_from_checkpoint(const Checkpoint& ckpt);

/// Each output sequence holds the first T frames of the input followed by the
/// T' predicted frames, stored as bytes. threads = 0 picks the hardware
/// concurrency.
data::SequenceDataset predict_dataset(const Model<float>& model, const data::SequenceDataset& ds,
                                      std::size_t threads = 1);

/// Scores the model and the repeat-last-frame baseline on every sequence.
metrics::Evaluation evaluate_model(const Model<float>& model, const data::SequenceDataset& ds,
                                   std::size_t threads = 1);

}  // namespace mmvp::train
