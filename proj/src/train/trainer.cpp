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


#include <cstdio>
#include <filesystem>
#include <ostream>

#include "mmvp/error.hpp"
#include "mmvp/prng.hpp"
#include "mmvp/train.hpp"

namespace mmvp::train {

namespace {

// Separates the shuffle stream from the initialization stream of one seed.
constexpr std::uint64_t kShuffleStream = 0x53485546464C45ULL;

AdamWOptions adam_options(const TrainConfig& c) { return {c.beta1, c.beta2, c.eps, c.weight_decay}; }

void check_dataset(const TrainConfig& c, const data::SequenceDataset& ds) {
    const ModelConfig& m = c.model;
    if (ds.num_sequences == 0) fail(ErrorCode::kInvalidArgument, "training set is empty");
    if (ds.channels != m.C_in || ds.height != m.H || ds.width != m.W) {
        fail(ErrorCode::kShapeMismatch, "training frames are " + std::to_string(ds.channels) + "x" +
                                            std::to_string(ds.height) + "x" + std::to_string(ds.width) +
                                            " but the model expects " + std::to_string(m.C_in) + "x" +
                                            std::to_string(m.H) + "x" + std::to_string(m.W));
    }
    if (ds.seq_len < m.T + m.T_prime) {
        fail(ErrorCode::kInvalidArgument, "sequences of length " + std::to_string(ds.seq_len) +
                                              " are shorter than T + T' = " + std::to_string(m.T + m.T_prime));
    }
}

NamedTensor named(const std::string& name, const Shape& shape, std::span<const float> values) {
    return {name, shape, std::vector<float>(values.begin(), values.end())};
}

const NamedTensor& expect(const Checkpoint& ckpt, const std::string& name, const Shape& shape) {
    const NamedTensor* t = ckpt.find(name);
    if (!t) fail(ErrorCode::kShapeMismatch, "checkpoint lacks tensor " + name + " " + shape_str(shape));
    if (t->shape != shape) {
        fail(ErrorCode::kShapeMismatch, "checkpoint tensor " + name + " has shape " + shape_str(t->shape) +
                                            " but the model expects " + shape_str(shape));
    }
    return *t;
}

void load_params(nn::ParamStore<float>& params, const Checkpoint& ckpt) {
    std::size_t stored = 0;
    for (const auto& t : ckpt.tensors) stored += t.name.rfind("param/", 0) == 0;
    if (stored != params.items().size()) {
        for (const auto& t : ckpt.tensors) {
            if (t.name.rfind("param/", 0) == 0 && !params.contains(t.name.substr(6))) {
                fail(ErrorCode::kShapeMismatch, "checkpoint tensor " + t.name + " has no counterpart in the model");
            }
        }
    }
    for (const auto& [name, p] : params.items()) {
        const NamedTensor& t = expect(ckpt, "param/" + name, p.shape());
        Tensor<float> param = p;
        std::copy(t.data.begin(), t.data.end(), param.mutable_data().begin());
    }
}

}  // namespace

Trainer::Trainer(const TrainConfig& config, data::SequenceDataset train_set)
    : config_(config),
      train_set_(std::move(train_set)),
      model_((config.validate(), config.model), config.seed),
      optimizer_(adam_options(config)) {
    check_dataset(config_, train_set_);
}

std::size_t Trainer::steps_per_epoch() const {
    return (train_set_.num_sequences + config_.batch_size - 1) / config_.batch_size;
}

std::vector<std::size_t> Trainer::epoch_order(std::size_t epoch) const {
    std::vector<std::size_t> order(train_set_.num_sequences);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Prng rng(derive_seed(config_.seed ^ kShuffleStream, epoch));
    for (std::size_t i = order.size(); i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);
    return order;
}

double Trainer::train_step(const std::vector<std::size_t>& seqs, double lr) {
    const ModelConfig& m = config_.model;
    const Tensor<float> x = train_set_.clip<float>(seqs, 0, m.T);
    const Tensor<float> y = train_set_.clip<float>(seqs, m.T, m.T_prime);
    model_.params().zero_grad();
    Tape<float> tape;
    Tensor<float> loss;
    {
        TapeScope<float> scope(tape);
        loss = model_.forward(x, y).loss;
    }
    tape.backward(loss);
    optimizer_.step(model_.params(), lr);
    ++step_;
    return static_cast<double>(loss.item());
}

std::vector<EpochRecord> Trainer::run(const RunHooks& hooks) {
    if (!hooks.out_dir.empty()) std::filesystem::create_directories(hooks.out_dir);
    const std::size_t spe = steps_per_epoch(), batch = config_.batch_size, n = train_set_.num_sequences;
    auto save = [&](const std::string& file) {
        if (!hooks.out_dir.empty()) save_checkpoint((std::filesystem::path(hooks.out_dir) / file).string(), checkpoint());
    };
    auto step_limit_reached = [&] { return config_.max_steps != 0 && step_ >= config_.max_steps; };

    std::vector<EpochRecord> records;
    bool stopped = false;
    while (!stopped && step_ / spe < config_.total_epochs && !step_limit_reached()) {
        const std::size_t epoch = step_ / spe;
        const std::vector<std::size_t> order = epoch_order(epoch);
        const double lr = lr_schedule(epoch, config_);
        double loss_sum = 0;
        std::size_t batches = 0;
        for (std::size_t b = step_ % spe; b < spe; ++b) {
            if (step_limit_reached() || (hooks.should_stop && hooks.should_stop())) {
                stopped = true;
                break;
            }
            const std::vector<std::size_t> seqs(order.begin() + b * batch, order.begin() + std::min(n, (b + 1) * batch));
            double loss = 0;
            try {
                loss = train_step(seqs, lr);
            } catch (const Error& e) {
                fail(e.code(), "epoch " + std::to_string(epoch) + " batch " + std::to_string(b) + ": " + e.what());
            }
            loss_sum += loss;
            ++batches;
            if (hooks.on_step) hooks.on_step(step_, loss);
        }
        if (batches == 0) break;
        EpochRecord rec{epoch, step_, loss_sum / double(batches), lr};
        records.push_back(rec);
        if (hooks.log) {
            char line[160];
            std::snprintf(line, sizeof line, "epoch=%zu step=%llu loss=%.9g lr=%.9g", rec.epoch,
                          static_cast<unsigned long long>(rec.step), rec.loss, rec.lr);
            *hooks.log << line << std::endl;
        }
        const bool epoch_done = step_ % spe == 0;
        if (epoch_done && config_.checkpoint_every != 0 && (epoch + 1) % config_.checkpoint_every == 0) {
            save("epoch_" + std::to_string(epoch + 1) + ".mmck");
        }
    }
    save("final.mmck");
    return records;
}

Checkpoint Trainer::checkpoint() const {
    Checkpoint ckpt;
    for (const auto& [name, p] : model_.params().items()) ckpt.tensors.push_back(named("param/" + name, p.shape(), p.data()));
    for (const auto& [name, p] : model_.params().items()) {
        auto it = optimizer_.moments().find(name);
        if (it == optimizer_.moments().end()) continue;
        ckpt.tensors.push_back(named("adam_m/" + name, p.shape(), it->second.m));
        ckpt.tensors.push_back(named("adam_v/" + name, p.shape(), it->second.v));
    }
    ckpt.tensors.push_back(pack_u64("meta/step", step_));
    ckpt.tensors.push_back(pack_u64("meta/adam_steps", optimizer_.steps()));
    ckpt.tensors.push_back(pack_u64("meta/epoch", step_ / steps_per_epoch()));
    ckpt.tensors.push_back(pack_text("meta/config", config_json(config_)));
    return ckpt;
}

void Trainer::restore(const Checkpoint& ckpt) {
    load_params(model_.params(), ckpt);
    auto& moments = optimizer_.moments();
    moments.clear();
    for (const auto& [name, p] : model_.params().items()) {
        const bool has_m = ckpt.find("adam_m/" + name) != nullptr;
        if (!has_m && ckpt.find("adam_v/" + name) == nullptr) continue;
        const NamedTensor& m = expect(ckpt, "adam_m/" + name, p.shape());
        const NamedTensor& v = expect(ckpt, "adam_v/" + name, p.shape());
        moments[name] = {m.data, v.data};
    }
    const NamedTensor* step = ckpt.find("meta/step");
    const NamedTensor* adam_steps = ckpt.find("meta/adam_steps");
    if (!step || !adam_steps) fail(ErrorCode::kInvalidArgument, "checkpoint lacks the step counters");
    step_ = unpack_u64(*step);
    optimizer_.set_steps(unpack_u64(*adam_steps));
}

Model<float> model_from_checkpoint(const Checkpoint& ckpt) {
    const TrainConfig config = checkpoint_config(ckpt);
    Model<float> model(config.model, config.seed);
    load_params(model.params(), ckpt);
    return model;
}

}  // namespace mmvp::train
