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


#include "mmvp/mmvp.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <ostream>
#include <sstream>
#include <string>

#include "mmvp/data.hpp"
#include "mmvp/error.hpp"
#include "mmvp/metrics.hpp"
#include "mmvp/train.hpp"
#include "mmvp/viz.hpp"

struct mmvp_dataset {
    mmvp::data::SequenceDataset ds;
};
struct mmvp_config {
    mmvp::train::TrainConfig config;
};
struct mmvp_trainer {
    mmvp::train::Trainer trainer;
};
struct mmvp_model {
    mmvp::Model<float> model;
};

namespace {

thread_local std::string last_error;

mmvp_status record(mmvp_status status, const char* message) {
    last_error = message;
    return status;
}

template <typename Fn>
mmvp_status guard(Fn&& fn) {
    try {
        fn();
        return MMVP_OK;
    } catch (const mmvp::Error& e) {
        return record(static_cast<mmvp_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return record(MMVP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return record(MMVP_ERR_INTERNAL, e.what());
    } catch (...) {
        return record(MMVP_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (!p) mmvp::fail(mmvp::ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* mmvp_version(void) { return "1.0.0"; }

const char* mmvp_status_name(mmvp_status status) {
    if (status == MMVP_OK) return "ok";
    return mmvp::error_code_name(static_cast<mmvp::ErrorCode>(status));
}

const char* mmvp_last_error(void) { return last_error.c_str(); }

void mmvp_string_free(char* s) { std::free(s); }

mmvp_status mmvp_dataset_generate(uint64_t seed, uint32_t count, uint32_t seq_len, uint32_t height, uint32_t width,
                                  uint32_t sprites, uint32_t threads, mmvp_dataset** out) {
    return guard([&] {
        require(out, "out");
        *out = new mmvp_dataset{mmvp::data::generate_sequences(seed, count, seq_len, height, width, sprites, threads)};
    });
}

mmvp_status mmvp_dataset_read(const char* path, mmvp_dataset** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new mmvp_dataset{mmvp::data::read_dataset(path)};
    });
}

mmvp_status mmvp_dataset_write(const mmvp_dataset* ds, const char* path) {
    return guard([&] {
        require(ds, "dataset");
        require(path, "path");
        mmvp::data::write_dataset(ds->ds, path);
    });
}

mmvp_status mmvp_dataset_get_info(const mmvp_dataset* ds, mmvp_dataset_info* out) {
    return guard([&] {
        require(ds, "dataset");
        require(out, "out");
        *out = {ds->ds.num_sequences, ds->ds.seq_len, ds->ds.height, ds->ds.width, ds->ds.channels};
    });
}

mmvp_status mmvp_dataset_frame(const mmvp_dataset* ds, uint32_t seq, uint32_t t, const uint8_t** pixels) {
    return guard([&] {
        require(ds, "dataset");
        require(pixels, "pixels");
        if (seq >= ds->ds.num_sequences || t >= ds->ds.seq_len) {
            mmvp::fail(mmvp::ErrorCode::kOutOfRange, "frame (" + std::to_string(seq) + ", " + std::to_string(t) +
                                                         ") is out of range");
        }
        *pixels = ds->ds.frame(seq, t).data();
    });
}

void mmvp_dataset_free(mmvp_dataset* ds) { delete ds; }

mmvp_status mmvp_config_load(const char* path, mmvp_config** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        *out = new mmvp_config{mmvp::train::load_config(path)};
    });
}

mmvp_status mmvp_config_parse(const char* json, mmvp_config** out) {
    return guard([&] {
        require(json, "json");
        require(out, "out");
        *out = new mmvp_config{mmvp::train::parse_config(json)};
    });
}

mmvp_status mmvp_config_to_json(const mmvp_config* config, char** out) {
    return guard([&] {
        require(config, "config");
        require(out, "out");
        *out = copy_string(mmvp::train::config_json(config->config));
    });
}

const char* mmvp_config_train_data(const mmvp_config* config) { return config ? config->config.train_data.c_str() : ""; }

const char* mmvp_config_val_data(const mmvp_config* config) { return config ? config->config.val_data.c_str() : ""; }

uint32_t mmvp_config_eval_threads(const mmvp_config* config) {
    return config ? static_cast<uint32_t>(config->config.eval_threads) : 0;
}

void mmvp_config_free(mmvp_config* config) { delete config; }

mmvp_status mmvp_trainer_create(const mmvp_config* config, const mmvp_dataset* train, mmvp_trainer** out) {
    return guard([&] {
        require(config, "config");
        require(train, "train");
        require(out, "out");
        *out = new mmvp_trainer{mmvp::train::Trainer(config->config, train->ds)};
    });
}

mmvp_status mmvp_trainer_resume(mmvp_trainer* trainer, const char* checkpoint_path) {
    return guard([&] {
        require(trainer, "trainer");
        require(checkpoint_path, "checkpoint_path");
        trainer->trainer.restore(mmvp::train::load_checkpoint(checkpoint_path));
    });
}

namespace {

// Forwards std::ostream output to the log callback one line at a time.
class CallbackBuf : public std::stringbuf {
  public:
    CallbackBuf(mmvp_log_fn fn, void* user) : fn_(fn), user_(user) {}
    int sync() override {
        std::string text = str();
        std::size_t start = 0;
        for (std::size_t nl; (nl = text.find('\n', start)) != std::string::npos; start = nl + 1) {
            fn_(text.substr(start, nl - start).c_str(), user_);
        }
        str(text.substr(start));
        return 0;
    }

  private:
    mmvp_log_fn fn_;
    void* user_;
};

}  // namespace

mmvp_status mmvp_trainer_run(mmvp_trainer* trainer, const char* out_dir, mmvp_log_fn log, mmvp_stop_fn stop,
                             void* user) {
    return guard([&] {
        require(trainer, "trainer");
        CallbackBuf buf(log, user);
        std::ostream stream(&buf);
        mmvp::train::RunHooks hooks;
        if (log) hooks.log = &stream;
        if (out_dir) hooks.out_dir = out_dir;
        if (stop) hooks.should_stop = [&] { return stop(user) != 0; };
        trainer->trainer.run(hooks);
        stream.flush();
    });
}

mmvp_status mmvp_trainer_save(const mmvp_trainer* trainer, const char* path) {
    return guard([&] {
        require(trainer, "trainer");
        require(path, "path");
        mmvp::train::save_checkpoint(path, trainer->trainer.checkpoint());
    });
}

uint64_t mmvp_trainer_steps(const mmvp_trainer* trainer) { return trainer ? trainer->trainer.step() : 0; }

mmvp_status mmvp_trainer_model(const mmvp_trainer* trainer, mmvp_model** out) {
    return guard([&] {
        require(trainer, "trainer");
        require(out, "out");
        *out = new mmvp_model{mmvp::train::model_from_checkpoint(trainer->trainer.checkpoint())};
    });
}

void mmvp_trainer_free(mmvp_trainer* trainer) { delete trainer; }

mmvp_status mmvp_model_load(const char* checkpoint_path, mmvp_model** out) {
    return guard([&] {
        require(checkpoint_path, "checkpoint_path");
        require(out, "out");
        *out = new mmvp_model{mmvp::train::model_from_checkpoint(mmvp::train::load_checkpoint(checkpoint_path))};
    });
}

mmvp_status mmvp_model_get_info(const mmvp_model* model, mmvp_model_info* out) {
    return guard([&] {
        require(model, "model");
        require(out, "out");
        const mmvp::ModelConfig& c = model->model.config();
        *out = {static_cast<uint32_t>(c.H),       static_cast<uint32_t>(c.W),       static_cast<uint32_t>(c.C_in),
                static_cast<uint32_t>(c.T),       static_cast<uint32_t>(c.T_prime), static_cast<uint32_t>(c.S),
                model->model.count_params().total};
    });
}

mmvp_status mmvp_model_predict(const mmvp_model* model, const mmvp_dataset* ds, uint32_t threads, mmvp_dataset** out) {
    return guard([&] {
        require(model, "model");
        require(ds, "dataset");
        require(out, "out");
        *out = new mmvp_dataset{mmvp::train::predict_dataset(model->model, ds->ds, threads)};
    });
}

mmvp_status mmvp_model_evaluate(const mmvp_model* model, const mmvp_dataset* ds, uint32_t threads, char** report_json) {
    return guard([&] {
        require(model, "model");
        require(ds, "dataset");
        require(report_json, "report_json");
        *report_json = copy_string(mmvp::metrics::evaluation_json(mmvp::train::evaluate_model(model->model, ds->ds, threads)));
    });
}

void mmvp_model_free(mmvp_model* model) { delete model; }

mmvp_status mmvp_eval_datasets(const mmvp_dataset* pred, const mmvp_dataset* gt, uint32_t t_observed,
                               char** report_json) {
    return guard([&] {
        require(pred, "pred");
        require(gt, "gt");
        require(report_json, "report_json");
        *report_json =
            copy_string(mmvp::metrics::report_json(mmvp::metrics::score_datasets(pred->ds, gt->ds, t_observed), t_observed));
    });
}

mmvp_status mmvp_dump_matrices(const char* checkpoint_path, const mmvp_dataset* ds, uint32_t seq, uint32_t h,
                               uint32_t w, const char* out_dir, uint32_t* files_written) {
    return guard([&] {
        require(checkpoint_path, "checkpoint_path");
        require(ds, "dataset");
        require(out_dir, "out_dir");
        const auto files = mmvp::viz::dump_heatmaps(mmvp::train::load_checkpoint(checkpoint_path), ds->ds, seq, h, w, out_dir);
        if (files_written) *files_written = static_cast<uint32_t>(files.heatmaps.size());
    });
}

}  // extern "C"
