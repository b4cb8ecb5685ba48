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


// Command-line front end over the C API: gen, train, predict, eval and
// dump-matrices. Exits 0 on success, 1 with a one-line error otherwise.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmvp/mmvp.h"

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(mmvp_status status) {
    if (status != MMVP_OK) throw Failure(std::string(mmvp_status_name(status)) + ": " + mmvp_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<mmvp_dataset, Deleter<mmvp_dataset, mmvp_dataset_free>>;
using Config = std::unique_ptr<mmvp_config, Deleter<mmvp_config, mmvp_config_free>>;
using Trainer = std::unique_ptr<mmvp_trainer, Deleter<mmvp_trainer, mmvp_trainer_free>>;
using Model = std::unique_ptr<mmvp_model, Deleter<mmvp_model, mmvp_model_free>>;
using String = std::unique_ptr<char, Deleter<char, mmvp_string_free>>;

Dataset read_dataset(const std::string& path) {
    mmvp_dataset* ds = nullptr;
    check(mmvp_dataset_read(path.c_str(), &ds));
    return Dataset(ds);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw Failure("io: cannot write " + path);
}

void print_summary(const char* label, const nlohmann::json& r) {
    auto num = [](const nlohmann::json& v) { return v.is_number() ? v.get<double>() : 0.0; };
    std::printf("%s psnr=%.4f ssim=%.4f mse_sum=%.4f easy=%d intermediate=%d hard=%d\n", label, num(r["psnr"]),
                num(r["ssim"]), num(r["mse_sum"]), r["counts"]["easy"].get<int>(),
                r["counts"]["intermediate"].get<int>(), r["counts"]["hard"].get<int>());
}

struct GenArgs {
    std::string out;
    std::uint32_t seqs = 0, len = 0, height = 64, width = 64, sprites = 2, threads = 0;
    std::uint64_t seed = 0;
};

void run_gen(const GenArgs& a) {
    mmvp_dataset* ds = nullptr;
    check(mmvp_dataset_generate(a.seed, a.seqs, a.len, a.height, a.width, a.sprites, a.threads, &ds));
    Dataset owned(ds);
    check(mmvp_dataset_write(ds, a.out.c_str()));
    std::printf("wrote %u sequences of %u frames (%ux%u) to %s\n", a.seqs, a.len, a.height, a.width, a.out.c_str());
}

struct TrainArgs {
    std::string config, data, val, out, resume;
};

void log_line(const char* line, void*) {
    std::printf("%s\n", line);
    std::fflush(stdout);
}

void run_train(const TrainArgs& a) {
    mmvp_config* cfg = nullptr;
    check(mmvp_config_load(a.config.c_str(), &cfg));
    Config config(cfg);
    char* echo = nullptr;
    check(mmvp_config_to_json(cfg, &echo));
    std::printf("config %s\n", nlohmann::json::parse(String(echo).get()).dump().c_str());

    const std::string data = a.data.empty() ? mmvp_config_train_data(cfg) : a.data;
    const std::string val = a.val.empty() ? mmvp_config_val_data(cfg) : a.val;
    if (data.empty()) throw Failure("invalid_argument: no training data (--data or train_data)");
    Dataset train = read_dataset(data);

    mmvp_trainer* tr = nullptr;
    check(mmvp_trainer_create(cfg, train.get(), &tr));
    Trainer trainer(tr);
    if (!a.resume.empty()) {
        check(mmvp_trainer_resume(tr, a.resume.c_str()));
        std::printf("resumed from %s at step %llu\n", a.resume.c_str(),
                    static_cast<unsigned long long>(mmvp_trainer_steps(tr)));
    }
    check(mmvp_trainer_run(tr, a.out.c_str(), log_line, nullptr, nullptr));
    std::printf("checkpoint %s\n", (std::filesystem::path(a.out) / "final.mmck").string().c_str());

    if (!val.empty()) {
        Dataset val_set = read_dataset(val);
        mmvp_model* m = nullptr;
        check(mmvp_trainer_model(tr, &m));
        Model model(m);
        char* report = nullptr;
        check(mmvp_model_evaluate(m, val_set.get(), mmvp_config_eval_threads(cfg), &report));
        String owned(report);
        const std::string path = (std::filesystem::path(a.out) / "val_report.json").string();
        write_text(path, report);
        const auto doc = nlohmann::json::parse(report);
        print_summary("val model", doc["model"]);
        print_summary("val baseline", doc["baseline"]);
        std::printf("report %s\n", path.c_str());
    }
}

struct PredictArgs {
    std::string ckpt, data, out;
    std::uint32_t threads = 0;
};

void run_predict(const PredictArgs& a) {
    mmvp_model* m = nullptr;
    check(mmvp_model_load(a.ckpt.c_str(), &m));
    Model model(m);
    Dataset ds = read_dataset(a.data);
    mmvp_dataset* pred = nullptr;
    check(mmvp_model_predict(m, ds.get(), a.threads, &pred));
    Dataset owned(pred);
    check(mmvp_dataset_write(pred, a.out.c_str()));
    mmvp_dataset_info info{};
    check(mmvp_dataset_get_info(pred, &info));
    std::printf("wrote %u predicted sequences of %u frames to %s\n", info.num_sequences, info.seq_len, a.out.c_str());
}

struct EvalArgs {
    std::string pred, gt, report;
    std::uint32_t t = 0;
};

void run_eval(const EvalArgs& a) {
    Dataset pred = read_dataset(a.pred), gt = read_dataset(a.gt);
    char* report = nullptr;
    check(mmvp_eval_datasets(pred.get(), gt.get(), a.t, &report));
    String owned(report);
    write_text(a.report, report);
    print_summary("eval", nlohmann::json::parse(report));
}

struct DumpArgs {
    std::string ckpt, data, patch, out;
    std::uint32_t seq = 0;
};

void run_dump(const DumpArgs& a) {
    unsigned h = 0, w = 0;
    char tail = 0;
    if (std::sscanf(a.patch.c_str(), "%u,%u%c", &h, &w, &tail) != 2) {
        throw Failure("invalid_argument: --patch expects <h>,<w>, got \"" + a.patch + "\"");
    }
    Dataset ds = read_dataset(a.data);
    std::uint32_t written = 0;
    check(mmvp_dump_matrices(a.ckpt.c_str(), ds.get(), a.seq, h, w, a.out.c_str(), &written));
    std::printf("wrote %u heatmaps to %s\n", written, a.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion-matrix video prediction"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a bouncing-sprite dataset");
    g->add_option("--out", gen.out, "Output dataset path")->required();
    g->add_option("--seqs", gen.seqs, "Number of sequences")->required();
    g->add_option("--len", gen.len, "Frames per sequence")->required();
    g->add_option("--height", gen.height, "Frame height")->required();
    g->add_option("--width", gen.width, "Frame width")->required();
    g->add_option("--sprites", gen.sprites, "Sprites per sequence")->required();
    g->add_option("--seed", gen.seed, "Generator seed")->required();
    g->add_option("--threads", gen.threads, "Worker threads (0: all cores)");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a model");
    t->add_option("--config", tr.config, "JSON training configuration")->required();
    t->add_option("--data", tr.data, "Training dataset (default: train_data)");
    t->add_option("--val", tr.val, "Validation dataset (default: val_data)");
    t->add_option("--out", tr.out, "Output directory for checkpoints and reports")->required();
    t->add_option("--resume", tr.resume, "Checkpoint to resume from");

    PredictArgs pr;
    auto* p = app.add_subcommand("predict", "Predict future frames of every sequence");
    p->add_option("--ckpt", pr.ckpt, "Checkpoint")->required();
    p->add_option("--data", pr.data, "Input dataset")->required();
    p->add_option("--out", pr.out, "Output dataset of observed plus predicted frames")->required();
    p->add_option("--threads", pr.threads, "Worker threads (0: all cores)");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Score predictions against ground truth");
    e->add_option("--pred", ev.pred, "Predicted dataset")->required();
    e->add_option("--gt", ev.gt, "Ground-truth dataset")->required();
    e->add_option("--t", ev.t, "Number of observed frames")->required();
    e->add_option("--report", ev.report, "Output JSON report")->required();

    DumpArgs du;
    auto* d = app.add_subcommand("dump-matrices", "Write motion-matrix heatmaps as PGM");
    d->add_option("--ckpt", du.ckpt, "Checkpoint")->required();
    d->add_option("--data", du.data, "Dataset")->required();
    d->add_option("--seq", du.seq, "Sequence index")->required();
    d->add_option("--patch", du.patch, "Source patch as <h>,<w> on the matrix grid")->required();
    d->add_option("--out", du.out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*g) run_gen(gen);
        if (*t) run_train(tr);
        if (*p) run_predict(pr);
        if (*e) run_eval(ev);
        if (*d) run_dump(du);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
