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
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "mmvp/error.hpp"
#include "mmvp/train.hpp"

namespace mmvp::train {

namespace {

using nlohmann::json;

// Seeds get their own alternative: std::uint64_t may alias std::size_t.
struct SeedRef {
    std::uint64_t* value;
};

using Field = std::variant<std::size_t*, SeedRef, double*, bool*, std::string*, std::vector<double>*>;

std::vector<std::pair<const char*, Field>> fields(TrainConfig& c) {
    ModelConfig& m = c.model;
    return {
        {"H", &m.H},
        {"W", &m.W},
        {"C_in", &m.C_in},
        {"T", &m.T},
        {"T_prime", &m.T_prime},
        {"C_img", &m.C_img},
        {"C_motion", &m.C_motion},
        {"S", &m.S},
        {"scales", &m.scales},
        {"include_image", &m.include_image},
        {"average_composition", &m.average_composition},
        {"use_filter", &m.use_filter},
        {"lr_max", &c.lr_max},
        {"lr_min", &c.lr_min},
        {"restart_period", &c.restart_period},
        {"batch_size", &c.batch_size},
        {"total_epochs", &c.total_epochs},
        {"max_steps", &c.max_steps},
        {"weight_decay", &c.weight_decay},
        {"beta1", &c.beta1},
        {"beta2", &c.beta2},
        {"eps", &c.eps},
        {"seed", SeedRef{&c.seed}},
        {"checkpoint_every", &c.checkpoint_every},
        {"eval_threads", &c.eval_threads},
        {"train_data", &c.train_data},
        {"val_data", &c.val_data},
    };
}

[[noreturn]] void type_error(const std::string& key, const char* expected, const json& value) {
    fail(ErrorCode::kTypeMismatch,
         "config key \"" + key + "\" expects " + expected + ", got " + std::string(value.type_name()) + " " + value.dump());
}

double as_number(const std::string& key, const json& v) {
    if (!v.is_number()) type_error(key, "a number", v);
    return v.get<double>();
}

template <typename Target>
void assign_to(const std::string& key, const json& v, Target* target) {
    if constexpr (std::is_same_v<Target, bool>) {
        if (!v.is_boolean()) type_error(key, "a boolean", v);
        *target = v.get<bool>();
    } else if constexpr (std::is_same_v<Target, double>) {
        *target = as_number(key, v);
    } else if constexpr (std::is_same_v<Target, std::string>) {
        if (!v.is_string()) type_error(key, "a string", v);
        *target = v.get<std::string>();
    } else if constexpr (std::is_same_v<Target, std::vector<double>>) {
        if (!v.is_array()) type_error(key, "an array of numbers", v);
        target->clear();
        for (const auto& e : v) target->push_back(as_number(key, e));
    } else {
        if (!v.is_number_unsigned()) type_error(key, "a non-negative integer", v);
        *target = v.get<Target>();
    }
}

void assign(const std::string& key, const json& v, const Field& field) {
    std::visit(
        [&](auto target) {
            if constexpr (std::is_same_v<decltype(target), SeedRef>) {
                assign_to(key, v, target.value);
            } else {
                assign_to(key, v, target);
            }
        },
        field);
}

[[noreturn]] void invalid(const std::string& msg) { fail(ErrorCode::kConfigInvalid, "invalid config: " + msg); }

}  // namespace

void TrainConfig::validate() const {
    model.validate();
    if (!(lr_min >= 0 && lr_min < lr_max)) invalid("need 0 <= lr_min < lr_max");
    if (restart_period < 1) invalid("restart_period must be at least 1");
    if (batch_size < 1) invalid("batch_size must be at least 1");
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) invalid("beta1 and beta2 must lie in [0, 1)");
    if (!(eps > 0)) invalid("eps must be positive");
    if (!(weight_decay >= 0)) invalid("weight_decay must be non-negative");
}

TrainConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kTypeMismatch, std::string("config is not valid JSON: ") + e.what());
    }
    if (doc.is_null()) doc = json::object();
    if (!doc.is_object()) fail(ErrorCode::kTypeMismatch, "config must be a JSON object");
    TrainConfig config;
    const auto table = fields(config);
    for (const auto& [key, value] : doc.items()) {
        auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return key == f.first; });
        if (it == table.end()) fail(ErrorCode::kUnknownKey, "unknown config key \"" + key + "\"");
        assign(key, value, it->second);
    }
    config.validate();
    return config;
}

TrainConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open config " + path);
    std::ostringstream text;
    text << in.rdbuf();
    const std::string s = text.str();
    // An empty file is an empty document.
    return parse_config(s.find_first_not_of(" \t\r\n") == std::string::npos ? "{}" : s);
}

std::string config_json(const TrainConfig& config) {
    TrainConfig copy = config;
    json doc = json::object();
    for (const auto& [key, field] : fields(copy)) {
        std::visit(
            [&](auto target) {
                if constexpr (std::is_same_v<decltype(target), SeedRef>) {
                    doc[key] = *target.value;
                } else {
                    doc[key] = *target;
                }
            },
            field);
    }
    return doc.dump(2);
}

double lr_schedule(std::size_t epoch, const TrainConfig& config) {
    const double t = double(epoch % config.restart_period);
    const double pi = std::acos(-1.0);
    return config.lr_min +
           0.5 * (config.lr_max - config.lr_min) * (1.0 + std::cos(pi * t / double(config.restart_period)));
}

}  // namespace mmvp::train
