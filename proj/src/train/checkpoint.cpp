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


#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mmvp/error.hpp"
#include "mmvp/train.hpp"

namespace mmvp::train {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'C', 'K'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
  public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    void need(std::size_t n, const std::string& what) const {
        if (bytes_.size() - pos_ < n) truncated(what);
    }
    [[noreturn]] void truncated(const std::string& what) const {
        fail(ErrorCode::kTruncatedPayload, "checkpoint truncated while reading " + what + " at byte " +
                                               std::to_string(pos_) + " of " + std::to_string(bytes_.size()));
    }
    std::uint32_t u32(const std::string& what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    const std::uint8_t* take(std::size_t n, const std::string& what) {
        need(n, what);
        const std::uint8_t* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

const NamedTensor* Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return &t;
    return nullptr;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& t : ckpt.tensors) {
        if (shape_numel(t.shape) != t.data.size()) {
            fail(ErrorCode::kShapeMismatch, "checkpoint tensor " + t.name + " has " + std::to_string(t.data.size()) +
                                                " values for shape " + shape_str(t.shape));
        }
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.insert(out.end(), t.name.begin(), t.name.end());
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
        for (float v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        fail(ErrorCode::kBadMagic, "not a checkpoint: missing MMCK magic");
    }
    Reader r(bytes);
    r.take(4, "magic");
    const std::uint32_t version = r.u32("version");
    if (version != kCheckpointVersion) {
        fail(ErrorCode::kUnsupportedVersion, "unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32("tensor count");
    Checkpoint ckpt;
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::string where = "tensor " + std::to_string(k);
        NamedTensor t;
        const std::uint32_t name_len = r.u32(where + " name length");
        const auto* name = r.take(name_len, where + " name");
        t.name.assign(reinterpret_cast<const char*>(name), name_len);
        const std::uint32_t rank = r.u32(t.name + " rank");
        r.need(std::size_t(rank) * 4, t.name + " dims");
        std::size_t numel = 1;
        for (std::uint32_t axis = 0; axis < rank; ++axis) {
            const std::size_t d = r.u32(t.name + " dims");
            t.shape.push_back(d);
            numel = (d != 0 && numel > SIZE_MAX / d) ? SIZE_MAX : numel * d;
        }
        if (numel > r.remaining() / 4) r.truncated(t.name + " payload");
        const auto* p = r.take(numel * 4, t.name + " payload");
        t.data.resize(numel);
        for (std::size_t i = 0; i < numel; ++i) {
            std::uint32_t v = 0;
            for (int b = 0; b < 4; ++b) v |= std::uint32_t(p[4 * i + b]) << (8 * b);
            t.data[i] = std::bit_cast<float>(v);
        }
        ckpt.tensors.push_back(std::move(t));
    }
    if (r.remaining() != 0) {
        fail(ErrorCode::kTruncatedPayload,
             "checkpoint has " + std::to_string(r.remaining()) + " bytes after the declared tensors");
    }
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const auto bytes = encode_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write checkpoint " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open checkpoint " + path);
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return decode_checkpoint(bytes);
}

NamedTensor pack_u64(const std::string& name, std::uint64_t value) {
    // Four 16-bit limbs, low first; each is exact in float.
    NamedTensor t{name, {4}, {}};
    for (int i = 0; i < 4; ++i) t.data.push_back(static_cast<float>((value >> (16 * i)) & 0xFFFF));
    return t;
}

std::uint64_t unpack_u64(const NamedTensor& t) {
    if (t.shape != Shape{4}) fail(ErrorCode::kShapeMismatch, "checkpoint counter " + t.name + " must have shape [4]");
    std::uint64_t v = 0;
    for (int i = 0; i < 4; ++i) {
        const float limb = t.data[i];
        if (!(limb >= 0 && limb <= 65535 && limb == float(std::uint32_t(limb)))) {
            fail(ErrorCode::kInvalidArgument, "checkpoint counter " + t.name + " is corrupt");
        }
        v |= std::uint64_t(limb) << (16 * i);
    }
    return v;
}

NamedTensor pack_text(const std::string& name, const std::string& text) {
    NamedTensor t{name, {text.size()}, {}};
    for (unsigned char c : text) t.data.push_back(static_cast<float>(c));
    return t;
}

std::string unpack_text(const NamedTensor& t) {
    std::string s;
    for (float v : t.data) {
        if (!(v >= 0 && v <= 255)) fail(ErrorCode::kInvalidArgument, "checkpoint text " + t.name + " is corrupt");
        s.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
    return s;
}

TrainConfig checkpoint_config(const Checkpoint& ckpt) {
    const NamedTensor* t = ckpt.find("meta/config");
    if (!t) fail(ErrorCode::kInvalidArgument, "checkpoint has no meta/config entry");
    return parse_config(unpack_text(*t));
}

}  // namespace mmvp::train
