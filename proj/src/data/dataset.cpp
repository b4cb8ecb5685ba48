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

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mmvp/data.hpp"
#include "mmvp/error.hpp"

namespace mmvp::data {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'V', 'P'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

}  // namespace

std::uint8_t to_byte(double v) {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

SequenceDataset SequenceDataset::allocate(std::uint32_t num_sequences, std::uint32_t seq_len, std::uint32_t height,
                                          std::uint32_t width, std::uint32_t channels) {
    SequenceDataset ds;
    ds.num_sequences = num_sequences;
    ds.seq_len = seq_len;
    ds.height = height;
    ds.width = width;
    ds.channels = channels;
    ds.pixels.assign(std::size_t(num_sequences) * ds.sequence_size(), 0);
    return ds;
}

std::span<const std::uint8_t> SequenceDataset::frame(std::size_t seq, std::size_t t) const {
    if (seq >= num_sequences || t >= seq_len) {
        fail(ErrorCode::kOutOfRange, "frame (" + std::to_string(seq) + ", " + std::to_string(t) + ") out of range");
    }
    return {pixels.data() + seq * sequence_size() + t * frame_size(), frame_size()};
}

std::span<std::uint8_t> SequenceDataset::mutable_frame(std::size_t seq, std::size_t t) {
    if (seq >= num_sequences || t >= seq_len) {
        fail(ErrorCode::kOutOfRange, "frame (" + std::to_string(seq) + ", " + std::to_string(t) + ") out of range");
    }
    return {pixels.data() + seq * sequence_size() + t * frame_size(), frame_size()};
}

template <typename T>
Tensor<T> SequenceDataset::clip(const std::vector<std::size_t>& seqs, std::size_t t0, std::size_t count) const {
    if (seqs.empty() || count == 0) fail(ErrorCode::kInvalidArgument, "clip needs at least one sequence and frame");
    if (t0 + count > seq_len) {
        fail(ErrorCode::kOutOfRange, "clip frames [" + std::to_string(t0) + ", " + std::to_string(t0 + count) +
                                         ") exceed sequence length " + std::to_string(seq_len));
    }
    std::vector<T> values;
    values.reserve(seqs.size() * count * frame_size());
    for (auto s : seqs)
        for (std::size_t t = t0; t < t0 + count; ++t)
            for (auto b : frame(s, t)) values.push_back(static_cast<T>(b) / T(255));
    return Tensor<T>({seqs.size(), count, channels, height, width}, std::move(values));
}

template Tensor<float> SequenceDataset::clip<float>(const std::vector<std::size_t>&, std::size_t, std::size_t) const;
template Tensor<double> SequenceDataset::clip<double>(const std::vector<std::size_t>&, std::size_t,
                                                      std::size_t) const;

std::vector<std::uint8_t> encode_dataset(const SequenceDataset& ds) {
    if (ds.pixels.size() != std::size_t(ds.num_sequences) * ds.sequence_size()) {
        fail(ErrorCode::kInvalidArgument, "dataset pixel buffer does not match its header");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + ds.pixels.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kFormatVersion);
    put_u32(out, ds.num_sequences);
    put_u32(out, ds.seq_len);
    put_u32(out, ds.height);
    put_u32(out, ds.width);
    put_u32(out, ds.channels);
    out.push_back(kDtypeU8);
    out.insert(out.end(), ds.pixels.begin(), ds.pixels.end());
    return out;
}

SequenceDataset decode_dataset(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        fail(ErrorCode::kBadMagic, "bad magic: not an MMVP dataset file");
    }
    if (bytes.size() < kHeaderBytes) fail(ErrorCode::kTruncatedPayload, "truncated payload: header incomplete");
    const std::uint8_t* p = bytes.data() + 4;
    const std::uint32_t version = get_u32(p);
    if (version != kFormatVersion) {
        fail(ErrorCode::kUnsupportedVersion, "unsupported dataset version " + std::to_string(version));
    }
    SequenceDataset ds;
    ds.num_sequences = get_u32(p + 4);
    ds.seq_len = get_u32(p + 8);
    ds.height = get_u32(p + 12);
    ds.width = get_u32(p + 16);
    ds.channels = get_u32(p + 20);
    const std::uint8_t dtype = p[24];
    if (dtype != kDtypeU8) fail(ErrorCode::kUnsupportedDtype, "unsupported dataset dtype " + std::to_string(dtype));
    const std::size_t expected = std::size_t(ds.num_sequences) * ds.sequence_size();
    const std::size_t actual = bytes.size() - kHeaderBytes;
    if (actual != expected) {
        fail(ErrorCode::kTruncatedPayload, "truncated payload: header declares " + std::to_string(expected) +
                                               " bytes, file holds " + std::to_string(actual));
    }
    ds.pixels.assign(bytes.begin() + kHeaderBytes, bytes.end());
    return ds;
}

void write_dataset(const SequenceDataset& ds, const std::string& path) {
    const auto bytes = encode_dataset(ds);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

SequenceDataset read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return decode_dataset(bytes);
    } catch (const Error& e) {
        fail(e.code(), path + ": " + e.what());
    }
}

}  // namespace mmvp::data
