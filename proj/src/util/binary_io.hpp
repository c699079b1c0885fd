/*
 * Copyright 2026 The spose Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "numerics/error.hpp"
#include "util/hash.hpp"

namespace spose {

// Little-endian encoder, independent of host byte order.
class ByteWriter {
   public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(std::string_view s) { buf_.append(s); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s);
    }

    // Appends the FNV-1a digest of everything written so far.
    void seal() { u64(fnv1a64(buf_)); }

    const std::string &buffer() const { return buf_; }

   private:
    std::string buf_;
};

// Bounds-checked decoder. Running past the end raises a checksum error,
// since a short read means the file was truncated.
class ByteReader {
   public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string_view bytes(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string str() { return std::string(bytes(u32())); }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

   private:
    void need(std::size_t n) {
        if (data_.size() - pos_ < n) fail(ErrorKind::checksum, "unexpected end of data (truncated file?)");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

// Verifies and strips the trailing 64-bit FNV-1a checksum.
inline std::string_view verify_sealed(std::string_view data, const std::string &what) {
    if (data.size() < 8) fail(ErrorKind::checksum, what + ": file too short");
    std::string_view body = data.substr(0, data.size() - 8);
    ByteReader tail(data.substr(data.size() - 8));
    if (tail.u64() != fnv1a64(body)) fail(ErrorKind::checksum, what + ": checksum mismatch");
    return body;
}

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &bytes);

}  // namespace spose
