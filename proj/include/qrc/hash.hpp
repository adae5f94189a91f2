// Copyright 2026 The qrc-forecast authors.
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

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace qrc {

/// Streaming FNV-1a (64-bit). Content hashes for cache keys and the run
/// manifest; not cryptographic.
class Hasher {
  public:
    void update(const void* bytes, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }

    void update(const std::string& s) { update(s.data(), s.size()); }

    void update_u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        update(b, 8);
    }

    void update_double(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        update_u64(bits);
    }

    void update_doubles(const std::vector<double>& v) {
        for (double x : v) update_double(x);
    }

    std::uint64_t digest() const { return h_; }

    std::string hex() const {
        static const char* d = "0123456789abcdef";
        std::string out(16, '0');
        for (int i = 0; i < 16; ++i) out[15 - i] = d[(h_ >> (4 * i)) & 0xf];
        return out;
    }

  private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hash_file_hex(const std::string& path);

}  // namespace qrc
