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

#include "qrc/columnar.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "qrc/hash.hpp"

namespace qrc {

namespace {

constexpr char kMagic[8] = {'Q', 'R', 'C', 'C', 'O', 'L', '1', '\n'};
constexpr std::uint32_t kSchemaVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "columnar I/O assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), 8);
}
void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::string get_str(std::istream& is) {
    std::uint32_t n = get_u32(is);
    if (n > (1u << 20)) throw std::runtime_error("columnar: unreasonable string length");
    std::string s(n, '\0');
    is.read(s.data(), n);
    return s;
}

}  // namespace

void ColumnarFile::save(const std::string& path) const {
    for (const auto& col : columns)
        if (col.size() != rows()) throw std::invalid_argument("columnar: ragged columns");
    if (columns.size() != column_names.size())
        throw std::invalid_argument("columnar: column/name count mismatch");

    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("columnar: cannot open " + tmp + " for writing");
        os.write(kMagic, 8);
        put_u32(os, kSchemaVersion);
        put_u32(os, static_cast<std::uint32_t>(columns.size()));
        put_u64(os, rows());
        for (const auto& name : column_names) put_str(os, name);
        put_u32(os, static_cast<std::uint32_t>(meta.size()));
        for (const auto& [k, v] : meta) {
            put_str(os, k);
            put_str(os, v);
        }
        for (const auto& col : columns)
            os.write(reinterpret_cast<const char*>(col.data()),
                     static_cast<std::streamsize>(col.size() * sizeof(double)));
        if (!os) throw std::runtime_error("columnar: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("columnar: rename failed for " + path);
}

ColumnarFile ColumnarFile::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("columnar: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("columnar: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kSchemaVersion)
        throw std::runtime_error("columnar: unsupported schema version in " + path);
    const std::uint32_t ncols = get_u32(is);
    const std::uint64_t nrows = get_u64(is);

    ColumnarFile f;
    f.column_names.reserve(ncols);
    for (std::uint32_t c = 0; c < ncols; ++c) f.column_names.push_back(get_str(is));
    const std::uint32_t nmeta = get_u32(is);
    for (std::uint32_t m = 0; m < nmeta; ++m) {
        std::string k = get_str(is);
        f.meta[k] = get_str(is);
    }
    f.columns.assign(ncols, std::vector<double>(nrows));
    for (auto& col : f.columns)
        is.read(reinterpret_cast<char*>(col.data()),
                static_cast<std::streamsize>(nrows * sizeof(double)));
    if (!is) throw std::runtime_error("columnar: truncated file " + path);
    return f;
}

std::string hash_file_hex(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for hashing: " + path);
    Hasher h;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        h.update(buf, static_cast<std::size_t>(is.gcount()));
    }
    return h.hex();
}

}  // namespace qrc
