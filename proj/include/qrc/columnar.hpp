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

#include <map>
#include <string>
#include <vector>

namespace qrc {

/// Versioned columnar container used for cached frames, windows and reservoir
/// features.
///
/// On-disk layout (all integers and floats little-endian):
///   bytes 0..7    magic "QRCCOL1\n"
///   u32           schema version (currently 1)
///   u32           column count C
///   u64           row count R
///   per column:   u32 name length, name bytes
///   u32           metadata entry count M
///   per entry:    u32 key length, key bytes, u32 value length, value bytes
///   C*R f64       column-major payload (column 0 rows, column 1 rows, ...)
struct ColumnarFile {
    std::vector<std::string> column_names;
    std::map<std::string, std::string> meta;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }

    /// Writes to a temp file then renames, so readers never see partial data.
    void save(const std::string& path) const;

    static ColumnarFile load(const std::string& path);
};

}  // namespace qrc
