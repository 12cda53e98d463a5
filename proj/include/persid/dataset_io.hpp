#pragma once

#include <filesystem>

#include "persid/domain.hpp"

namespace persid {

/// Writes one CSV per record (record_<i>.csv) and a manifest.json into
/// `dir`. Columns are t, u_0..u_{m-1}, y_0..y_{p-1}; discrete outputs use a
/// single y column. The u cells of the final row (t = T) are empty. Numbers
/// use 17 significant digits, so a write/read cycle is lossless.
void write_dataset(const std::filesystem::path& dir, const Dataset& data);

/// Inverse of write_dataset; regroups the records.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace persid
