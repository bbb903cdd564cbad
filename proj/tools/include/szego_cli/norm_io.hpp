#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "szego/kernel.hpp"
#include "szego_cli/config.hpp"

namespace szego::cli {

/// norms_<route>_k<k>.csv inside `dir`.
std::filesystem::path norm_table_path(const std::filesystem::path& dir, Route route, int k);

/// CSV text of a norm table: '#' metadata lines (tool version, config hash,
/// n, k, route, completeness, domain, quadrature) followed by the columns
/// j0,...,jn,log_norm,rel_err. Values use %.17g, so reading back is exact.
std::string format_norm_table(const NormTable& table, const RunConfig& config);

/// Reads a table written by format_norm_table. Returns nullopt when the file
/// is missing, belongs to another configuration, is incomplete, or does not
/// match n/k/route; a cached table is only reused when all of these agree.
std::optional<NormTable> read_cached_norm_table(const std::filesystem::path& path,
                                                const RunConfig& config, Route route, int k);

/// Writes `text` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace szego::cli
