#pragma once

#include "pairmatch/distance.hpp"
#include "pairmatch/matcher.hpp"
#include "pairmatch/selection.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace pairmatch {

/// Unit CSV: header `id,<cov1>,...,<covp>`, then one unit per row. Rows and
/// columns in ParseError are 1-based and count the header as row 1.
UnitTable read_unit_csv(std::istream& in);
UnitTable read_unit_csv(const std::filesystem::path& path);

/// Square weight matrix, one row per line, no header.
DistanceMatrix read_matrix_csv(std::istream& in);
DistanceMatrix read_matrix_csv(const std::filesystem::path& path);

/// `pair_index,id_a,id_b,distance`, pairs by ascending distance (ties by
/// index). Appends `# total_distance=<value>` when with_total is set.
void write_pair_csv(std::ostream& out, const PairSet& pairs, const DistanceMatrix& d,
                    const std::vector<std::string>& ids, bool with_total);

/// `node_a,node_b,weight` rows followed by `# total_weight=<value>`.
void write_matching_csv(std::ostream& out, const Matching& matching, const DistanceMatrix& d);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal form.
std::string format_real(double x);

}  // namespace pairmatch
