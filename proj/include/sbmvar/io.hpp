#pragma once

// Text formats:
//   edge list   "i<TAB>j" per line, 1-based ids, undirected, duplicates ignored
//   mask file   same format listing observed pairs; a lone "*" means fully observed
//   matrix CSV  full n x n matrix, one row per line
//   labels CSV  header "node,label", 1-based

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sbmvar/netcore.hpp"

namespace sbmvar::io {

struct EdgeList {
  int n = 0;  // largest node id seen, or the caller-supplied size
  std::vector<std::pair<int, int>> pairs;  // 0-based, i < j, deduplicated
  bool all = false;  // "*" file
};

/// Throws kData with "<source>:<line>: ..." on malformed lines, self-loops or
/// ids beyond `n` (when given).
EdgeList parse_edge_list(std::istream& in, const std::string& source, bool allow_star,
                         std::optional<int> n = std::nullopt);
EdgeList read_edge_list(const std::filesystem::path& path, bool allow_star,
                        std::optional<int> n = std::nullopt);

AdjacencyMatrix to_adjacency(const EdgeList& list, int n);
SamplingMask to_mask(const EdgeList& list, int n);

void write_edge_list(std::ostream& out, const BinarySymMatrix& m);
/// Writes "*" when the mask is full.
void write_mask(std::ostream& out, const SamplingMask& m);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& source);

void write_labels_csv(std::ostream& out, const LabelAssignment& z);

/// Opens for writing or throws kIo.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace sbmvar::io
