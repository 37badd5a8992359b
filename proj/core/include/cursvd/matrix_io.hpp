#pragma once

#include "cursvd/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cursvd {

/// Parsed contents of a matrix file. The format is shared by model matrices
/// and observations:
///
///   k r family [param]        # header line
///   i j value                 # one line per nonzero entry, 0-indexed
///
/// Lines may be blank or start with '#' (comments); entries may appear in any
/// order but duplicates are rejected. Values are written with shortest
/// round-trip formatting, so write followed by read is bit-exact.
struct MatrixFileData {
  int k = 0;
  int r = 0;
  ModelKind kind = ModelKind::poisson();
  std::vector<Triplet> entries;
};

/// Reads a matrix file; parse failures throw std::runtime_error naming the
/// offending line number.
MatrixFileData read_matrix_file(const std::filesystem::path& path);
MatrixFileData read_matrix_stream(std::istream& in, const std::string& name);

void write_matrix_file(const std::filesystem::path& path, const ModelMatrix& m);
/// Observations carry no rank of their own; the header's r is passed through.
void write_matrix_file(const std::filesystem::path& path, const Observation& x, int r);
/// Raw estimate writer: same format, but entries may be negative, so the
/// result round-trips as MatrixFileData rather than as a validated model.
void write_estimate_file(const std::filesystem::path& path, const Eigen::MatrixXd& estimate,
                         int r, const ModelKind& kind);

ModelMatrix to_model_matrix(const MatrixFileData& data);
Observation to_observation(const MatrixFileData& data);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace cursvd
