#include "cursvd/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace cursvd {
namespace {

[[noreturn]] void fail_line(const std::string& name, int line_no, const std::string& reason) {
  std::ostringstream msg;
  msg << name << ":" << line_no << ": " << reason;
  throw std::runtime_error(msg.str());
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& tok, int& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

void write_triplets(std::ostream& out, const std::vector<Triplet>& entries) {
  for (const auto& t : entries) {
    out << t.row() << ' ' << t.col() << ' ' << format_double(t.value()) << '\n';
  }
}

std::vector<Triplet> collect_nonzeros(const ModelMatrix& m) {
  std::vector<Triplet> entries;
  if (m.is_dense()) {
    const auto& d = m.dense_entries();
    for (int i = 0; i < m.k(); ++i) {
      for (int j = 0; j < m.k(); ++j) {
        if (d(i, j) != 0.0) entries.emplace_back(i, j, d(i, j));
      }
    }
  } else {
    const auto& s = m.sparse_entries();
    for (int outer = 0; outer < s.outerSize(); ++outer) {
      for (SparseMatrix::InnerIterator it(s, outer); it; ++it) {
        if (it.value() != 0.0) entries.emplace_back(static_cast<int>(it.row()),
                                                    static_cast<int>(it.col()), it.value());
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
  }
  return entries;
}

std::vector<Triplet> collect_nonzeros(const Observation& x) {
  std::vector<Triplet> entries;
  if (x.is_dense()) {
    const auto& d = x.dense_entries();
    for (int i = 0; i < x.k(); ++i) {
      for (int j = 0; j < x.k(); ++j) {
        if (d(i, j) != 0.0) entries.emplace_back(i, j, d(i, j));
      }
    }
  } else {
    const auto& s = x.sparse_entries();
    for (int outer = 0; outer < s.outerSize(); ++outer) {
      for (SparseMatrix::InnerIterator it(s, outer); it; ++it) {
        if (it.value() != 0.0) entries.emplace_back(static_cast<int>(it.row()),
                                                    static_cast<int>(it.col()), it.value());
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
  }
  return entries;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("failed to format a double value");
  return std::string(buf, ptr);
}

MatrixFileData read_matrix_stream(std::istream& in, const std::string& name) {
  MatrixFileData data;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    const auto tokens = split_ws(hash == std::string::npos ? line : line.substr(0, hash));
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() < 3 || tokens.size() > 4)
        fail_line(name, line_no, "header must be 'k r family [param]'");
      if (!parse_int(tokens[0], data.k) || data.k < 1)
        fail_line(name, line_no, "invalid matrix size '" + tokens[0] + "'");
      if (!parse_int(tokens[1], data.r) || data.r < 1)
        fail_line(name, line_no, "invalid rank '" + tokens[1] + "'");
      std::optional<double> param;
      if (tokens.size() == 4) {
        double v = 0.0;
        if (!parse_double(tokens[3], v))
          fail_line(name, line_no, "invalid model parameter '" + tokens[3] + "'");
        param = v;
      }
      try {
        data.kind = ModelKind::parse(tokens[2], param);
      } catch (const std::invalid_argument& e) {
        fail_line(name, line_no, e.what());
      }
      have_header = true;
      continue;
    }
    if (tokens.size() != 3) fail_line(name, line_no, "entry lines must be 'i j value'");
    int i = 0;
    int j = 0;
    double v = 0.0;
    if (!parse_int(tokens[0], i) || !parse_int(tokens[1], j))
      fail_line(name, line_no, "invalid entry indices");
    if (!parse_double(tokens[2], v)) fail_line(name, line_no, "invalid entry value '" + tokens[2] + "'");
    if (i < 0 || i >= data.k || j < 0 || j >= data.k)
      fail_line(name, line_no, "entry index out of range for k=" + std::to_string(data.k));
    data.entries.emplace_back(i, j, v);
  }
  if (!have_header) throw std::runtime_error(name + ": missing header line");

  auto sorted = data.entries;
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].row() == sorted[i - 1].row() && sorted[i].col() == sorted[i - 1].col()) {
      std::ostringstream msg;
      msg << name << ": duplicate entry (" << sorted[i].row() << ", " << sorted[i].col() << ")";
      throw std::runtime_error(msg.str());
    }
  }
  return data;
}

MatrixFileData read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return read_matrix_stream(in, path.string());
}

void write_matrix_file(const std::filesystem::path& path, const ModelMatrix& m) {
  auto out = open_for_write(path);
  out << m.k() << ' ' << m.rank_bound() << ' ' << m.kind().token() << '\n';
  write_triplets(out, collect_nonzeros(m));
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

void write_matrix_file(const std::filesystem::path& path, const Observation& x, int r) {
  auto out = open_for_write(path);
  out << x.k() << ' ' << r << ' ' << x.kind().token() << '\n';
  write_triplets(out, collect_nonzeros(x));
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

void write_estimate_file(const std::filesystem::path& path, const Eigen::MatrixXd& estimate,
                         int r, const ModelKind& kind) {
  if (estimate.rows() != estimate.cols())
    throw std::invalid_argument("estimate matrices must be square");
  auto out = open_for_write(path);
  out << estimate.rows() << ' ' << r << ' ' << kind.token() << '\n';
  for (Eigen::Index i = 0; i < estimate.rows(); ++i) {
    for (Eigen::Index j = 0; j < estimate.cols(); ++j) {
      if (estimate(i, j) != 0.0)
        out << i << ' ' << j << ' ' << format_double(estimate(i, j)) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

ModelMatrix to_model_matrix(const MatrixFileData& data) {
  const std::int64_t total = static_cast<std::int64_t>(data.k) * data.k;
  if (total <= kDenseEntryCap) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(data.k, data.k);
    for (const auto& t : data.entries) m(t.row(), t.col()) = t.value();
    return ModelMatrix::dense(std::move(m), data.r, data.kind);
  }
  return ModelMatrix::sparse(data.k, data.entries, data.r, data.kind);
}

Observation to_observation(const MatrixFileData& data) {
  const std::int64_t total = static_cast<std::int64_t>(data.k) * data.k;
  if (total <= kDenseEntryCap) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(data.k, data.k);
    for (const auto& t : data.entries) m(t.row(), t.col()) = t.value();
    return Observation::dense(std::move(m), data.kind);
  }
  return Observation::sparse(data.k, data.entries, data.kind);
}

}  // namespace cursvd
