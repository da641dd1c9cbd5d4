#include "harness/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "lojvar/error.hpp"
#include "lojvar/rng.hpp"

namespace lojvar::harness {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ojson report_header() {
  ojson j;
  j["version"] = kVersionString;
  j["rng"] = std::string(Rng::algorithm);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const ojson& doc) { write_text(path, doc.dump(2) + "\n"); }

NodeField read_node_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open map file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::io_error, path.string() + ":" + std::to_string(lineno) + ": not a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::io_error, path.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::io_error, "map file " + path.string() + " is empty");
  NodeField out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return out;
}

void write_node_csv(const std::filesystem::path& path, const NodeField& values) {
  std::string s;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) s += ',';
      s += format_double(values(i, j));
    }
    s += '\n';
  }
  write_text(path, s);
}

std::string error_record(const std::exception& e, const std::string& context) {
  ojson j = report_header();
  const auto* le = dynamic_cast<const Error*>(&e);
  j["error"] = le ? std::string(to_string(le->code())) : std::string("internal_error");
  j["message"] = e.what();
  j["context"] = context;
  return j.dump();
}

}  // namespace lojvar::harness
