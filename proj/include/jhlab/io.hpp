#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "counterexample.hpp"
#include "error.hpp"
#include "extremal.hpp"
#include "jh_space.hpp"
#include "matrix.hpp"
#include "scalar.hpp"
#include "tensor.hpp"

namespace jhlab::io {

using json = nlohmann::ordered_json;

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_input, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error(ErrorKind::invalid_input, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::invalid_input, "cannot rename onto '" + path.string() + "': " + ec.message());
}

namespace detail {

inline const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(ErrorKind::invalid_input, std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline std::string string_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_string()) throw Error(ErrorKind::invalid_input, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

template <Scalar S>
S scalar_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (v.is_string()) return scalar_traits<S>::parse(v.get<std::string>());
  if (v.is_number_integer()) return scalar_traits<S>::parse(std::to_string(v.get<long long>()));
  throw Error(ErrorKind::invalid_input, std::string("field '") + key + "' must be a rational or decimal string");
}

inline const json& entries_array(const json& doc) {
  const json& entries = field(doc, "entries");
  if (!entries.is_array()) throw Error(ErrorKind::invalid_input, "'entries' must be an array");
  return entries;
}

}  // namespace detail

/// {"entries":[{"node":"010","value":"3/4"}, ...]}
template <Scalar S>
TreeVector<S> tree_vector_from_json(const json& doc) {
  TreeVector<S> x;
  for (const json& e : detail::entries_array(doc)) x.add(Node(detail::string_field(e, "node")), detail::scalar_field<S>(e, "value"));
  return x;
}

template <Scalar S>
json to_json(const TreeVector<S>& x) {
  json entries = json::array();
  for (const auto& [n, v] : x.entries()) entries.push_back({{"node", n.str()}, {"value", format_scalar(v)}});
  return {{"entries", entries}};
}

/// {"entries":[{"left":"0100","right":"0111","value":"1/2"}, ...]}
template <Scalar S>
TensorElement<S> tensor_from_json(const json& doc) {
  TensorElement<S> w;
  for (const json& e : detail::entries_array(doc))
    w.add(Node(detail::string_field(e, "left")), Node(detail::string_field(e, "right")), detail::scalar_field<S>(e, "value"));
  return w;
}

template <Scalar S>
json to_json(const TensorElement<S>& w) {
  json entries = json::array();
  for (const auto& [k, v] : w.entries())
    entries.push_back({{"left", k.first.str()}, {"right", k.second.str()}, {"value", format_scalar(v)}});
  return {{"entries", entries}};
}

template <Scalar S>
json to_json(const Matrix<S>& m) {
  json rows = json::array();
  for (std::size_t i = 1; i <= m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 1; j <= m.size(); ++j) row.push_back(format_scalar(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// n lines of n comma-separated values; blank lines and '#' lines skipped.
template <Scalar S>
Matrix<S> matrix_from_csv(std::string_view text) {
  std::vector<std::vector<S>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') continue;
    std::vector<S> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      row.push_back(scalar_traits<S>::parse(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::invalid_input, "matrix CSV is empty");
  const std::size_t n = rows.size();
  std::vector<S> data;
  for (const auto& row : rows) {
    if (row.size() != n)
      throw Error(ErrorKind::invalid_input, "matrix CSV is not square: " + std::to_string(n) + " rows, a row of " +
                                                std::to_string(row.size()) + " values");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix<S>(n, std::move(data));
}

template <Scalar S>
std::string matrix_to_csv(const Matrix<S>& m) {
  std::string out;
  for (std::size_t i = 1; i <= m.size(); ++i) {
    for (std::size_t j = 1; j <= m.size(); ++j) {
      if (j > 1) out += ',';
      out += format_scalar(m(i, j));
    }
    out += '\n';
  }
  return out;
}

/// Header comment lines ("# key=value") followed by
/// n,sigma_M,sigma_EM,exactness,measured_ratio rows.
template <Scalar S>
std::string growth_csv(const std::vector<GrowthRecord<S>>& records, const std::vector<std::pair<std::string, std::string>>& header) {
  std::string out;
  for (const auto& [k, v] : header) out += "# " + k + "=" + v + "\n";
  out += "n,sigma_M,sigma_EM,exactness,measured_ratio\n";
  for (const auto& r : records) {
    out += std::to_string(r.n) + "," + scalar_traits<double>::to_string(to_double(r.sigma_M)) + "," +
           scalar_traits<double>::to_string(to_double(r.sigma_EM)) + "," + std::string(to_string(r.exactness)) + "," +
           (r.measured_ratio ? scalar_traits<double>::to_string(*r.measured_ratio) : std::string("NA")) + "\n";
  }
  return out;
}

template <Scalar S>
json to_json(const DivergenceReport<S>& report, const json& config) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"r", row.r},
                    {"L_r", format_scalar(row.lower_bound)},
                    {"L_r_decimal", to_double(row.lower_bound)},
                    {"sigma_E_direct", format_scalar(row.sigma_E_direct)},
                    {"match", row.match},
                    {"flagged", row.flagged},
                    {"running_max", format_scalar(row.running_max)},
                    {"pairing", to_json(row.pairing)},
                    {"predicted", to_json(row.predicted)}});
  }
  json doc;
  doc["config"] = config;
  doc["note"] = std::string(kDivergenceNote);
  doc["K_hypothesis"] = report.k_hypothesis ? json(format_scalar(*report.k_hypothesis)) : json(nullptr);
  doc["all_match"] = report.all_match();
  doc["rows"] = rows;
  return doc;
}

template <Scalar S>
std::string divergence_csv(const DivergenceReport<S>& report, const std::vector<std::pair<std::string, std::string>>& header) {
  std::string out;
  for (const auto& [k, v] : header) out += "# " + k + "=" + v + "\n";
  out += "r,L_r,L_r_decimal,sigma_E_direct,match,flagged,running_max\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.r) + "," + format_scalar(row.lower_bound) + "," +
           scalar_traits<double>::to_string(to_double(row.lower_bound)) + "," + format_scalar(row.sigma_E_direct) + "," +
           (row.match ? "true" : "false") + "," + (row.flagged ? "true" : "false") + "," +
           format_scalar(row.running_max) + "\n";
  }
  return out;
}

}  // namespace jhlab::io
