// Copyright 2026 The qcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Channel spec documents and JSON encodings.
//
// Complex numbers are [re, im]; matrices are row-major arrays of rows;
// phase-space distributions are dense arrays in lexicographic (x, y) order.
//
//   {"kind": "kraus",         "matrices": [M, ...]}
//   {"kind": "choi",          "choi": C}            (d^2 x d^2, output first)
//   {"kind": "weyl",          "group": [d1, ...], "probs": [...]}
//   {"kind": "werner-holevo", "dim": d}
//   {"kind": "depolarizing",  "dim": d, "p": p}
//   {"kind": "identity",      "dim": d}

#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "qcap/channel.hpp"
#include "qcap/weyl.hpp"

namespace qcap::io {

using json = nlohmann::json;

/// Spec error with a location: a JSON pointer or a line/column.
class SpecError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

namespace detail {

[[noreturn]] inline void spec_fail(const std::string& where, const std::string& what) {
  throw SpecError("spec " + where + ": " + what);
}

inline double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) spec_fail(where, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

inline Complex complex_at(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) spec_fail(where, "expected a complex number [re, im]");
  return {number_at(j[0], where + "/0"), number_at(j[1], where + "/1")};
}

inline const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) spec_fail("/", std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

inline int count_at(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) spec_fail(where, "expected a non-negative integer");
  return j.get<int>();
}

}  // namespace detail

inline ComplexMatrix matrix_from_json(const json& j, const std::string& where = "") {
  if (!j.is_array() || j.empty()) detail::spec_fail(where, "expected a non-empty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) detail::spec_fail(where + "/0", "expected a non-empty row");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rw = where + "/" + std::to_string(r);
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      detail::spec_fail(rw, "row length differs from row 0 (" + std::to_string(cols) + ")");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = detail::complex_at(j[r][c], rw + "/" + std::to_string(c));
  }
  return m;
}

inline std::vector<int> orders_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) detail::spec_fail(where, "expected a non-empty array of cyclic orders");
  std::vector<int> orders;
  for (std::size_t i = 0; i < j.size(); ++i) orders.push_back(detail::count_at(j[i], where + "/" + std::to_string(i)));
  return orders;
}

/// Parses "2,3" into {2, 3}.
inline std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> orders;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("group: cannot parse order \"" + item + "\"");
    orders.push_back(v);
  }
  if (orders.empty()) throw ValidationError("group: empty order list");
  return orders;
}

struct ParsedSpec {
  json document;
  std::string kind;
  QuantumChannel channel;
  /// Group carried by the spec itself (weyl; depolarizing is realised on Z_d).
  std::optional<FiniteAbelianGroup> group;
};

inline ParsedSpec channel_from_spec(const json& doc) {
  if (!doc.is_object()) detail::spec_fail("/", "document must be an object");
  const json& kind_j = detail::field(doc, "kind");
  if (!kind_j.is_string()) detail::spec_fail("/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "kraus") {
      const json& ms = detail::field(doc, "matrices");
      if (!ms.is_array() || ms.empty()) detail::spec_fail("/matrices", "expected a non-empty array of matrices");
      std::vector<ComplexMatrix> kraus;
      for (std::size_t i = 0; i < ms.size(); ++i) kraus.push_back(matrix_from_json(ms[i], "/matrices/" + std::to_string(i)));
      return {doc, kind, channel_from_kraus(std::move(kraus)), std::nullopt};
    }
    if (kind == "choi") {
      const ComplexMatrix c = matrix_from_json(detail::field(doc, "choi"), "/choi");
      const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(c.rows()))));
      if (d * d != c.rows()) detail::spec_fail("/choi", "row count " + std::to_string(c.rows()) + " is not a square");
      return {doc, kind, kraus_from_choi(ChoiMatrix(d, c)), std::nullopt};
    }
    if (kind == "weyl") {
      const FiniteAbelianGroup g(orders_from_json(detail::field(doc, "group"), "/group"));
      const json& pj = detail::field(doc, "probs");
      if (!pj.is_array()) detail::spec_fail("/probs", "expected an array");
      RealVector p(static_cast<Eigen::Index>(pj.size()));
      for (std::size_t i = 0; i < pj.size(); ++i) p(i) = detail::number_at(pj[i], "/probs/" + std::to_string(i));
      return {doc, kind, weyl_channel(g, PhaseSpaceDistribution(g, p)), g};
    }
    if (kind == "werner-holevo") {
      return {doc, kind, werner_holevo(detail::count_at(detail::field(doc, "dim"), "/dim")), std::nullopt};
    }
    if (kind == "depolarizing") {
      const int d = detail::count_at(detail::field(doc, "dim"), "/dim");
      const double p = detail::number_at(detail::field(doc, "p"), "/p");
      QuantumChannel ch = depolarizing(d, p);
      return {doc, kind, std::move(ch), FiniteAbelianGroup({d})};
    }
    if (kind == "identity") {
      return {doc, kind, identity_channel(detail::count_at(detail::field(doc, "dim"), "/dim")), std::nullopt};
    }
  } catch (const SpecError&) {
    throw;
  } catch (const ValidationError& e) {
    throw SpecError("spec (kind " + kind + "): " + e.what());
  }
  detail::spec_fail("/kind", "unknown kind \"" + kind +
                                 "\" (expected kraus, choi, weyl, werner-holevo, depolarizing, identity)");
}

/// Parses text, reporting syntax errors with line and column.
inline json parse_document(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::istringstream in(text);
    std::string content;
    for (std::size_t l = 0; l < line && std::getline(in, content); ++l) {}
    throw SpecError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                    ": JSON syntax error near \"" + content + "\"");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ParsedSpec load_spec(const std::string& path) {
  return channel_from_spec(parse_document(read_file(path), path));
}

/// Kraus-form spec document of a channel.
inline json spec_from_channel(const QuantumChannel& ch) {
  json ms = json::array();
  for (const ComplexMatrix& l : ch.kraus()) ms.push_back(to_json(l));
  return json{{"kind", "kraus"}, {"matrices", ms}};
}

/// FNV-1a 64-bit hash of the canonical (sorted keys, compact) dump.
inline std::string digest(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline json tolerance_value(double value, double tolerance) {
  return json{{"value", value}, {"tolerance", tolerance}};
}

}  // namespace qcap::io
