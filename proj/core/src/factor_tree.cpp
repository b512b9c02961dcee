// Copyright 2026 The khk Authors
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

#include "khk/factor_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "khk/errors.hpp"
#include "khk/kg_basis.hpp"
#include "khk/pauli.hpp"

namespace khk {

const char *to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::GlobalPhase:
      return "GlobalPhase";
    case FactorKind::SubUnitary:
      return "SubUnitary";
    case FactorKind::LastQubit:
      return "LastQubit";
    case FactorKind::CartanExp:
      return "CartanExp";
  }
  return "?";
}

Factor Factor::global_phase(double phase) {
  Factor f;
  f.kind = FactorKind::GlobalPhase;
  f.phase = phase;
  f.label = "phase";
  return f;
}

Factor Factor::sub_unitary(int level, Matrix payload, std::string label) {
  Factor f;
  f.kind = FactorKind::SubUnitary;
  f.level = level;
  f.payload = std::move(payload);
  f.label = std::move(label);
  return f;
}

Factor Factor::last_qubit(int level, Matrix payload, std::string label) {
  Factor f;
  f.kind = FactorKind::LastQubit;
  f.level = level;
  f.payload = std::move(payload);
  f.label = std::move(label);
  return f;
}

Factor Factor::cartan_exp(int level, std::string basis_name, std::vector<CartanTerm> terms,
                          std::string label) {
  Factor f;
  f.kind = FactorKind::CartanExp;
  f.level = level;
  f.basis_name = std::move(basis_name);
  f.terms = std::move(terms);
  f.label = std::move(label);
  return f;
}

Matrix Factor::cartan_generator() const {
  if (kind != FactorKind::CartanExp) {
    throw Error(ErrorKind::DimMismatch, "cartan_generator on a " + std::string(to_string(kind)));
  }
  const Eigen::Index dim = Eigen::Index{1} << level;
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto &t : terms) {
    const PauliWord w = pauli_word(t.word);
    if (w.qubits() != level) {
      throw Error(ErrorKind::DimMismatch,
                  "word " + t.word + " does not act on " + std::to_string(level) + " qubits");
    }
    out += t.coeff * w.matrix();
  }
  return out;
}

double DecompositionReport::mean_subspace_error() const {
  if (subspace_errors.empty()) return 0.0;
  double sum = 0.0;
  for (const auto &[label, value] : subspace_errors) sum += value;
  return sum / static_cast<double>(subspace_errors.size());
}

Matrix expand(const Factor &factor, int n_total) {
  const auto too_big = [&] {
    return Error(ErrorKind::LevelExceedsRegister,
                 factor.label + " at level " + std::to_string(factor.level) +
                     " does not fit a " + std::to_string(n_total) + "-qubit register");
  };
  const auto expect_dim = [&](Eigen::Index dim) {
    if (factor.payload.rows() != dim || factor.payload.cols() != dim) {
      throw Error(ErrorKind::DimMismatch, factor.label + " payload has the wrong size");
    }
  };
  switch (factor.kind) {
    case FactorKind::GlobalPhase:
      return std::polar(1.0, factor.phase) * qubit_identity(n_total);
    case FactorKind::SubUnitary: {
      if (factor.level < 2) throw Error(ErrorKind::DimMismatch, "SubUnitary level below 2");
      if (factor.level > n_total + 1) throw too_big();
      expect_dim(Eigen::Index{1} << (factor.level - 1));
      if (factor.level == n_total + 1) return factor.payload;
      return kron(kron(factor.payload, qubit_identity(1)), qubit_identity(n_total - factor.level));
    }
    case FactorKind::LastQubit: {
      if (factor.level < 1) throw Error(ErrorKind::DimMismatch, "LastQubit level below 1");
      if (factor.level > n_total) throw too_big();
      expect_dim(2);
      return kron(kron(qubit_identity(factor.level - 1), factor.payload),
                  qubit_identity(n_total - factor.level));
    }
    case FactorKind::CartanExp: {
      if (factor.level < 2) throw Error(ErrorKind::DimMismatch, "CartanExp level below 2");
      if (factor.level > n_total) throw too_big();
      return kron(expm_skew(factor.cartan_generator()), qubit_identity(n_total - factor.level));
    }
  }
  throw Error(ErrorKind::DimMismatch, "unknown factor kind");
}

Matrix product(const FactorTree &tree) {
  Matrix out = qubit_identity(tree.n_total);
  for (const auto &f : tree.factors) out = out * expand(f, tree.n_total);
  return std::polar(1.0, tree.phase) * out;
}

// Writing ------------------------------------------------------------------

namespace {

void put_number(std::string &out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  out += buf;
}

void put_string(std::string &out, const std::string &s) {
  out += nlohmann::json(s).dump();
}

void put_matrix(std::string &out, const Matrix &m, const char *indent) {
  out += "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += "\n";
    out += indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out += "[";
      put_number(out, m(r, c).real());
      out += ", ";
      put_number(out, m(r, c).imag());
      out += "]";
      if (r + 1 < m.rows() || c + 1 < m.cols()) out += c + 1 < m.cols() ? ", " : ",";
    }
  }
  out += "]";
}

template <typename T>
void put_pairs(std::string &out, const std::vector<std::pair<std::string, T>> &pairs) {
  out += "[";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out += i == 0 ? "\n      {\"label\": " : ",\n      {\"label\": ";
    put_string(out, pairs[i].first);
    out += ", \"value\": ";
    if constexpr (std::is_same_v<T, int>) {
      out += std::to_string(pairs[i].second);
    } else {
      put_number(out, pairs[i].second);
    }
    out += "}";
  }
  out += pairs.empty() ? "]" : "\n    ]";
}

}  // namespace

std::string serialize(const FactorTree &tree) {
  std::string out = "{\n  \"format_version\": " + std::to_string(kFactorTreeFormatVersion) +
                    ",\n  \"n_total\": " + std::to_string(tree.n_total) + ",\n  \"phase\": ";
  put_number(out, tree.phase);
  const auto &rep = tree.report;
  out += ",\n  \"report\": {\n    \"approx_error\": ";
  put_number(out, rep.approx_error);
  out += ",\n    \"wall_time\": ";
  put_number(out, rep.wall_time);
  out += ",\n    \"subspace_errors\": ";
  put_pairs(out, rep.subspace_errors);
  out += ",\n    \"subspace_residuals\": ";
  put_pairs(out, rep.subspace_residuals);
  out += ",\n    \"optimizer_iterations\": ";
  put_pairs(out, rep.optimizer_iterations);
  out += "\n  },\n  \"factors\": [";
  for (std::size_t i = 0; i < tree.factors.size(); ++i) {
    const Factor &f = tree.factors[i];
    out += i == 0 ? "\n    {" : ",\n    {";
    out += "\"order_index\": " + std::to_string(i) + ", \"kind\": \"" + to_string(f.kind) +
           "\", \"level\": " + std::to_string(f.level) + ", \"label\": ";
    put_string(out, f.label);
    switch (f.kind) {
      case FactorKind::GlobalPhase:
        out += ", \"phase\": ";
        put_number(out, f.phase);
        break;
      case FactorKind::SubUnitary:
      case FactorKind::LastQubit:
        out += ", \"dim\": " + std::to_string(f.payload.rows()) + ", \"payload\": ";
        put_matrix(out, f.payload, "      ");
        break;
      case FactorKind::CartanExp:
        out += ", \"basis\": ";
        put_string(out, f.basis_name);
        out += ", \"subspace_residual\": ";
        put_number(out, f.subspace_residual);
        out += ", \"subspace_error\": ";
        put_number(out, f.subspace_error);
        out += ", \"terms\": [";
        for (std::size_t t = 0; t < f.terms.size(); ++t) {
          out += t == 0 ? "\n      {\"word\": " : ",\n      {\"word\": ";
          put_string(out, f.terms[t].word);
          out += ", \"coeff\": ";
          put_number(out, f.terms[t].coeff);
          out += "}";
        }
        out += f.terms.empty() ? "]" : "\n    ]";
        break;
    }
    out += "}";
  }
  out += tree.factors.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

// Reading ------------------------------------------------------------------

namespace {

using nlohmann::json;

class Reader {
 public:
  [[noreturn]] static void fail(const std::string &where, const std::string &what) {
    throw ParseError(where.empty() ? "/" : where, what);
  }

  static const json &field(const json &obj, const std::string &where, const char *key) {
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where + "/" + key, "missing field");
    return *it;
  }

  static double number(const json &x, const std::string &where) {
    if (x.is_null()) return std::nan("");
    if (!x.is_number()) fail(where, "expected a number");
    return x.get<double>();
  }

  static int integer(const json &x, const std::string &where) {
    if (!x.is_number_integer()) fail(where, "expected an integer");
    return x.get<int>();
  }

  static std::string text(const json &x, const std::string &where) {
    if (!x.is_string()) fail(where, "expected a string");
    return x.get<std::string>();
  }

  static const json &array(const json &x, const std::string &where) {
    if (!x.is_array()) fail(where, "expected an array");
    return x;
  }

  static Matrix matrix(const json &x, Eigen::Index dim, const std::string &where) {
    array(x, where);
    if (static_cast<Eigen::Index>(x.size()) != dim * dim) {
      fail(where, "expected " + std::to_string(dim * dim) + " entries, found " +
                      std::to_string(x.size()));
    }
    Matrix out(dim, dim);
    for (Eigen::Index i = 0; i < dim * dim; ++i) {
      const std::string at = where + "/" + std::to_string(i);
      const json &e = x[static_cast<std::size_t>(i)];
      if (!e.is_array() || e.size() != 2) fail(at, "expected an [re, im] pair");
      out(i / dim, i % dim) = Complex(number(e[0], at + "/0"), number(e[1], at + "/1"));
    }
    return out;
  }

  template <typename T>
  static std::vector<std::pair<std::string, T>> pairs(const json &x, const std::string &where) {
    array(x, where);
    std::vector<std::pair<std::string, T>> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::string at = where + "/" + std::to_string(i);
      const std::string label = text(field(x[i], at, "label"), at + "/label");
      const json &value = field(x[i], at, "value");
      if constexpr (std::is_same_v<T, int>) {
        out.emplace_back(label, integer(value, at + "/value"));
      } else {
        out.emplace_back(label, number(value, at + "/value"));
      }
    }
    return out;
  }
};

FactorKind parse_kind(const std::string &s, const std::string &where) {
  for (FactorKind k : {FactorKind::GlobalPhase, FactorKind::SubUnitary, FactorKind::LastQubit,
                       FactorKind::CartanExp}) {
    if (s == to_string(k)) return k;
  }
  Reader::fail(where, "unknown factor kind '" + s + "'");
}

void check_cartan_labels(const Factor &f, const std::string &where) {
  const std::string expected_h = "H" + std::to_string(f.level);
  const std::string expected_f = "F" + std::to_string(f.level);
  std::vector<std::string> allowed;
  if (f.basis_name == expected_h && f.level >= 2) {
    allowed = h_labels(f.level);
  } else if (f.basis_name == expected_f && f.level >= 3) {
    allowed = f_labels(f.level);
  } else {
    Reader::fail(where + "/basis", "no Cartan basis '" + f.basis_name + "' at level " +
                                       std::to_string(f.level));
  }
  for (std::size_t t = 0; t < f.terms.size(); ++t) {
    if (std::find(allowed.begin(), allowed.end(), f.terms[t].word) == allowed.end()) {
      Reader::fail(where + "/terms/" + std::to_string(t) + "/word",
                   "'" + f.terms[t].word + "' is not in " + f.basis_name);
    }
  }
}

}  // namespace

FactorTree deserialize(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error &e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  using R = Reader;
  const int version = R::integer(R::field(doc, "", "format_version"), "/format_version");
  if (version != kFactorTreeFormatVersion) {
    R::fail("/format_version", "unsupported version " + std::to_string(version));
  }
  FactorTree tree;
  tree.n_total = R::integer(R::field(doc, "", "n_total"), "/n_total");
  if (tree.n_total < 1 || tree.n_total > 16) R::fail("/n_total", "qubit count out of range");
  tree.phase = R::number(R::field(doc, "", "phase"), "/phase");

  const json &rep = R::field(doc, "", "report");
  tree.report.approx_error =
      R::number(R::field(rep, "/report", "approx_error"), "/report/approx_error");
  tree.report.wall_time = R::number(R::field(rep, "/report", "wall_time"), "/report/wall_time");
  tree.report.subspace_errors = R::pairs<double>(R::field(rep, "/report", "subspace_errors"),
                                                 "/report/subspace_errors");
  tree.report.subspace_residuals = R::pairs<double>(
      R::field(rep, "/report", "subspace_residuals"), "/report/subspace_residuals");
  tree.report.optimizer_iterations = R::pairs<int>(
      R::field(rep, "/report", "optimizer_iterations"), "/report/optimizer_iterations");

  const json &factors = R::array(R::field(doc, "", "factors"), "/factors");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string at = "/factors/" + std::to_string(i);
    const json &rec = factors[i];
    Factor f;
    const int order = R::integer(R::field(rec, at, "order_index"), at + "/order_index");
    if (order != static_cast<int>(i)) R::fail(at + "/order_index", "factors out of order");
    f.order_index = i;
    f.kind = parse_kind(R::text(R::field(rec, at, "kind"), at + "/kind"), at + "/kind");
    f.level = R::integer(R::field(rec, at, "level"), at + "/level");
    f.label = R::text(R::field(rec, at, "label"), at + "/label");
    switch (f.kind) {
      case FactorKind::GlobalPhase:
        f.phase = R::number(R::field(rec, at, "phase"), at + "/phase");
        break;
      case FactorKind::SubUnitary:
      case FactorKind::LastQubit: {
        const int dim = R::integer(R::field(rec, at, "dim"), at + "/dim");
        const int expected = f.kind == FactorKind::LastQubit ? 2 : (1 << std::max(0, f.level - 1));
        if (dim != expected) R::fail(at + "/dim", "payload size does not match the level");
        f.payload = R::matrix(R::field(rec, at, "payload"), dim, at + "/payload");
        break;
      }
      case FactorKind::CartanExp: {
        f.basis_name = R::text(R::field(rec, at, "basis"), at + "/basis");
        f.subspace_residual =
            R::number(R::field(rec, at, "subspace_residual"), at + "/subspace_residual");
        f.subspace_error = R::number(R::field(rec, at, "subspace_error"), at + "/subspace_error");
        const json &terms = R::array(R::field(rec, at, "terms"), at + "/terms");
        for (std::size_t t = 0; t < terms.size(); ++t) {
          const std::string tat = at + "/terms/" + std::to_string(t);
          f.terms.push_back({R::text(R::field(terms[t], tat, "word"), tat + "/word"),
                             R::number(R::field(terms[t], tat, "coeff"), tat + "/coeff")});
        }
        check_cartan_labels(f, at);
        break;
      }
    }
    const int limit = f.kind == FactorKind::SubUnitary ? tree.n_total + 1 : tree.n_total;
    if (f.kind != FactorKind::GlobalPhase && (f.level < 1 || f.level > limit)) {
      R::fail(at + "/level", "level does not fit the register");
    }
    tree.factors.push_back(std::move(f));
  }
  return tree;
}

}  // namespace khk
