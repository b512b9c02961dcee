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

#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "khk/bch.hpp"
#include "khk/engine.hpp"
#include "khk/errors.hpp"
#include "khk/factor_tree.hpp"
#include "khk/involution.hpp"
#include "khk/kg_basis.hpp"
#include "khk/matrix_io.hpp"
#include "khk/metrics.hpp"

namespace khk::cli {

namespace {

struct Settings {
  std::string input;
  std::string output;
  std::string tree;
  std::string matrix;
  std::string json;
  bool repair = false;
  int n = 3;
  std::size_t count = 10;
  std::uint64_t seed = 7;
  int threads = 1;
  int order = 6;
  std::optional<double> ball;
  double verify_tol = 1e-8;
  OptimizerConfig optimizer;
  Tolerances tol;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void add_engine_flags(CLI::App *cmd, Settings &s) {
  cmd->add_option("--tol-subspace", s.tol.subspace, "Largest repaired subspace residual")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-reconstruct", s.tol.reconstruct, "Per-level reconstruction tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", s.optimizer.restarts, "Optimizer restarts")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-iters", s.optimizer.max_iters, "Optimizer iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.optimizer.seed, "Optimizer restart seed");
  cmd->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);
}

Matrix ingest(const std::string &path, bool repair, const Tolerances &tol, int &n,
              std::ostream &out) {
  MatrixDocument doc = read_matrix_file(path);
  n = doc.n;
  if (repair) {
    const SpecialUnitaryRepair fixed = nearest_special_unitary(doc.matrix);
    out << "repair: moved by " << sci((fixed.u - doc.matrix).norm()) << "\n";
    return fixed.u;
  }
  require_special_unitary(doc.matrix, n, tol);
  return doc.matrix;
}

int decompose(const Settings &s, std::ostream &out, std::ostream &err) {
  Matrix raw;
  Matrix g;
  int n = 0;
  try {
    raw = read_matrix_file(s.input).matrix;
    g = ingest(s.input, s.repair, s.tol, n, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::NotUnitary ? kNotSpecialUnitary : kUsage;
  }
  if (n < 2) {
    err << "error: decompose needs at least two qubits\n";
    return kUsage;
  }
  FactorTree tree;
  try {
    tree = decompose_full(g, n, s.optimizer, s.tol, s.threads);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kDecompositionFailed;
  }
  try {
    write_text_file(s.output, serialize(tree));
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  out << "E_a = " << sci(tree.report.approx_error) << "\n";
  if (s.repair) out << "E_a (input file) = " << sci((raw - product(tree)).norm()) << "\n";
  for (const auto &[label, value] : tree.report.subspace_errors) {
    out << "E_s " << label << " = " << sci(value) << "\n";
  }
  out << "mean E_s = " << sci(tree.report.mean_subspace_error()) << "\n";
  out << "factors = " << tree.factors.size() << ", wall time = " << sci(tree.report.wall_time)
      << " s\n";
  return kOk;
}

int verify(const Settings &s, std::ostream &out, std::ostream &err) {
  FactorTree tree;
  Matrix g;
  try {
    tree = deserialize(read_text_file(s.tree));
    MatrixDocument doc = read_matrix_file(s.matrix);
    g = s.repair ? nearest_special_unitary(doc.matrix).u : doc.matrix;
    if (doc.n != tree.n_total) {
      err << "error: matrix has " << doc.n << " qubits, tree has " << tree.n_total << "\n";
      return kUsage;
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  bool ok = true;
  double ea = 0.0;
  try {
    ea = approx_error(g, tree);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  out << "E_a = " << sci(ea) << (ea <= s.verify_tol ? "" : "  (above tolerance)") << "\n";
  ok = ok && ea <= s.verify_tol;

  for (const auto &f : tree.factors) {
    switch (f.kind) {
      case FactorKind::SubUnitary:
      case FactorKind::LastQubit: {
        const double unit = unitarity_defect(f.payload);
        const double det = std::abs(f.payload.determinant() - 1.0);
        const double limit = structural_tol(f.payload.rows());
        const bool good = unit <= limit && det <= limit;
        out << f.label << ": unitarity " << sci(unit) << ", |det-1| " << sci(det)
            << (good ? "" : "  FAIL") << "\n";
        ok = ok && good;
        break;
      }
      case FactorKind::CartanExp: {
        const bool good = f.subspace_residual <= s.tol.subspace;
        out << f.label << " [" << f.basis_name << "]: subspace residual "
            << sci(f.subspace_residual) << ", E_s " << sci(f.subspace_error)
            << (good ? "" : "  FAIL") << "\n";
        ok = ok && good;
        break;
      }
      case FactorKind::GlobalPhase:
        break;
    }
  }
  out << (ok ? "verify: ok" : "verify: FAILED") << "\n";
  return ok ? kOk : kVerifyFailed;
}

int bench(const Settings &s, std::ostream &out, std::ostream &err) {
  if (s.n < 3) {
    err << "error: bench needs --n >= 3\n";
    return kUsage;
  }
  BenchmarkOptions options;
  options.threads = s.threads;
  BenchmarkSummary summary = run_benchmark(s.n, s.count, s.seed, s.optimizer, s.tol, options);
  const std::span<const BenchmarkSummary> one(&summary, 1);
  out << format_benchmark_table(one);
  for (const auto &rec : summary.records) {
    if (!rec.ok) out << "sample " << rec.index << " failed: " << rec.error << "\n";
  }
  if (!s.json.empty()) {
    try {
      write_text_file(s.json, benchmark_json(one));
    } catch (const Error &e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
  }
  return summary.count > 0 && summary.failures == summary.count ? kDecompositionFailed : kOk;
}

int basis(const Settings &s, std::ostream &out, std::ostream &err) {
  if (s.n < 2 || s.n > 8) {
    err << "error: basis needs 2 <= --n <= 8\n";
    return kUsage;
  }
  const auto b = cached_kg_basis(s.n);
  out << "# n=" << s.n << " |M|=" << b->m_set.size() << " |K|=" << b->k_set.size()
      << " |K0|=" << b->k0_set.size() << " |K1|=" << b->k1_set.size()
      << " |H|=" << b->h_set.size() << " |F|=" << b->f_set.size() << "\n";
  out << dump_basis(*b);
  return kOk;
}

int compare_bch(const Settings &s, std::ostream &out, std::ostream &err) {
  if (s.n < 3) {
    err << "error: compare-bch needs --n >= 3\n";
    return kUsage;
  }
  if (s.order < 1 || s.order > kMaxBchOrder) {
    err << "error: --order must lie in [1, " << kMaxBchOrder << "]\n";
    return kUsage;
  }
  const auto b = cached_kg_basis(s.n);
  const AxisInvolution theta(s.n, Axis::Z);
  BchConfig cfg;
  cfg.truncation_order = s.order;

  char line[160];
  std::snprintf(line, sizeof line, "%5s %12s %12s %12s  %s\n", "index", "khk", "bch", "|dm|",
                "status");
  out << line;
  std::size_t bch_failures = 0;
  double khk_max = 0.0;
  double bch_sum = 0.0;
  for (std::size_t i = 0; i < s.count; ++i) {
    const std::uint64_t seed = sample_seed(s.seed, i);
    const Matrix g = s.ball ? expm_skew(random_su_algebra(s.n, *s.ball, seed))
                            : haar_special_unitary(s.n, seed);
    const AlgebraElement m = compute_m(g, theta, b->m_set, s.tol);
    const Matrix k0 = residual_k(g, m);
    const double khk = (g - k0 * expm_skew(m.matrix)).norm() + (theta(k0) - k0).norm();
    khk_max = std::max(khk_max, khk);

    std::string status = "ok";
    BchSplit split;
    try {
      split = solve_bch_split(g, *b, cfg);
    } catch (const RootSearchFailed &e) {
      split = e.best();
      status = "root search failed";
      ++bch_failures;
    }
    bch_sum += split.residual;
    std::snprintf(line, sizeof line, "%5zu %12.3e %12.3e %12.3e  %s\n", i, khk, split.residual,
                  (split.m.matrix - m.matrix).norm(), status.c_str());
    out << line;
  }
  out << "khk max residual = " << sci(khk_max) << "\n";
  out << "bch mean residual = " << sci(s.count ? bch_sum / static_cast<double>(s.count) : 0.0)
      << ", root search failures = " << bch_failures << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  Settings s;
  CLI::App app{"Recursive KHK decomposition of SU(2^n)", "khk"};
  app.require_subcommand(1);

  CLI::App *dec = app.add_subcommand("decompose", "Decompose a matrix file into a factor tree");
  dec->add_option("--input", s.input, "Matrix file")->required();
  dec->add_option("--output", s.output, "Factor-tree file to write")->required();
  dec->add_flag("--repair", s.repair, "Project the input onto SU(2^n) first");
  dec->add_option("--ingest-tol", s.tol.ingest, "Unitarity tolerance for the input")
      ->check(CLI::PositiveNumber);
  add_engine_flags(dec, s);

  CLI::App *ver = app.add_subcommand("verify", "Check a factor tree against a matrix");
  ver->add_option("--tree", s.tree, "Factor-tree file")->required();
  ver->add_option("--matrix", s.matrix, "Matrix file")->required();
  ver->add_flag("--repair", s.repair, "Compare against the repaired matrix");
  ver->add_option("--tol", s.verify_tol, "Largest accepted E_a")->check(CLI::PositiveNumber);
  ver->add_option("--tol-subspace", s.tol.subspace, "Largest accepted subspace residual")
      ->check(CLI::PositiveNumber);

  CLI::App *ben = app.add_subcommand("bench", "Decompose Haar-random matrices");
  ben->add_option("--n", s.n, "Qubit count")->required();
  ben->add_option("--count", s.count, "Number of samples");
  ben->add_option("--seed", s.seed, "Sample seed");
  ben->add_option("--json", s.json, "Also write the records as JSON");
  ben->add_option("--tol-subspace", s.tol.subspace)->check(CLI::PositiveNumber);
  ben->add_option("--tol-reconstruct", s.tol.reconstruct)->check(CLI::PositiveNumber);
  ben->add_option("--restarts", s.optimizer.restarts)->check(CLI::NonNegativeNumber);
  ben->add_option("--max-iters", s.optimizer.max_iters)->check(CLI::PositiveNumber);
  ben->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);

  CLI::App *bas = app.add_subcommand("basis", "Print the Khaneja-Glaser basis");
  bas->add_option("--n", s.n, "Qubit count")->required();

  CLI::App *cmp = app.add_subcommand("compare-bch", "Compare the BCH split with the KHK split");
  cmp->add_option("--n", s.n, "Qubit count")->required();
  cmp->add_option("--count", s.count, "Number of samples");
  cmp->add_option("--seed", s.seed, "Sample seed");
  cmp->add_option("--order", s.order, "BCH truncation order");
  cmp->add_option("--ball", s.ball,
                  "Sample exp(x) with ||x||_F equal to this instead of Haar matrices")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (dec->parsed()) return decompose(s, out, err);
    if (ver->parsed()) return verify(s, out, err);
    if (ben->parsed()) return bench(s, out, err);
    if (bas->parsed()) return basis(s, out, err);
    if (cmp->parsed()) return compare_bch(s, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kDecompositionFailed;
  }
  return kUsage;
}

}  // namespace khk::cli
