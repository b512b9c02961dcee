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

#include "khk/kg_basis.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "khk/errors.hpp"

namespace khk {

namespace {

std::vector<std::string> all_nonidentity_labels(int n) {
  std::vector<std::string> out{""};
  for (int q = 0; q < n; ++q) {
    std::vector<std::string> next;
    next.reserve(out.size() * 4);
    for (const auto &prefix : out) {
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(prefix + c);
    }
    out = std::move(next);
  }
  const std::string all_identity(static_cast<std::size_t>(n), 'I');
  std::erase(out, all_identity);
  return out;
}

// H-bar_n = union_{j=2}^{n-1} H_j (x) I^(n-1-j)
std::vector<std::string> h_bar_labels(int n) {
  std::vector<std::string> out;
  for (int j = 2; j <= n - 1; ++j) {
    const std::string pad(static_cast<std::size_t>(n - 1 - j), 'I');
    for (const auto &w : h_labels(j)) out.push_back(w + pad);
  }
  return out;
}

std::vector<std::string> sorted_unique(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw std::logic_error("duplicate label in Khaneja-Glaser set");
  }
  return labels;
}

std::vector<PauliWord> to_words(const std::vector<std::string> &labels) {
  return pauli_words(labels);
}

}  // namespace

std::vector<std::string> h_labels(int n) {
  if (n < 2) throw Error(ErrorKind::DimMismatch, "H_n needs n >= 2");
  if (n == 2) return {"XX", "YY", "ZZ"};
  std::vector<std::string> out{std::string(static_cast<std::size_t>(n - 1), 'I') + "X"};
  for (const auto &w : h_bar_labels(n)) out.push_back(w + "X");
  return sorted_unique(std::move(out));
}

std::vector<std::string> f_labels(int n) {
  if (n < 2) throw Error(ErrorKind::DimMismatch, "F_n needs n >= 2");
  std::vector<std::string> out;
  for (const auto &w : h_bar_labels(n)) out.push_back(w + "Z");
  return sorted_unique(std::move(out));
}

PauliWord KGBasis::z_word() const {
  return PauliWord(std::string(static_cast<std::size_t>(n - 1), 'I') + "Z");
}

std::vector<PauliWord> KGBasis::k1_with_z() const {
  std::vector<PauliWord> out = k1_set;
  out.push_back(z_word());
  return out;
}

KGBasis build_kg_basis(int n) {
  if (n < 2) throw Error(ErrorKind::DimMismatch, "Khaneja-Glaser basis needs n >= 2");
  KGBasis basis;
  basis.n = n;

  std::vector<std::string> m, k, k0, k1;
  const std::vector<std::string> previous =
      n == 2 ? std::vector<std::string>{"X", "Y", "Z"} : all_nonidentity_labels(n - 1);
  for (const auto &w : previous) {
    k0.push_back(w + "I");
    k1.push_back(w + "Z");
  }
  if (n == 2) {
    for (char a : {'X', 'Y', 'Z'}) {
      for (char b : {'X', 'Y', 'Z'}) m.push_back(std::string{a, b});
      k.push_back(std::string{a, 'I'});
      k.push_back(std::string{'I', a});
    }
  } else {
    // G_{n-1} is every non-identity word on n-1 qubits.
    const std::string idle(static_cast<std::size_t>(n - 1), 'I');
    m = {idle + "X", idle + "Y"};
    for (const auto &w : previous) {
      m.push_back(w + "X");
      m.push_back(w + "Y");
    }
    k = {idle + "Z"};
    k.insert(k.end(), k0.begin(), k0.end());
    k.insert(k.end(), k1.begin(), k1.end());
  }

  basis.m_set = to_words(sorted_unique(std::move(m)));
  basis.k_set = to_words(sorted_unique(std::move(k)));
  basis.k0_set = to_words(sorted_unique(std::move(k0)));
  basis.k1_set = to_words(sorted_unique(std::move(k1)));
  basis.h_set = to_words(h_labels(n));
  basis.f_set = to_words(f_labels(n));
  return basis;
}

std::shared_ptr<const KGBasis> cached_kg_basis(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const KGBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_shared<const KGBasis>(build_kg_basis(n))).first;
  }
  return it->second;
}

std::vector<PauliWord> order_cartan_basis(std::vector<PauliWord> words) {
  std::stable_sort(words.begin(), words.end(),
                   [](const PauliWord &a, const PauliWord &b) { return a.label() < b.label(); });
  return words;
}

std::string dump_basis(const KGBasis &basis) {
  std::ostringstream out;
  auto emit = [&](const char *name, const std::vector<PauliWord> &set) {
    for (const auto &w : set) out << name << ' ' << w.label() << '\n';
  };
  emit("M", basis.m_set);
  emit("K", basis.k_set);
  emit("K0", basis.k0_set);
  emit("K1", basis.k1_set);
  emit("H", basis.h_set);
  emit("F", basis.f_set);
  return out.str();
}

}  // namespace khk
