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

#pragma once

#include "khk/linalg.hpp"

namespace khk {

enum class Axis { Z, X };

// Conjugation by C = I^(n-1) (x) sigma_axis. C is Hermitian, unitary and its
// own inverse, so the map is an involutive automorphism on both the group
// and the algebra.
class AxisInvolution {
 public:
  AxisInvolution(int n, Axis axis);

  int n() const noexcept { return n_; }
  Axis axis() const noexcept { return axis_; }
  const Matrix &conjugator() const noexcept { return conjugator_; }

  /// C * a * C. Throws DimMismatch unless a is 2^n x 2^n.
  Matrix apply(const Matrix &a) const;
  Matrix operator()(const Matrix &a) const { return apply(a); }

 private:
  int n_;
  Axis axis_;
  Matrix conjugator_;
};

struct EigenSplit {
  AlgebraElement plus;   // (a + Theta(a)) / 2
  AlgebraElement minus;  // (a - Theta(a)) / 2
};

EigenSplit eigensplit(const AxisInvolution &inv, const Matrix &a);

}  // namespace khk
