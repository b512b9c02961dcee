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

#include "khk/involution.hpp"

#include "khk/errors.hpp"

namespace khk {

AxisInvolution::AxisInvolution(int n, Axis axis) : n_(n), axis_(axis) {
  if (n < 1) throw Error(ErrorKind::DimMismatch, "involution needs n >= 1");
  Matrix sigma(2, 2);
  if (axis == Axis::Z) {
    sigma << 1, 0, 0, -1;
  } else {
    sigma << 0, 1, 1, 0;
  }
  conjugator_ = kron(qubit_identity(n - 1), sigma);
}

Matrix AxisInvolution::apply(const Matrix &a) const {
  const Eigen::Index dim = conjugator_.rows();
  if (a.rows() != dim || a.cols() != dim) {
    throw Error(ErrorKind::DimMismatch, "involution on " + std::to_string(n_) +
                                            " qubits applied to a " +
                                            std::to_string(a.rows()) + "x" +
                                            std::to_string(a.cols()) + " matrix");
  }
  // The conjugators are a sign mask (Z) or the last-bit swap (X).
  Matrix out(dim, dim);
  if (axis_ == Axis::Z) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        out(r, c) = ((r ^ c) & 1) ? -a(r, c) : a(r, c);
      }
    }
  } else {
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) out(r, c) = a(r ^ 1, c ^ 1);
    }
  }
  return out;
}

EigenSplit eigensplit(const AxisInvolution &inv, const Matrix &a) {
  const Matrix image = inv.apply(a);
  EigenSplit out;
  out.plus = AlgebraElement(0.5 * (a + image));
  out.minus = AlgebraElement(a - out.plus.matrix);
  return out;
}

}  // namespace khk
