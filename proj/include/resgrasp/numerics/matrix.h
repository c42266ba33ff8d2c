// Copyright 2026 The ResGrasp Authors
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

#ifndef RESGRASP_NUMERICS_MATRIX_H_
#define RESGRASP_NUMERICS_MATRIX_H_

#include <Eigen/Dense>
#include <string>

namespace resgrasp {

// Dense row-major matrix of doubles. Batches are laid out one sample per row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Throws DimensionError with `context` if the shapes differ.
void CheckShape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                const std::string& context);

bool AllFinite(const Matrix& m);

}  // namespace resgrasp

#endif  // RESGRASP_NUMERICS_MATRIX_H_
