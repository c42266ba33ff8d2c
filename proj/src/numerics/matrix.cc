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

#include "resgrasp/numerics/matrix.h"

#include <sstream>

#include "resgrasp/numerics/errors.h"

namespace resgrasp {

void CheckShape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                const std::string& context) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << context << ": expected " << rows << "x" << cols << ", got "
        << m.rows() << "x" << m.cols();
    throw DimensionError(msg.str());
  }
}

bool AllFinite(const Matrix& m) { return m.allFinite(); }

}  // namespace resgrasp
