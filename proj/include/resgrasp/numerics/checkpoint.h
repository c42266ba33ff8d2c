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

#ifndef RESGRASP_NUMERICS_CHECKPOINT_H_
#define RESGRASP_NUMERICS_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "resgrasp/numerics/matrix.h"

namespace resgrasp {

// Binary checkpoint layout:
//   "RDX1" | u32 version | record*
//   record = u32 name_len | name bytes | u32 rank | u64 dims[rank]
//            | f64 payload[prod(dims)]
// All integers and floats little-endian. Records run to end of file.
inline constexpr char kCheckpointMagic[4] = {'R', 'D', 'X', '1'};
inline constexpr uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<uint64_t> dims;
  std::vector<double> data;

  static NamedTensor FromMatrix(std::string name, const Matrix& m);
  static NamedTensor Scalar(std::string name, double value);
  static NamedTensor FromVector(std::string name, const std::vector<double>& v);
  Matrix ToMatrix() const;
};

std::string EncodeCheckpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> DecodeCheckpoint(const std::string& bytes);

void WriteCheckpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> ReadCheckpoint(const std::string& path);

// Lookup helpers; throw std::runtime_error when the tensor is missing.
const NamedTensor& FindTensor(const std::vector<NamedTensor>& tensors,
                              const std::string& name);
bool HasTensor(const std::vector<NamedTensor>& tensors,
               const std::string& name);

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, const std::string& bytes);

}  // namespace resgrasp

#endif  // RESGRASP_NUMERICS_CHECKPOINT_H_
