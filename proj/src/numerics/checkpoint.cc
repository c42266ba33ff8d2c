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

#include "resgrasp/numerics/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace resgrasp {
namespace {

template <typename T>
void PutLe(std::string& out, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  bool AtEnd() const { return pos_ == bytes_.size(); }

  template <typename T>
  T GetLe() {
    Need(sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string GetBytes(size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw std::runtime_error("checkpoint: truncated record");
    }
  }
  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

NamedTensor NamedTensor::FromMatrix(std::string name, const Matrix& m) {
  NamedTensor t;
  t.name = std::move(name);
  t.dims = {static_cast<uint64_t>(m.rows()), static_cast<uint64_t>(m.cols())};
  t.data.assign(m.data(), m.data() + m.size());
  return t;
}

NamedTensor NamedTensor::Scalar(std::string name, double value) {
  NamedTensor t;
  t.name = std::move(name);
  t.data = {value};
  return t;
}

NamedTensor NamedTensor::FromVector(std::string name,
                                    const std::vector<double>& v) {
  NamedTensor t;
  t.name = std::move(name);
  t.dims = {static_cast<uint64_t>(v.size())};
  t.data = v;
  return t;
}

Matrix NamedTensor::ToMatrix() const {
  if (dims.size() != 2) {
    throw std::runtime_error("checkpoint: tensor " + name + " is not rank 2");
  }
  Matrix m(dims[0], dims[1]);
  std::memcpy(m.data(), data.data(), data.size() * sizeof(double));
  return m;
}

std::string EncodeCheckpoint(const std::vector<NamedTensor>& tensors) {
  std::string out(kCheckpointMagic, 4);
  PutLe<uint32_t>(out, kCheckpointVersion);
  for (const NamedTensor& t : tensors) {
    uint64_t count = 1;
    for (uint64_t d : t.dims) count *= d;
    if (count != t.data.size()) {
      throw std::runtime_error("checkpoint: tensor " + t.name +
                               " payload does not match dims");
    }
    PutLe<uint32_t>(out, static_cast<uint32_t>(t.name.size()));
    out += t.name;
    PutLe<uint32_t>(out, static_cast<uint32_t>(t.dims.size()));
    for (uint64_t d : t.dims) PutLe<uint64_t>(out, d);
    for (double x : t.data) PutLe<uint64_t>(out, std::bit_cast<uint64_t>(x));
  }
  return out;
}

std::vector<NamedTensor> DecodeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.GetBytes(4) != std::string(kCheckpointMagic, 4)) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const uint32_t version = r.GetLe<uint32_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version));
  }
  std::vector<NamedTensor> out;
  while (!r.AtEnd()) {
    NamedTensor t;
    t.name = r.GetBytes(r.GetLe<uint32_t>());
    const uint32_t rank = r.GetLe<uint32_t>();
    uint64_t count = 1;
    for (uint32_t i = 0; i < rank; ++i) {
      t.dims.push_back(r.GetLe<uint64_t>());
      count *= t.dims.back();
    }
    t.data.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
      t.data.push_back(std::bit_cast<double>(r.GetLe<uint64_t>()));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::string& path, const std::string& bytes) {
  const std::filesystem::path parent =
      std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void WriteCheckpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors) {
  WriteFileBytes(path, EncodeCheckpoint(tensors));
}

std::vector<NamedTensor> ReadCheckpoint(const std::string& path) {
  return DecodeCheckpoint(ReadFileBytes(path));
}

const NamedTensor& FindTensor(const std::vector<NamedTensor>& tensors,
                              const std::string& name) {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("checkpoint: missing tensor " + name);
}

bool HasTensor(const std::vector<NamedTensor>& tensors,
               const std::string& name) {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

}  // namespace resgrasp
