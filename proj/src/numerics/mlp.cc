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

#include "resgrasp/numerics/mlp.h"

#include <cmath>
#include <sstream>

#include "resgrasp/numerics/errors.h"

namespace resgrasp {
namespace {

Matrix OrthogonalMatrix(int rows, int cols, Rng& rng) {
  const bool tall = rows >= cols;
  const int n = tall ? rows : cols;
  const int m = tall ? cols : rows;
  Matrix a(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = rng.Normal();
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, m);
  const Matrix r = qr.matrixQR().topLeftCorner(m, m);
  // Fix the sign ambiguity of QR so the result is uniformly distributed.
  for (int j = 0; j < m; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (tall) return q;
  return q.transpose();
}

void ApplyElu(Matrix& m) {
  m = m.unaryExpr([](double x) { return Elu(x); });
}

}  // namespace

std::vector<Matrix*> MlpParams::Tensors() {
  std::vector<Matrix*> out;
  for (size_t l = 0; l < weights.size(); ++l) {
    out.push_back(&weights[l]);
    out.push_back(&biases[l]);
  }
  return out;
}

std::vector<const Matrix*> MlpParams::Tensors() const {
  std::vector<const Matrix*> out;
  for (size_t l = 0; l < weights.size(); ++l) {
    out.push_back(&weights[l]);
    out.push_back(&biases[l]);
  }
  return out;
}

MlpParams MlpParams::ZerosLike() const {
  MlpParams z;
  z.layer_sizes = layer_sizes;
  for (size_t l = 0; l < weights.size(); ++l) {
    z.weights.push_back(Matrix::Zero(weights[l].rows(), weights[l].cols()));
    z.biases.push_back(Matrix::Zero(biases[l].rows(), biases[l].cols()));
  }
  return z;
}

double Elu(double x) { return x > 0.0 ? x : std::expm1(x); }

// Both one-sided limits equal 1 at the origin.
double EluDerivative(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

MlpParams InitMlp(const std::vector<int>& layer_sizes, Rng& rng,
                  double hidden_gain, double output_gain) {
  if (layer_sizes.size() < 2) {
    throw DimensionError("InitMlp: need at least input and output sizes");
  }
  MlpParams p;
  p.layer_sizes = layer_sizes;
  const size_t n = layer_sizes.size() - 1;
  for (size_t l = 0; l < n; ++l) {
    if (layer_sizes[l] <= 0 || layer_sizes[l + 1] <= 0) {
      throw DimensionError("InitMlp: layer sizes must be positive");
    }
    const double gain = (l + 1 == n) ? output_gain : hidden_gain;
    p.weights.push_back(
        gain * OrthogonalMatrix(layer_sizes[l], layer_sizes[l + 1], rng));
    p.biases.push_back(Matrix::Zero(1, layer_sizes[l + 1]));
  }
  return p;
}

void ValidateMlp(const MlpParams& params) {
  const size_t n = params.weights.size();
  if (params.layer_sizes.size() != n + 1 || params.biases.size() != n ||
      n == 0) {
    throw DimensionError("MLP: layer count mismatch");
  }
  for (size_t l = 0; l < n; ++l) {
    std::ostringstream ctx;
    ctx << "MLP layer " << l;
    CheckShape(params.weights[l], params.layer_sizes[l],
               params.layer_sizes[l + 1], ctx.str() + " weight");
    CheckShape(params.biases[l], 1, params.layer_sizes[l + 1],
               ctx.str() + " bias");
  }
}

Matrix MlpForward(const MlpParams& params, const Matrix& batch,
                  MlpCache* cache) {
  if (batch.cols() != params.input_size()) {
    std::ostringstream msg;
    msg << "MlpForward: batch has " << batch.cols()
        << " columns, network expects " << params.input_size();
    throw DimensionError(msg.str());
  }
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre_activations.clear();
  }
  Matrix h = batch;
  const int n = params.num_layers();
  for (int l = 0; l < n; ++l) {
    Matrix z = h * params.weights[l];
    z.rowwise() += params.biases[l].row(0);
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(h));
      cache->pre_activations.push_back(z);
    }
    if (l + 1 < n) ApplyElu(z);
    h = std::move(z);
  }
  return h;
}

MlpBackwardResult MlpBackward(const MlpParams& params, const MlpCache& cache,
                              const Matrix& upstream) {
  const int n = params.num_layers();
  if (static_cast<int>(cache.inputs.size()) != n) {
    throw DimensionError("MlpBackward: cache does not match network depth");
  }
  const Eigen::Index batch = cache.inputs.front().rows();
  CheckShape(upstream, batch, params.output_size(), "MlpBackward upstream");

  MlpBackwardResult out;
  out.param_grads.layer_sizes = params.layer_sizes;
  out.param_grads.weights.resize(n);
  out.param_grads.biases.resize(n);

  Matrix g = upstream;
  for (int l = n - 1; l >= 0; --l) {
    out.param_grads.weights[l] = cache.inputs[l].transpose() * g;
    out.param_grads.biases[l] = g.colwise().sum();
    Matrix below = g * params.weights[l].transpose();
    if (l > 0) {
      const Matrix& z = cache.pre_activations[l - 1];
      below = below.cwiseProduct(
          z.unaryExpr([](double x) { return EluDerivative(x); }));
    }
    g = std::move(below);
  }
  out.input_grads = std::move(g);
  return out;
}

MlpBackwardResult MlpBackward(const MlpParams& params, const Matrix& batch,
                              const Matrix& upstream) {
  MlpCache cache;
  MlpForward(params, batch, &cache);
  return MlpBackward(params, cache, upstream);
}

}  // namespace resgrasp
