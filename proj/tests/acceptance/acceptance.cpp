// Copyright 2026 The hdrgan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the eleven acceptance criteria and prints one PASS/FAIL line for each.
//
//   hdrgan_acceptance [--only 1,2,...] [--cli path/to/hdrgan] [--work DIR] [--keep]
//
// Exit status is 0 when every criterion passes or fails only where listed in
// kKnownFailures, 1 otherwise.

#include <Eigen/Dense>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdrgan/denoiser/denoiser.hpp"
#include "hdrgan/flowalign/flow.hpp"
#include "hdrgan/losses/losses.hpp"
#include "hdrgan/metrics/metrics.hpp"
#include "hdrgan/networks/networks.hpp"
#include "hdrgan/radiometry/image_io.hpp"
#include "hdrgan/radiometry/radiometry.hpp"
#include "hdrgan/trainer/trainer.hpp"
#include "support/gradcheck.hpp"
#include "support/lcg_images.hpp"
#include "support/oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hdrgan;
using nn::Var;
using testing::Dims;
using testing::RandomVector;

// Tolerances and budgets.
constexpr double kRadiometryTol = 1e-6;
constexpr double kRadiometrySeconds = 10.0;
constexpr double kWarpTol = 1e-6;
constexpr double kOracleTol = 1e-6;
constexpr double kAdversarialTol = 1e-9;
constexpr double kReconstructionUnitParts = 1036.0;
constexpr double kGradRelTol = 1e-3;
constexpr double kGradSeconds = 120.0;
constexpr int kSpectralMatrices = 100;
constexpr int kPowerIterations = 50;
constexpr int kMinPowerIterations = 10;
constexpr double kSigmaLo = 0.95, kSigmaHi = 1.05;
constexpr int kDenoiserFrames = 4;
constexpr float kDenoiserSigma = 0.03f;
constexpr int kDenoiserMaxEpochs = 50;
constexpr double kDenoiserGainDb = 3.0;
constexpr double kDenoiserSeconds = 600.0;
constexpr int kOverfitPatches = 16;
constexpr int kOverfitPatchSide = 64;
constexpr long long kOverfitMaxSteps = 2000;
constexpr double kOverfitTargetDb = 30.0;
constexpr double kOverfitSeconds = 3600.0;
constexpr double kPsnrRefTol = 1e-4;
constexpr double kSsimRefTol = 1e-3;
constexpr double kClosedFormDb = 48.13;
constexpr double kClosedFormTol = 5e-3;
constexpr double kEndToEndSeconds = 1800.0;

// Criteria expected to fail in this build. Each is analyzed in the README.
const std::set<int> kKnownFailures = {9};

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Note(const std::string& s) { notes.push_back(s); }
  void Expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      Note("FAILED " + what);
    }
  }
  // Records "label value < tol" and fails if it does not hold.
  void Below(const std::string& label, double value, double tol) {
    std::ostringstream s;
    s << label << ' ' << std::setprecision(3) << value << (value < tol ? " < " : " >= ") << tol;
    Note(s.str());
    if (!(value < tol)) pass = false;
  }
};

std::string Fixed(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Raster RandomRaster(int h, int w, int c, uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  Raster r(h, w, c);
  for (float& v : r.data()) v = u(rng);
  return r;
}

double MaxAbsDiff(std::span<const float> a, std::span<const float> b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(static_cast<double>(a[i]) - b[i]));
  return worst;
}

Var<double> Tensor(Dims d, const std::vector<double>& v) { return Var<double>::Constant({d.n, d.c, d.h, d.w}, v); }

struct Context {
  fs::path work;
  fs::path cli;
};

// 1 -----------------------------------------------------------------------
Outcome RadiometricInvariants(const Context&) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();

  bool monotone = true, endpoints = true;
  for (double mu : {0.5, 10.0, 5000.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 10000; ++i) {
      const double t = radiometry::TonemapValue(i / 10000.0, mu);
      monotone = monotone && t > prev;
      prev = t;
    }
    endpoints = endpoints && radiometry::TonemapValue(0.0, mu) == 0.0 &&
                std::abs(radiometry::TonemapValue(1.0, mu) - 1.0) < 1e-12;
  }
  o.Expect(monotone, "tonemap strictly increasing");
  o.Expect(endpoints, "tonemap maps 0 to 0 and 1 to 1");
  o.Note(std::string("monotone/endpoints ") + (monotone && endpoints ? "ok" : "broken"));

  radiometry::TonemappedFrame t{RandomRaster(64, 64, 3, 4)};
  const auto back = radiometry::Tonemap(radiometry::InverseTonemap(t));
  o.Below("tonemap(inverse(t)) err", MaxAbsDiff(back.data.data(), t.data.data()), kRadiometryTol);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double h = u(rng);
    worst = std::max(worst, std::abs(radiometry::InverseTonemapValue(radiometry::TonemapValue(h, 5000.0), 5000.0) - h));
  }
  o.Below("inverse(tonemap(h)) err", worst, kRadiometryTol);

  worst = 0.0;
  for (float time : {1.0f, 2.0f, 8.0f}) {
    radiometry::LinearHDRFrame h{RandomRaster(64, 64, 3, 6, 0.0f, 0.999f / time)};
    const auto lin = radiometry::LinearizeLdr(radiometry::SimulateLdr(h, time));
    worst = std::max(worst, MaxAbsDiff(lin.data.data(), h.data.data()));
  }
  o.Below("linearize(simulate(h)) err", worst, kRadiometryTol);

  const auto ldr = radiometry::SimulateLdr({RandomRaster(32, 32, 3, 7)}, 1.0f);
  const radiometry::NoiseSpec spec{0.0f, 0.01f, 0.05f, 42};
  const bool same = radiometry::AddNoise(ldr, spec).data == radiometry::AddNoise(ldr, spec).data;
  const bool differs = radiometry::AddNoise(ldr, spec).data != radiometry::AddNoise(ldr, {0.0f, 0.01f, 0.05f, 43}).data;
  o.Expect(same && differs, "noise reproducible under seed");
  o.Note(std::string("noise seeded ") + (same && differs ? "ok" : "broken"));
  o.Below("runtime s", Seconds(t0), kRadiometrySeconds);
  return o;
}

// 2 -----------------------------------------------------------------------
Outcome WarpSuite(const Context&) {
  using flowalign::FlowField;
  using flowalign::WarpBackward;
  Outcome o;
  const Raster f = RandomRaster(17, 23, 3, 1);
  o.Expect(WarpBackward(f, FlowField::Zero(17, 23)) == f, "zero flow is the identity");
  o.Note(std::string("zero flow ") + (o.pass ? "exact" : "inexact"));

  FlowField shift = FlowField::Zero(17, 23);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 23; ++x) {
      shift.data.at(y, x, 0) = 3.0f;
      shift.data.at(y, x, 1) = -2.0f;
    }
  const Raster moved = WarpBackward(f, shift);
  bool exact = true;
  for (int y = 2; y < 17; ++y)
    for (int x = 0; x < 20; ++x)
      for (int c = 0; c < 3; ++c) exact = exact && moved.at(y, x, c) == f.at(y - 2, x + 3, c);
  o.Expect(exact, "integer shift exact on interior");
  o.Note(std::string("integer shift ") + (exact ? "exact" : "inexact"));

  Raster checker(8, 10, 1);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 10; ++x) checker.at(y, x, 0) = static_cast<float>((x * 7 + y * 3) % 5) / 4.0f;
  FlowField half = FlowField::Zero(8, 10);
  for (float& v : half.data.data()) v = 0.5f;
  const Raster hw = WarpBackward(checker, half);
  double worst = 0.0;
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) {
      const double expected = 0.25 * (checker.at(y, x, 0) + checker.at(y, x + 1, 0) + checker.at(y + 1, x, 0) +
                                      checker.at(y + 1, x + 1, 0));
      worst = std::max(worst, std::abs(hw.at(y, x, 0) - expected));
    }
  o.Below("half-pixel err", worst, kWarpTol);

  const Raster a = RandomRaster(12, 13, 3, 3), b = RandomRaster(12, 13, 3, 4);
  FlowField flow{RandomRaster(12, 13, 2, 5, -3.0f, 3.0f)};
  Raster combo(12, 13, 3);
  for (size_t i = 0; i < combo.size(); ++i) combo.data()[i] = 2.0f * a.data()[i] - 0.5f * b.data()[i];
  const Raster wa = WarpBackward(a, flow), wb = WarpBackward(b, flow), wc = WarpBackward(combo, flow);
  worst = 0.0;
  for (size_t i = 0; i < wc.size(); ++i)
    worst = std::max(worst, std::abs(wc.data()[i] - (2.0 * wa.data()[i] - 0.5 * wb.data()[i])));
  o.Below("linearity err", worst, kWarpTol);
  return o;
}

// Oracle features of a conv stack, layer by layer.
std::vector<std::pair<std::vector<double>, Dims>> OracleFeatures(const std::vector<losses::ConvSpec>& layers,
                                                                 bool pool, std::vector<double> x, Dims d) {
  std::vector<std::pair<std::vector<double>, Dims>> out;
  for (size_t i = 0; i < layers.size(); ++i) {
    if (pool && i > 0 && d.h % 2 == 0 && d.w % 2 == 0) x = testing::OracleMaxPool(x, d, &d);
    x = testing::OracleConvRelu(x, d, layers[i].weight, layers[i].bias, layers[i].cout, layers[i].kernel, &d);
    out.push_back({x, d});
  }
  return out;
}

// 3 -----------------------------------------------------------------------
Outcome LossOracles(const Context&) {
  using namespace losses;
  Outcome o;
  const Dims d{2, 3, 8, 8};
  const auto a = RandomVector(d.size(), 10, 0, 1), b = RandomVector(d.size(), 11, 0, 1);

  o.Below("L1 err", std::abs(L1Loss(Tensor(d, a), Tensor(d, b)).item() - testing::OracleMeanAbs(a, b)), kOracleTol);

  IdentityExtractor<double> id;
  o.Below("content err",
          std::abs(ContentLoss(id, Tensor(d, a), Tensor(d, b)).item() - testing::OracleMeanAbs(b, a)), kOracleTol);

  const auto g = GramMatrix(Tensor(d, a));
  const auto go = testing::OracleGram(a, d);
  double worst = 0.0;
  auto gv = g.value();
  for (size_t i = 0; i < go.size(); ++i) worst = std::max(worst, std::abs(gv[i] - go[i]));
  o.Below("gram err", worst, kOracleTol);

  const int widths[] = {4, 6};
  const auto layers = RandomConvLayers(9, widths);
  ConvStackExtractor<double> ex(layers, true, "random-conv");
  const auto fa = OracleFeatures(layers, true, a, d), fb = OracleFeatures(layers, true, b, d);
  double style = 0.0;
  for (size_t j = 0; j < fa.size(); ++j) {
    const auto ga = testing::OracleGram(fa[j].first, fa[j].second);
    const auto gb = testing::OracleGram(fb[j].first, fb[j].second);
    double s = 0.0;
    for (size_t i = 0; i < ga.size(); ++i) s += std::abs(gb[i] - ga[i]);
    style += s / d.n;
  }
  style /= fa.size();
  o.Below("style err", std::abs(StyleLoss(ex, Tensor(d, a), Tensor(d, b)).item() - style), kOracleTol);

  const auto flow = RandomVector(2 * 2 * 64, 16, -2.0, 2.0);
  const double reg = std::sqrt(testing::OracleMse(a, testing::OracleWarp(b, d, flow)));
  o.Below("temporal-reg err",
          std::abs(TemporalRegLoss(Tensor(d, a), Tensor(d, b), std::span<const double>(flow)).item() - reg),
          kOracleTol);

  auto [gt, pred] = testing::LcgPair(3);
  double se = 0.0;
  for (size_t i = 0; i < gt.size(); ++i) se += std::pow(static_cast<double>(gt.data()[i]) - pred.data()[i], 2);
  o.Below("MSE err", std::abs(metrics::Mse(gt, pred) - se / gt.size()), kOracleTol);

  const auto half = Var<double>::Full({4, 1}, 0.5);
  o.Below("adversarial |L - 2 log 2|", std::abs(DiscriminatorLoss(half, half).item() - 2.0 * std::log(2.0)),
          kAdversarialTol);

  const double rec = ReconstructionLoss(LossWeights{}, 1, 1, 1, 1);
  o.Expect(rec == kReconstructionUnitParts, "reconstruction loss of unit parts");
  o.Note("L_rec(1,1,1,1) = " + Fixed(rec, 1));
  return o;
}

// 4 -----------------------------------------------------------------------
Outcome GradientSuite(const Context&) {
  using namespace losses;
  using testing::CheckGradient;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Dims d{1, 3, 8, 8};
  const nn::Shape shape{1, 3, 8, 8};
  const auto gt = Tensor(d, RandomVector(d.size(), 20, 0, 1));
  const auto x0 = RandomVector(d.size(), 21, 0, 1);
  const int widths[] = {4, 4, 4};
  ConvStackExtractor<double> ex(RandomConvLayers(2, widths), true, "random-conv");
  const auto flow = testing::InteriorFlow(1, 8, 8, 22);

  double worst = 0.0;
  int checks = 0;
  std::string worst_name;
  auto check = [&](const std::string& name, const std::function<Var<double>(const Var<double>&)>& f,
                   const nn::Shape& s, const std::vector<double>& x) {
    ++checks;
    const double e = CheckGradient(f, s, x).relative_error;
    if (!(e < kGradRelTol)) o.Expect(false, name + " gradient (" + Fixed(e, 6) + ")");
    if (e > worst || worst_name.empty()) {
      worst = e;
      worst_name = name;
    }
  };
  check("L1", [&](const Var<double>& x) { return L1Loss(x, gt); }, shape, x0);
  check("content", [&](const Var<double>& x) { return ContentLoss(ex, x, gt); }, shape, x0);
  check("style", [&](const Var<double>& x) { return StyleLoss(ex, x, gt); }, shape, x0);
  check("temporal-reg(current)",
        [&](const Var<double>& x) { return TemporalRegLoss(x, gt, std::span<const double>(flow)); }, shape, x0);
  check("temporal-reg(previous)",
        [&](const Var<double>& x) { return TemporalRegLoss(gt, x, std::span<const double>(flow)); }, shape, x0);
  check("adversarial(D real)",
        [&](const Var<double>& p) { return DiscriminatorLoss(p, Var<double>::Constant({4, 1}, {0.2, 0.4, 0.6, 0.8})); },
        {4, 1}, {0.3, 0.5, 0.7, 0.9});
  check("adversarial(D fake)",
        [&](const Var<double>& p) { return DiscriminatorLoss(Var<double>::Constant({4, 1}, {0.6, 0.7, 0.8, 0.9}), p); },
        {4, 1}, {0.1, 0.3, 0.5, 0.7});
  networks::DiscriminatorModel<double> disc({5, 2, 2, 0.2}, 4);
  const auto prev = Tensor(d, RandomVector(d.size(), 23, 0, 1));
  check("adversarial(G through D)",
        [&](const Var<double>& x) {
          return GeneratorAdversarialLoss(disc.Forward(nn::ConcatChannels<double>({x, prev}), false));
        },
        shape, x0);
  check("denoiser L1",
        [&](const Var<double>& x) { return denoiser::DenoiserLoss(x, gt, denoiser::DenoiserLossKind::kL1); }, shape,
        x0);
  check("denoiser L2",
        [&](const Var<double>& x) { return denoiser::DenoiserLoss(x, gt, denoiser::DenoiserLossKind::kL2); }, shape,
        x0);
  const auto frame = Tensor(d, x0);
  const auto flow_var = Var<double>::Constant({1, 2, 8, 8}, flow);
  check("warp(frame)", [&](const Var<double>& x) { return testing::WeightedSum(nn::WarpBackward(x, flow_var)); },
        shape, x0);
  check("warp(flow)", [&](const Var<double>& f) { return testing::WeightedSum(nn::WarpBackward(frame, f)); },
        {1, 2, 8, 8}, flow);
  o.Note(std::to_string(checks) + " gradients, worst " + worst_name + " rel err " + Fixed(worst, 8) + " (tol 1e-3)");
  o.Below("runtime s", Seconds(t0), kGradSeconds);
  return o;
}

double TopSingularValue(const std::vector<double>& w, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = w[static_cast<size_t>(r) * cols + c];
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// 5 -----------------------------------------------------------------------
Outcome SpectralNorm(const Context&) {
  Outcome o;
  // Returns the range of the true top singular value over the same 100 matrices.
  auto sweep = [](int iterations) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(2, 64);
    std::normal_distribution<double> normal(0.0, 1.0);
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k < kSpectralMatrices; ++k) {
      const int rows = dim(rng), cols = dim(rng) * 3;
      std::vector<double> w(static_cast<size_t>(rows) * cols);
      for (double& e : w) e = normal(rng);
      nn::PowerIterationState<double> state;
      const auto r = networks::SpectralNormalize(w, rows, cols, state, iterations);
      const double s = TopSingularValue(r.weight, rows, cols);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return std::pair{lo, hi};
  };
  const auto [lo, hi] = sweep(kPowerIterations);
  const auto [lo10, hi10] = sweep(kMinPowerIterations);
  o.Expect(lo >= kSigmaLo && hi <= kSigmaHi, "top singular value within [0.95, 1.05]");
  o.Note(std::to_string(kSpectralMatrices) + " matrices, " + std::to_string(kPowerIterations) +
         " iterations: sigma_max in [" + Fixed(lo, 4) + ", " + Fixed(hi, 4) + "] (with " +
         std::to_string(kMinPowerIterations) + ": [" + Fixed(lo10, 4) + ", " + Fixed(hi10, 4) + "])");
  return o;
}

size_t ConvParams(size_t cin, size_t cout, size_t k) { return cin * cout * k * k + cout; }

// 6 -----------------------------------------------------------------------
Outcome ArchitectureContracts(const Context&) {
  Outcome o;
  const size_t b = 64;
  const size_t g_table = ConvParams(12, b, 7) + ConvParams(b, 2 * b, 3) + ConvParams(2 * b, 4 * b, 3) +
                         8 * 2 * ConvParams(4 * b, 4 * b, 3) + ConvParams(4 * b, 2 * b, 4) +
                         ConvParams(2 * b, b, 4) + ConvParams(b, 3, 7);
  const size_t d_table = ConvParams(6, b, 3) + ConvParams(b, 2 * b, 3) + ConvParams(2 * b, 4 * b, 3) +
                         ConvParams(4 * b, 8 * b, 3) + ConvParams(8 * b, 8 * b, 3) + (8 * b * 8 * b + 8 * b) +
                         (8 * b + 1);
  networks::Generator g({12, 64, 8, 3}, 1);
  networks::Discriminator disc({5, 2, 64, 0.2}, 1);
  o.Expect(g.parameter_count() == g_table, "generator parameter count");
  o.Expect(disc.parameter_count() == d_table, "discriminator parameter count");
  o.Note("G params " + std::to_string(g.parameter_count()) + "/" + std::to_string(g_table) + ", D params " +
         std::to_string(disc.parameter_count()) + "/" + std::to_string(d_table));
  o.Expect(g.resblock_count() == 8, "8 residual blocks");
  o.Expect(disc.conv_layer_count() == 5 && disc.dense_layer_count() == 2, "5 conv + 2 dense");
  o.Note(std::to_string(g.resblock_count()) + " res-blocks, D " + std::to_string(disc.conv_layer_count()) +
         " conv + " + std::to_string(disc.dense_layer_count()) + " dense");

  networks::Generator small({12, 8, 8, 3}, 2);
  {
    nn::NoGradGuard no_grad;
    small.Forward(Var<float>::Full({1, 12, 64, 96}, 0.5f));
  }
  const auto bs = small.last_bottleneck_shape();
  o.Expect(bs[2] == 64 / 4 && bs[3] == 96 / 4, "bottleneck at H/4 x W/4");
  o.Note("bottleneck " + std::to_string(bs[2]) + "x" + std::to_string(bs[3]) + " for 64x96");

  networks::Generator g2({12, 64, 8, 3}, 1), g3({12, 64, 8, 3}, 2);
  networks::Discriminator d2({5, 2, 64, 0.2}, 1);
  const bool same = nn::ParameterDigest(g.state()) == nn::ParameterDigest(g2.state()) &&
                    nn::ParameterDigest(disc.state()) == nn::ParameterDigest(d2.state());
  const bool differs = nn::ParameterDigest(g.state()) != nn::ParameterDigest(g3.state());
  o.Expect(same && differs, "same-seed builds bit-identical");
  o.Note(std::string("same-seed builds ") + (same ? "bit-identical" : "differ"));
  return o;
}

// Synthetic scenes ingested with noise sigma fixed to `sigma`.
dataio::DatasetManifest SyntheticManifest(const fs::path& root, int scenes, int frames, int test_count, float sigma,
                                          uint64_t seed, int width = 96, int height = 80) {
  dataio::SyntheticOptions so;
  so.width = width;
  so.height = height;
  so.frames = frames;
  so.seed = seed;
  fs::remove_all(root);
  dataio::WriteSyntheticDataset(root, scenes, so);
  dataio::IngestOptions io;
  io.test_count = test_count;
  io.noise.sigma_lo = sigma;
  io.noise.sigma_hi = sigma;
  io.noise.seed = seed + 1;
  return dataio::Ingest(root, io);
}

// 7 -----------------------------------------------------------------------
Outcome DenoiserOverfit(const Context& ctx) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = SyntheticManifest(ctx.work / "c7" / "data", 1, kDenoiserFrames, 0, kDenoiserSigma, 70);
  trainer::TrainConfig c;
  c.denoiser = {2, 16, 3};
  c.denoiser_epochs = kDenoiserMaxEpochs;
  c.denoiser_patch = 64;
  c.denoiser_batch = 4;
  c.denoiser_patches_per_frame = 4;
  c.learning_rate = 1e-3;
  c.seed = 7;
  trainer::EventLog log;
  trainer::TrainDenoisers(c, m, ctx.work / "c7" / "den", log);
  auto pair = trainer::LoadDenoisers(ctx.work / "c7" / "den");

  const auto hdr = dataio::LoadSceneFrames(m, m.scenes[0]);
  double noisy = 0.0, denoised = 0.0;
  for (int i = 0; i < kDenoiserFrames; ++i) {
    const auto clean = dataio::CleanLdr(m, hdr[i], i);
    const auto n = dataio::NoisyLdr(m, clean, m.scenes[0].id, i).frame;
    noisy += metrics::Psnr(clean.data, n.data);
    denoised += metrics::Psnr(clean.data, denoiser::Denoise(pair.ForExposureIndex(i), n).data);
  }
  noisy /= kDenoiserFrames;
  denoised /= kDenoiserFrames;
  o.Expect(denoised >= noisy + kDenoiserGainDb, "denoised PSNR >= noisy PSNR + 3 dB");
  o.Note(std::to_string(kDenoiserFrames) + " frames, sigma 0.03, " + std::to_string(kDenoiserMaxEpochs) +
         " epochs: noisy " + Fixed(noisy) + " dB, denoised " + Fixed(denoised) + " dB, gain " +
         Fixed(denoised - noisy) + " dB (need 3)");
  o.Below("runtime s", Seconds(t0), kDenoiserSeconds);
  return o;
}

trainer::TrainConfig ToyGanConfig() {
  trainer::TrainConfig c;
  c.denoiser = {2, 16, 3};
  c.denoiser_epochs = 30;
  c.denoiser_patch = 64;
  c.denoiser_batch = 4;
  c.generator.base_channels = 8;
  c.discriminator.base_channels = 8;
  c.gan_patch = kOverfitPatchSide;
  c.learning_rate = 1e-3;
  c.flow_backend = "pyramidal-lk";
  c.feature_extractor = "random-conv";
  return c;
}

// 8 -----------------------------------------------------------------------
Outcome GanOverfit(const Context& ctx) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  // 2 scenes x 4 training units x 2 patches = 16 patches.
  const auto m = SyntheticManifest(ctx.work / "c8" / "data", 2, 5, 0, 0.02f, 80);
  auto c = ToyGanConfig();
  c.gan_patches_per_frame = 2;
  c.stage1_batch = 4;
  c.stage1_epochs = static_cast<int>(kOverfitMaxSteps * c.stage1_batch / kOverfitPatches);
  c.stage2_epochs = 0;
  c.seed = 8;
  trainer::EventLog log(ctx.work / "c8" / "train.jsonl");
  trainer::TrainDenoisers(c, m, ctx.work / "c8" / "den", log);
  trainer::GanTrainer t(c, m, ctx.work / "c8" / "den", log);
  o.Expect(t.unit_count() == kOverfitPatches, "16 training patches");

  double psnr = t.TrainingPsnr(), best = psnr;
  long long best_step = 0;
  bool finite = true;
  std::string curve = "psnr@0 " + Fixed(psnr, 1);
  try {
    while (!t.done() && t.step() < kOverfitMaxSteps) {
      const auto r = t.Step();
      for (double v : {r.d_loss, r.g_loss}) finite = finite && std::isfinite(v);
      if (r.step % 100 == 0) {
        psnr = t.TrainingPsnr();
        if (psnr > best) best = psnr, best_step = r.step;
        if (r.step % 500 == 0) curve += ", @" + std::to_string(r.step) + " " + Fixed(psnr, 1);
        if (psnr >= kOverfitTargetDb) break;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumeric) throw;
    finite = false;
  }
  psnr = t.TrainingPsnr();
  o.Expect(finite, "all losses finite");
  o.Expect(psnr >= kOverfitTargetDb || best >= kOverfitTargetDb, "training-patch PSNR >= 30 dB");
  o.Note(std::to_string(t.step()) + " steps: final " + Fixed(psnr) + " dB, best " + Fixed(best) + " dB at step " +
         std::to_string(best_step) + " (need 30); " + curve + (finite ? "; losses finite" : "; non-finite loss"));
  o.Below("runtime s", Seconds(t0), kOverfitSeconds);
  return o;
}

// 9 -----------------------------------------------------------------------
Outcome AblationDirection(const Context& ctx) {
  Outcome o;
  const auto m = SyntheticManifest(ctx.work / "c9" / "data", 4, 5, 1, 0.03f, 90);
  auto c = ToyGanConfig();
  c.gan_patches_per_frame = 2;
  c.stage1_batch = 4;
  // 3 training scenes x 4 units x 2 patches = 24 patches; 6 steps per epoch.
  c.stage1_epochs = 150;
  c.stage2_batch = 4;
  c.stage2_epochs = 15;
  c.add_noise = true;
  c.seed = 9;
  trainer::EventLog log(ctx.work / "c9" / "ablate.jsonl");
  const auto r = trainer::RunAblation(c, m, ctx.work / "c9" / "run", log);
  const auto& with = r.variants.at(0);
  const auto& without = r.variants.at(1);
  o.Expect(with.mean_psnr >= without.mean_psnr, "with-denoiser PSNR >= without");
  o.Note("noisy test input: with denoiser " + Fixed(with.mean_psnr) + " dB / SSIM " + Fixed(with.mean_ssim, 3) +
         ", without " + Fixed(without.mean_psnr) + " dB / SSIM " + Fixed(without.mean_ssim, 3) + ", delta " +
         Fixed(r.delta_psnr) + " dB");
  return o;
}

// 10 ----------------------------------------------------------------------
Outcome MetricsCrossCheck(const Context&) {
  Outcome o;
  double psnr_err = 0.0, ssim_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    auto [g, p] = testing::LcgPair(i);
    psnr_err = std::max(psnr_err, std::abs(metrics::Psnr(g, p) - testing::kLcgReference[i][0]));
    ssim_err = std::max(ssim_err, std::abs(metrics::Ssim(g, p) - testing::kLcgReference[i][1]));
  }
  o.Below("20 pairs vs scikit-image: PSNR err dB", psnr_err, kPsnrRefTol);
  o.Below("SSIM err", ssim_err, kSsimRefTol);
  const double closed = metrics::PsnrFromMse(1.0, {255.0});
  o.Expect(std::abs(closed - kClosedFormDb) < kClosedFormTol, "MSE 1 at peak 255 gives 48.13 dB");
  o.Note("MSE=1@255 -> " + Fixed(closed, 4) + " dB");
  return o;
}

int Run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

// 11 ----------------------------------------------------------------------
Outcome EndToEnd(const Context& ctx) {
  Outcome o;
  if (ctx.cli.empty() || !fs::exists(ctx.cli)) {
    o.Expect(false, "hdrgan binary available (--cli)");
    return o;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path w = ctx.work / "c11";
  fs::remove_all(w);
  fs::create_directories(w);
  const std::string bin = Quote(ctx.cli);
  const std::string toy =
      " --seed 11 --learning-rate 0.001 --config " + Quote(w / "toy.json");
  std::ofstream(w / "toy.json") << R"({"denoiser": {"depth": 2, "base_channels": 16},
 "generator": {"base_channels": 8}, "discriminator": {"base_channels": 8}})";

  struct Stage {
    const char* name;
    std::string args;
  };
  const std::vector<Stage> stages = {
      {"synth", "synth " + Quote(w / "data") + " --scenes 2 --width 96 --height 80 --frames 6 --seed 11"},
      {"prepare-data", "prepare-data " + Quote(w / "data") + " -o " + Quote(w / "manifest.json") +
                           " --test-count 1 --seed 11"},
      {"train-denoiser", "train-denoiser --manifest " + Quote(w / "manifest.json") + " -o " + Quote(w / "den") +
                             " --denoiser-epochs 20 --denoiser-patch 64 --denoiser-batch 4" + toy},
      {"train", "train --manifest " + Quote(w / "manifest.json") + " --denoisers " + Quote(w / "den") + " -o " +
                    Quote(w / "gan") +
                    " --stage1-epochs 15 --stage1-batch 4 --stage2-epochs 3 --stage2-batch 4 --gan-patch 64" + toy},
      {"materialize", "materialize --manifest " + Quote(w / "manifest.json") + " -o " + Quote(w / "seq")},
      {"infer", "infer --checkpoint " + Quote(w / "gan" / "gan.ckpt") + " --sequence " + Quote(w / "seq") + " -o " +
                    Quote(w / "pred")},
      {"evaluate", "evaluate --sequence " + Quote(w / "seq") + " --prediction " + Quote(w / "pred") + " -o " +
                       Quote(w / "eval.json") + " --border 10"},
      {"report", "report --log " + Quote(w / "gan" / "train.jsonl") + " --eval " + Quote(w / "eval.json") + " -o " +
                     Quote(w / "report")},
  };
  for (const auto& s : stages) {
    const int code = Run(bin + " " + s.args);
    if (code != 0) {
      o.Expect(false, std::string(s.name) + " exit " + std::to_string(code));
      return o;
    }
  }

  // Valid HDR outputs: one per input frame, all finite and non-negative.
  fs::path scene_dir;
  for (const auto& e : fs::directory_iterator(w / "pred")) scene_dir = e.path();
  int frames = 0;
  bool valid = true;
  for (const auto& e : fs::directory_iterator(scene_dir)) {
    if (e.path().extension() != ".exr") continue;
    ++frames;
    const auto hdr = radiometry::ReadHdrFrame(e.path());
    valid = valid && hdr.data.height() == 80 && hdr.data.width() == 96;
    for (float v : hdr.data.data()) valid = valid && std::isfinite(v) && v >= 0.0f;
  }
  o.Expect(frames == 6, "6 HDR frames written");
  o.Expect(valid, "HDR outputs finite, non-negative, full size");

  const auto report = metrics::LoadReport(w / "eval.json");
  const bool well_formed = report.frames.size() == 5 && report.border_px == 10 && std::isfinite(report.mean_psnr) &&
                           std::isfinite(report.mean_ssim) && report.domain == "tonemapped";
  o.Expect(well_formed, "evaluation report well formed");
  const bool rendered = fs::exists(w / "report" / "metrics.csv") && fs::exists(w / "report" / "gan_loss.png");
  o.Expect(rendered, "report rendered");
  o.Note("8 commands ok; " + std::to_string(frames) + " HDR frames " + (valid ? "valid" : "INVALID") + "; report " +
         std::to_string(report.frames.size()) + " frames, PSNR " + Fixed(report.mean_psnr) + " dB, SSIM " +
         Fixed(report.mean_ssim, 3));
  o.Below("runtime s", Seconds(t0), kEndToEndSeconds);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)(const Context&);
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string cli, work;
  bool keep = false;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--cli", cli, "Path to the hdrgan command-line binary");
  app.add_option("--work", work, "Scratch directory (default: a fresh temporary directory)");
  app.add_flag("--keep", keep, "Keep the scratch directory");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.cli = cli;
  ctx.work = work.empty() ? fs::temp_directory_path() / ("hdrgan_acceptance_" + std::to_string(::getpid())) : fs::path(work);
  fs::create_directories(ctx.work);
  trainer::TrainConfig defaults;
  trainer::ApplyDevice(defaults);

  const std::vector<Criterion> criteria = {
      {1, "radiometric invariants", RadiometricInvariants},
      {2, "warp suite", WarpSuite},
      {3, "loss oracles", LossOracles},
      {4, "gradient suite", GradientSuite},
      {5, "spectral norm", SpectralNorm},
      {6, "architecture contracts", ArchitectureContracts},
      {7, "denoiser overfit", DenoiserOverfit},
      {8, "GAN overfit", GanOverfit},
      {9, "ablation direction", AblationDirection},
      {10, "metrics cross-check", MetricsCrossCheck},
      {11, "end-to-end smoke", EndToEnd},
  };

  int passed = 0, ran = 0, unexpected = 0;
  std::vector<int> known;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.Note(std::string("error: ") + e.what());
    }
    std::string notes;
    for (const auto& n : o.notes) notes += (notes.empty() ? "" : "; ") + n;
    const bool expected_fail = kKnownFailures.count(c.id) > 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.id << "] " << c.name << ": " << notes
              << " (" << Fixed(Seconds(t0), 1) << " s)" << (!o.pass && expected_fail ? " [known failure]" : "")
              << std::endl;
    if (o.pass) {
      ++passed;
    } else if (expected_fail) {
      known.push_back(c.id);
    } else {
      ++unexpected;
    }
  }
  std::cout << passed << "/" << ran << " criteria passed";
  if (!known.empty()) {
    std::cout << "; known failures:";
    for (int id : known) std::cout << ' ' << id;
  }
  std::cout << std::endl;
  if (!keep && work.empty()) fs::remove_all(ctx.work);
  return unexpected == 0 ? 0 : 1;
}
