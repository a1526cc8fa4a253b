#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

namespace cadence {
namespace {

TEST(InitModel, ShapesAndDeterminism) {
  const auto m = init_model(75, 3, 1);
  ASSERT_EQ(m.layers.size(), 8u);
  ASSERT_EQ(m.encoder_depth, 4u);
  const std::vector<std::pair<long, long>> shapes{{40, 75}, {30, 40}, {20, 30}, {3, 20},
                                                  {20, 3},  {30, 20}, {40, 30}, {75, 40}};
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    EXPECT_EQ(m.layers[l].weight.rows(), shapes[l].first);
    EXPECT_EQ(m.layers[l].weight.cols(), shapes[l].second);
    EXPECT_EQ(m.layers[l].bias.size(), shapes[l].first);
    EXPECT_TRUE(m.layers[l].bias.isZero(0.0));
  }
  const auto again = init_model(75, 3, 1);
  for (std::size_t l = 0; l < m.layers.size(); ++l) EXPECT_TRUE(m.layers[l].weight == again.layers[l].weight);
  EXPECT_FALSE(init_model(75, 3, 2).layers[0].weight == m.layers[0].weight);
  EXPECT_FALSE(m.is_trained());
}

TEST(InitModel, KaimingVariance) {
  const auto m = init_model(75, 3, 5);
  const auto& w = m.layers[0].weight;
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size() - 1);
  EXPECT_NEAR(var, 2.0 / 75.0, 0.2 * 2.0 / 75.0);
}

TEST(Forward, ZeroInputGivesZero) {
  const auto m = init_model(10, 2, 3);
  const auto r = forward(m, Matrix::Zero(4, 10));
  EXPECT_TRUE(r.latent.isZero(0.0));
  EXPECT_TRUE(r.reconstruction.isZero(0.0));
}

TEST(Forward, NonNegativeOutputAndLatentWidth) {
  Rng rng(4);
  const auto m = init_model(12, 3, 4);
  const auto r = forward(m, testing::random_matrix(rng, 20, 12, -3, 3));
  EXPECT_GE(r.reconstruction.minCoeff(), 0.0);
  EXPECT_EQ(r.latent.cols(), 3);
  EXPECT_TRUE(encode(m, testing::random_matrix(rng, 7, 12)).cols() == 3);
}

TEST(Forward, HandBuiltToyNetwork) {
  // Every layer 1->1 so the pass can be worked by hand.
  AutoencoderModel m;
  m.input_dim = 1;
  m.latent_dim = 1;
  m.encoder_depth = 2;
  const double ws[] = {2.0, -0.5, 3.0, 1.5};
  const double bs[] = {1.0, 4.0, -2.0, 0.25};
  for (int l = 0; l < 4; ++l) {
    LayerParams p;
    p.weight = Matrix::Constant(1, 1, ws[l]);
    p.bias = Vector::Constant(1, bs[l]);
    m.layers.push_back(p);
  }
  Matrix x(1, 1);
  x << 3.0;
  // relu(2*3+1)=7, relu(-3.5+4)=0.5, relu(1.5-2)=0, relu(0+0.25)=0.25
  const auto r = forward(m, x);
  EXPECT_EQ(r.latent(0, 0), 0.5);
  EXPECT_EQ(r.reconstruction(0, 0), 0.25);
  m.linear_output = true;
  m.layers[3].bias(0) = -1.0;
  EXPECT_EQ(forward(m, x).reconstruction(0, 0), -1.0);
}

TEST(Forward, MatchesStraightLineReference) {
  Rng rng(6);
  for (bool linear : {false, true}) {
    const auto m = init_model(8, 3, 6, linear);
    const Matrix x = testing::random_matrix(rng, 5, 8, 0, 1);
    const auto r = forward(m, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto ref = testing::ref_forward(m, testing::rows_of(x)[static_cast<std::size_t>(i)]);
      for (std::size_t j = 0; j < ref.reconstruction.size(); ++j)
        EXPECT_NEAR(r.reconstruction(i, static_cast<Eigen::Index>(j)), ref.reconstruction[j], 1e-12);
    }
  }
}

TEST(CompositeLoss, BetaZeroIsReconstructionOnly) {
  Rng rng(7);
  const auto m = init_model(6, 2, 7);
  const auto batch = testing::random_batch(rng, 4, 6);
  const auto parts = composite_loss(m, batch, 0.0, KernelSpec::median(), LossVariant::MsePlusMmd);
  EXPECT_EQ(parts.total, parts.recon_left + parts.recon_right);
  EXPECT_GT(parts.mmd, 0.0);
  const auto mse = composite_loss(m, batch, 1.0, KernelSpec::median(), LossVariant::MseOnly);
  EXPECT_EQ(mse.mmd, 0.0);
  EXPECT_EQ(mse.total, parts.total);
}

// Builds a 1-d "identity" autoencoder for non-negative inputs.
AutoencoderModel identity_model(std::size_t d) {
  AutoencoderModel m = init_model(d, 1, 0);
  for (auto& l : m.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  // Route input 0 through the first unit of every layer; the batch only
  // uses inputs whose other coordinates equal input 0.
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    auto& w = m.layers[l].weight;
    if (l == 0) w(0, 0) = 1.0;
    else if (l + 1 == m.layers.size()) w.col(0).setOnes();
    else w(0, 0) = 1.0;
  }
  return m;
}

TEST(CompositeLoss, PerfectAutoencoderWithEqualCodesIsZero) {
  const auto m = identity_model(4);
  PairBatch batch;
  batch.left = Matrix::Constant(3, 4, 0.7);
  batch.right = batch.left;
  batch.boundaries = {0, 1, 2};
  const auto parts = composite_loss(m, batch, 1.0, KernelSpec::fixed(KernelFamily::Gaussian, 1.0), LossVariant::MsePlusMmd);
  EXPECT_EQ(parts.total, 0.0);
  const auto grads = backward(m, batch, 1.0, KernelSpec::fixed(KernelFamily::Gaussian, 1.0), LossVariant::MsePlusMmd);
  for (const auto& g : grads.grads.layers) {
    EXPECT_TRUE(g.weight.isZero(0.0));
    EXPECT_TRUE(g.bias.isZero(0.0));
  }
}

TEST(CompositeLoss, MatchesIndependentImplementation) {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto f = static_cast<KernelFamily>(i % 3);
    const double g = 0.1 + rng.uniform01();
    const auto m = init_model(5 + rng.uniform_index(4), 1 + rng.uniform_index(3), 100 + i);
    const auto batch = testing::random_batch(rng, 2 + rng.uniform_index(4), m.input_dim);
    const double beta = 0.5 + rng.uniform01();
    const auto parts = composite_loss(m, batch, beta, KernelSpec::fixed(f, g), LossVariant::MsePlusMmd);
    EXPECT_NEAR(parts.total, testing::ref_loss(m, batch, beta, f, g, true), 1e-10);
    EXPECT_GE(parts.total, 0.0);
  }
}

TEST(Backward, FiniteDifferencesSmallModel) {
  Rng rng(9);
  auto m = init_model(6, 2, 9);
  testing::jitter_biases(m, rng);
  const auto batch = testing::random_batch(rng, 4, 6);
  for (auto variant : {LossVariant::MseOnly, LossVariant::MsePlusMmd}) {
    const auto r = testing::check_gradients(m, batch, 1.0, KernelFamily::Gaussian, 0.7, variant);
    EXPECT_LE(r.max_rel, 1e-4) << to_string(variant);
    EXPECT_LE(r.kink_max_rel, 1e-3) << to_string(variant);
    EXPECT_GT(r.checked, 1000u);
  }
}

TEST(Backward, FiniteDifferencesRandomInstances) {
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    const std::size_t d = 2 + rng.uniform_index(7);
    const std::size_t z = 1 + rng.uniform_index(3);
    const std::size_t b = 1 + rng.uniform_index(5);
    auto m = init_model(d, z, 200 + i);
    testing::jitter_biases(m, rng);
    const auto batch = testing::random_batch(rng, b, d);
    const auto f = static_cast<KernelFamily>(i % 3);
    for (auto variant : {LossVariant::MseOnly, LossVariant::MsePlusMmd}) {
      const auto r = testing::check_gradients(m, batch, 0.5 + rng.uniform01(), f, 0.2 + rng.uniform01(), variant);
      EXPECT_LE(r.max_rel, 1e-4) << "instance " << i << " " << to_string(variant) << " " << to_string(f);
      EXPECT_LE(r.kink_max_rel, 1e-3) << "instance " << i;
      EXPECT_LE(r.kinks * 100, r.checked) << "instance " << i;
    }
  }
}

TEST(Backward, MmdTermAloneMatchesEncodedFiniteDifferences) {
  Rng rng(11);
  const auto m = init_model(6, 3, 11);
  const auto batch = testing::random_batch(rng, 5, 6);
  const auto spec = KernelSpec::fixed(KernelFamily::Gaussian, 0.8);
  const auto with = backward(m, batch, 1.0, spec, LossVariant::MsePlusMmd).grads;
  const auto without = backward(m, batch, 1.0, spec, LossVariant::MseOnly).grads;

  constexpr double h = 1e-5;
  auto mmd_of = [&](const AutoencoderModel& mm) {
    return testing::naive_mmd2(KernelFamily::Gaussian, 0.8, encode(mm, batch.left), encode(mm, batch.right));
  };
  double worst = 0.0;
  AutoencoderModel probe = m;
  for (std::size_t l = 0; l < m.encoder_depth; ++l) {
    for (Eigen::Index r = 0; r < probe.layers[l].weight.rows(); ++r)
      for (Eigen::Index c = 0; c < probe.layers[l].weight.cols(); ++c) {
        double& p = probe.layers[l].weight(r, c);
        const double keep = p;
        p = keep + h;
        const double up = mmd_of(probe);
        p = keep - h;
        const double down = mmd_of(probe);
        p = keep;
        const double isolated = with.layers[l].weight(r, c) - without.layers[l].weight(r, c);
        worst = std::max(worst, testing::relative_error(isolated, (up - down) / (2 * h), 1e-6));
      }
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Backward, MedianKernelHoldsBatchGammaFixed) {
  Rng rng(12);
  const auto m = init_model(6, 2, 12);
  const auto batch = testing::random_batch(rng, 5, 6);
  const auto fwd_l = encode(m, batch.left), fwd_r = encode(m, batch.right);
  Matrix both(fwd_l.rows() * 2, fwd_l.cols());
  both << fwd_l, fwd_r;
  const double g = median_gamma(both);
  const auto a = backward(m, batch, 1.0, KernelSpec::median(), LossVariant::MsePlusMmd);
  const auto b = backward(m, batch, 1.0, KernelSpec::fixed(KernelFamily::Gaussian, g), LossVariant::MsePlusMmd);
  EXPECT_NEAR(a.loss.total, b.loss.total, 1e-14);
  for (std::size_t l = 0; l < a.grads.layers.size(); ++l)
    EXPECT_TRUE(a.grads.layers[l].weight.isApprox(b.grads.layers[l].weight, 1e-12) ||
                b.grads.layers[l].weight.isZero(1e-15));
}

TEST(Adam, ZeroGradientLeavesParameters) {
  auto m = init_model(6, 2, 13);
  const auto before = m;
  auto state = AdamState::for_model(m);
  Rng rng(13);
  auto g = zero_gradients(m);
  g.layers[0].weight.setConstant(0.5);
  adam_step(m, g, state, 1e-3);
  const double m1 = state.first_moment[1].weight.cwiseAbs().maxCoeff();
  const double first = state.first_moment[0].weight(0, 0);
  for (int i = 0; i < 5; ++i) adam_step(m, zero_gradients(m), state, 1e-3);
  EXPECT_EQ(m1, 0.0);
  EXPECT_TRUE(m.layers[1].weight == before.layers[1].weight);
  EXPECT_NEAR(state.first_moment[0].weight(0, 0), first * std::pow(0.9, 5), 1e-15);
}

TEST(Adam, FirstStepMagnitudeIsLearningRate) {
  auto m = init_model(4, 2, 14);
  const auto before = m;
  auto state = AdamState::for_model(m);
  auto g = zero_gradients(m);
  g.layers[0].weight(0, 0) = 3.0;
  g.layers[0].weight(1, 0) = -0.02;
  adam_step(m, g, state, 1e-2);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  EXPECT_NEAR(m.layers[0].weight(0, 0) - before.layers[0].weight(0, 0), -1e-2 * 3.0 / (3.0 + 1e-8), 1e-15);
  EXPECT_NEAR(m.layers[0].weight(1, 0) - before.layers[0].weight(1, 0), 1e-2 * 0.02 / (0.02 + 1e-8), 1e-15);
  EXPECT_EQ(state.step_count, 1u);
}

TEST(Adam, ShapeMismatchThrows) {
  auto m = init_model(4, 2, 15);
  auto state = AdamState::for_model(m);
  const auto other = zero_gradients(init_model(5, 2, 15));
  EXPECT_THROW(adam_step(m, other, state, 1e-3), Error);
}

TEST(Adam, IdenticalRunsAreBitwiseIdentical) {
  auto run = [] {
    Rng rng(16);
    auto m = init_model(6, 2, 16);
    auto state = AdamState::for_model(m);
    for (int i = 0; i < 20; ++i) {
      const auto batch = testing::random_batch(rng, 4, 6);
      adam_step(m, backward(m, batch, 1.0, KernelSpec::median(), LossVariant::MsePlusMmd).grads, state, 1e-3);
    }
    return m;
  };
  const auto a = run(), b = run();
  for (std::size_t l = 0; l < a.layers.size(); ++l) EXPECT_TRUE(a.layers[l].weight == b.layers[l].weight);
}

}  // namespace
}  // namespace cadence
