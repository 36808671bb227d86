#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "advdet/attack/sweep.hpp"
#include "oracles.hpp"

using namespace advdet;

namespace {

template <typename S>
TensorImage<S> random_input(int size, std::uint64_t seed) {
  // Valid pixel content: normalized from a uniform [0,1] image.
  TensorImage<S> t{Tensor3<S>(3, size, size), NormSpec{}, false};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < t.data.size(); ++i) t.data.data[i] = static_cast<S>(u(rng));
  return normalize(std::move(t));
}

template <typename S>
ClassifierModel<S> toy_model(int num_classes, int size, std::uint64_t seed) {
  TinyCnnConfig tiny;
  tiny.widths = {4, 8};
  return make_classifier<S>(BackboneId::TinyCnn, num_classes, NormSpec{}, size, seed, tiny);
}

template <typename S>
double pixel_linf(const TensorImage<S>& a, const TensorImage<S>& b) {
  double linf = 0.0;
  for (int c = 0; c < 3; ++c) {
    linf = std::max(linf, static_cast<double>((a.data.plane(c) - b.data.plane(c)).abs().maxCoeff()) *
                              a.norm.std[c]);
  }
  return linf;
}

}  // namespace

TEST_CASE("epsilon zero returns a bitwise-identical adversarial") {
  auto model = toy_model<float>(4, 16, 1);
  const auto x = random_input<float>(16, 2);
  AttackSpec spec;
  spec.epsilon = 0.0;
  const auto pair = fgsm(model, x, 1, spec);
  CHECK((pair.adversarial.data.data == x.data.data).all());
  CHECK(pair.linf_achieved == 0.0);
  CHECK_FALSE(pair.zero_gradient);
}

TEST_CASE("negative epsilon is rejected") {
  auto model = toy_model<float>(4, 16, 1);
  AttackSpec spec;
  spec.epsilon = -0.01;
  CHECK_THROWS_AS(fgsm(model, random_input<float>(16, 3), 0, spec), Error);
}

TEST_CASE("pre-clamp pixel-space perturbations take values in {-eps, 0, +eps}") {
  auto model = toy_model<double>(4, 16, 5);
  const auto x = random_input<double>(16, 6);
  AttackSpec spec;
  spec.epsilon = 0.03;
  spec.clamp = false;  // inspect the raw signed step
  const auto pair = fgsm(model, x, 2, spec);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 16; ++y) {
      for (int px = 0; px < 16; ++px) {
        const double diff =
            (pair.adversarial.data(c, y, px) - x.data(c, y, px)) * x.norm.std[c];
        const bool valid = std::abs(diff) < 1e-12 || std::abs(diff - 0.03) < 1e-12 ||
                           std::abs(diff + 0.03) < 1e-12;
        CHECK(valid);
      }
    }
  }
}

TEST_CASE("clamped attacks respect the pixel-space budget") {
  auto model = toy_model<float>(5, 16, 8);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_input<float>(16, 100 + trial);
    AttackSpec spec;
    spec.epsilon = 0.02 + 0.002 * (trial % 5);
    const auto pair = fgsm(model, x, trial % 5, spec);
    CHECK(pair.linf_achieved <= spec.epsilon + 1e-6);
    CHECK(pixel_linf(pair.adversarial, x) <= spec.epsilon + 1e-6);
    // Clamped result stays a valid image.
    const auto shown = denormalize(pair.adversarial);
    CHECK(shown.data.data.minCoeff() >= 0.0f);
    CHECK(shown.data.data.maxCoeff() <= 1.0f);
  }
}

TEST_CASE("FGSM is deterministic") {
  auto model = toy_model<float>(4, 16, 9);
  const auto x = random_input<float>(16, 10);
  AttackSpec spec;
  spec.epsilon = 0.05;
  const auto a = fgsm(model, x, 1, spec);
  const auto b = fgsm(model, x, 1, spec);
  CHECK((a.adversarial.data.data == b.adversarial.data.data).all());
}

TEST_CASE("a zero-gradient input comes back clean with the zero-gradient flag") {
  // All-zero conv weights and bias kill the forward signal; CE gradient
  // through a constant-zero feature map is identically zero at the input.
  TinyCnnConfig tiny;
  tiny.widths = {2};
  auto model = make_classifier<float>(BackboneId::TinyCnn, 2, NormSpec{}, 8, 1, tiny);
  for (auto& p : model.backbone->params()) {
    for (Eigen::Index i = 0; i < p.size; ++i) p.data[i] = 0.0f;
  }
  const auto x = random_input<float>(8, 4);
  AttackSpec spec;
  spec.epsilon = 0.05;
  const auto pair = fgsm(model, x, 0, spec);
  CHECK(pair.zero_gradient);
  CHECK((pair.adversarial.data.data == x.data.data).all());
}

TEST_CASE("gradient sign agrees with central finite differences") {
  // Double precision throughout; delta 1e-3 as the probe step.
  auto model = toy_model<double>(3, 16, 31);
  auto x = random_input<double>(16, 32);
  const int y = 1;

  typename Backbone<double>::ForwardCache cache;
  const auto fwd = model.forward(x, cache);
  Eigen::VectorXd grad_logits = softmax(fwd.logits);
  grad_logits[y] -= 1.0;
  const Eigen::VectorXd grad_z = model.head.weight.transpose() * grad_logits;
  const Tensor3d analytic = model.backbone->input_gradient(cache, grad_z);

  auto loss_at = [&](const Tensor3d& data) {
    TensorImage<double> probe{data, x.norm, true};
    const auto f = model.forward(probe);
    const Eigen::VectorXd p = softmax(f.logits);
    return -std::log(std::max(p[y], 1e-300));
  };

  const double delta = 1e-3;
  int checked = 0, agreed = 0;
  for (Eigen::Index i = 0; i < x.data.size(); ++i) {
    if (std::abs(analytic.data[i]) <= 1e-4) continue;
    Tensor3d plus = x.data, minus = x.data;
    plus.data[i] += delta;
    minus.data[i] -= delta;
    const double fd = (loss_at(plus) - loss_at(minus)) / (2 * delta);
    ++checked;
    if ((fd > 0) == (analytic.data[i] > 0)) ++agreed;
  }
  REQUIRE(checked > 50);
  CHECK(static_cast<double>(agreed) / checked >= 0.99);
}

TEST_CASE("sweep validates its grid and dataset") {
  auto model = toy_model<float>(3, 16, 40);
  std::vector<LabeledSample<float>> data{{random_input<float>(16, 41), 0, "a"}};
  SweepOptions opt;
  CHECK_THROWS_AS(epsilon_sweep(model, {}, {0.0, 0.1}, opt), Error);
  CHECK_THROWS_AS(epsilon_sweep(model, data, {0.1, 0.2}, opt), Error);
  CHECK_THROWS_AS(epsilon_sweep(model, data, {0.0, 0.2, 0.1}, opt), Error);
}

TEST_CASE("the zero-epsilon sweep row is exactly all-ones") {
  auto model = toy_model<float>(4, 16, 50);
  std::vector<LabeledSample<float>> data;
  for (int i = 0; i < 12; ++i) {
    data.push_back({random_input<float>(16, 600 + i), i % 4, "img" + std::to_string(i)});
  }
  SweepOptions opt;
  const auto result = epsilon_sweep(model, data, {0.0, 0.05}, opt);
  REQUIRE(result.rows.size() == 2);
  const auto& row = result.rows[0];
  CHECK(row.pixel_acc == 1.0);
  CHECK(row.miou == 1.0);
  CHECK(row.pa == 1.0);
  CHECK(row.macc == 1.0);
  CHECK(row.miou_agg == 1.0);
  CHECK(row.mf1 == 1.0);
}

TEST_CASE("a two-image sweep at eps 0.5 matches manual confusion counting") {
  // Half the pixel range is far beyond this toy model's decision margins,
  // so the attack flips at least one of the two predictions.
  TinyCnnConfig tiny;
  tiny.widths = {2};
  auto model = make_classifier<double>(BackboneId::TinyCnn, 2, NormSpec{}, 8, 60, tiny);

  std::vector<LabeledSample<double>> data;
  data.push_back({random_input<double>(8, 61), 0, "near"});
  data.push_back({random_input<double>(8, 62), 1, "far"});

  SweepOptions opt;
  opt.loss_target = LossTarget::PredictedLabel;
  const auto result = epsilon_sweep(model, data, {0.0, 0.5}, opt);

  const int base0 = result.baseline_predictions[0];
  const int base1 = result.baseline_predictions[1];
  const int adv0 = result.details[1].images[0].adv_pred;
  const int adv1 = result.details[1].images[1].adv_pred;

  // Manual 2x2 pixel count: each image is one pixel, truth = baseline.
  int correct = (adv0 == base0 ? 1 : 0) + (adv1 == base1 ? 1 : 0);
  const double pa = correct / 2.0;
  CHECK(result.rows[1].pixel_acc == doctest::Approx(pa).epsilon(1e-12));
  CHECK(result.rows[1].pa == doctest::Approx(pa).epsilon(1e-12));
  const double per_image_miou =
      ((adv0 == base0 ? 1.0 : 0.0) + (adv1 == base1 ? 1.0 : 0.0)) / 2.0;
  CHECK(result.rows[1].miou == doctest::Approx(per_image_miou).epsilon(1e-12));
  // An epsilon of 0.5 in [0,1] pixel units must flip something at this scale.
  CHECK(correct < 2);
}

TEST_CASE("sweep lost classes come from the prediction sets") {
  auto model = toy_model<float>(3, 16, 70);
  std::vector<LabeledSample<float>> data;
  for (int i = 0; i < 9; ++i) {
    data.push_back({random_input<float>(16, 700 + i), i % 3, "x" + std::to_string(i)});
  }
  SweepOptions opt;
  const auto result = epsilon_sweep(model, data, {0.0, 0.3}, opt);
  std::set<int> base_set, adv_set;
  for (std::size_t i = 0; i < data.size(); ++i) {
    base_set.insert(result.baseline_predictions[i]);
    adv_set.insert(result.details[1].images[i].adv_pred);
  }
  std::set<int> expected;
  for (int c : base_set) {
    if (!adv_set.count(c)) expected.insert(c);
  }
  CHECK(result.details[1].lost == expected);
}

TEST_CASE("sharded sweep equals the single-worker sweep") {
  auto model = toy_model<float>(3, 16, 80);
  std::vector<LabeledSample<float>> data;
  for (int i = 0; i < 10; ++i) {
    data.push_back({random_input<float>(16, 800 + i), i % 3, "w" + std::to_string(i)});
  }
  SweepOptions serial, sharded;
  serial.workers = 1;
  sharded.workers = 4;
  const auto a = epsilon_sweep(model, data, {0.0, 0.04, 0.08}, serial);
  const auto b = epsilon_sweep(model, data, {0.0, 0.04, 0.08}, sharded);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].pixel_acc == b.rows[i].pixel_acc);
    CHECK(a.rows[i].miou_agg == b.rows[i].miou_agg);
    CHECK(a.rows[i].mf1 == b.rows[i].mf1);
  }
}
