#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "snowlens/error.hpp"
#include "snowlens/io/image_io.hpp"
#include "snowlens/nn/checkpoint.hpp"
#include "snowlens/translator/translator.hpp"
#include "test_support.hpp"

namespace snowlens::translator {
namespace {

TranslatorConfig micro_config() {
  TranslatorConfig c;
  c.preset = "micro";
  c.height = 8;
  c.width = 8;
  c.depth = 2;
  c.gen_channels = 4;
  c.disc_channels = 4;
  c.disc_layers = 1;
  c.seed = 3;
  return c;
}

template <class T>
Tensor<T> random_signed(int n, int h, int w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Tensor<T> t(n, 3, h, w);
  for (auto& v : t.data) v = static_cast<T>(d(rng));
  return t;
}

double relative_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

struct Sampled {
  Param<double>* param;
  std::size_t index;
};

// Up to `per_tensor` random entries from every parameter tensor.
std::vector<Sampled> sample_entries(const std::vector<Param<double>*>& params, std::size_t per_tensor,
                                    std::mt19937_64& rng) {
  std::vector<Sampled> out;
  for (auto* p : params) {
    std::uniform_int_distribution<std::size_t> d(0, p->value.size() - 1);
    for (std::size_t k = 0; k < std::min(per_tensor, p->value.size()); ++k) out.push_back({p, d(rng)});
  }
  return out;
}

double central_difference(const std::function<double()>& f, double& v, double h = 1e-5) {
  const double keep = v;
  v = keep + h;
  const double lp = f();
  v = keep - h;
  const double lm = f();
  v = keep;
  return (lp - lm) / (2 * h);
}

TEST(TranslatorGradients, GeneratorObjectiveMatchesFiniteDifferences) {
  for (GanMode mode : {GanMode::bce, GanMode::lsgan}) {
    auto cfg = micro_config();
    cfg.gan_mode = mode;
    cfg.lambda_l1 = 10.0;
    TranslatorModel<double> m(cfg);
    std::mt19937_64 rng(11);
    const auto cond = random_signed<double>(2, 8, 8, rng);
    const auto target = random_signed<double>(2, 8, 8, rng);

    auto gp = m.generator_params();
    auto dp = m.discriminator_params();
    nn::zero_grads(gp);
    nn::zero_grads(dp);
    typename UNetGenerator<double>::Trace trace;
    const auto fake = m.generator.forward_train(cond, trace);
    generator_backward(m, cond, target, fake, trace);

    auto loss = [&] { return translator_loss(m, cond, target).g_total; };
    const auto entries = sample_entries(gp, 4, rng);
    ASSERT_GE(entries.size(), 20u);
    int nonzero = 0;
    for (const auto& e : entries) {
      const double analytic = e.param->grad.data[e.index];
      const double numeric = central_difference(loss, e.param->value.data[e.index]);
      EXPECT_LE(relative_error(analytic, numeric), 1e-3)
          << e.param->name << "[" << e.index << "] analytic " << analytic << " numeric " << numeric;
      nonzero += std::abs(numeric) > 1e-6;
    }
    EXPECT_GE(nonzero, 20);
  }
}

TEST(TranslatorGradients, DiscriminatorObjectiveMatchesFiniteDifferences) {
  TranslatorModel<double> m(micro_config());
  std::mt19937_64 rng(12);
  const auto cond = random_signed<double>(2, 8, 8, rng);
  const auto target = random_signed<double>(2, 8, 8, rng);
  const auto fake = m.generator.forward(cond);
  auto dp = m.discriminator_params();
  nn::zero_grads(dp);
  discriminator_backward(m, cond, target, fake);
  auto loss = [&] { return translator_loss(m, cond, target).d_total; };
  const auto entries = sample_entries(dp, 5, rng);
  ASSERT_GE(entries.size(), 20u);
  int nonzero = 0;
  for (const auto& e : entries) {
    const double analytic = e.param->grad.data[e.index];
    const double numeric = central_difference(loss, e.param->value.data[e.index]);
    EXPECT_LE(relative_error(analytic, numeric), 1e-3)
        << e.param->name << "[" << e.index << "] analytic " << analytic << " numeric " << numeric;
    nonzero += std::abs(numeric) > 1e-6;
  }
  EXPECT_GE(nonzero, 20);
}

TEST(TranslatorModel, SeededBuildIsBitReproducible) {
  const auto cfg = translator_preset("desk", Role::U);
  TranslatorModel<float> a(cfg), b(cfg);
  const auto pa = a.generator_params(), pb = b.generator_params();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value) << pa[i]->name;
  auto other = cfg;
  other.seed = 1;
  TranslatorModel<float> c(other);
  EXPECT_FALSE(c.generator_params()[0]->value == pa[0]->value);
}

TEST(TranslatorModel, DeskOutputKeepsDimsAndRange) {
  const auto cfg = translator_preset("desk", Role::U);
  TranslatorModel<float> m(cfg);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 3; ++i) {
    const auto img = testing::random_image(128, 192, rng).to_signed_unit();
    const auto out = generator_forward(m, img);
    EXPECT_EQ(out.height(), 128);
    EXPECT_EQ(out.width(), 192);
    for (float v : out.values()) ASSERT_TRUE(v >= -1.0f && v <= 1.0f);
  }
  EXPECT_THROW(generator_forward(m, RgbImage(64, 192, Range::signed_unit)), DimensionError);
  const auto grid = patch_grid(cfg);
  EXPECT_EQ(grid.first, 14);
  EXPECT_EQ(grid.second, 22);
}

TEST(TranslatorModel, PresetsAndValidation) {
  const auto paper = translator_preset("paper", Role::T);
  EXPECT_EQ(paper.height, 512);
  EXPECT_EQ(paper.width, 768);
  EXPECT_EQ(paper.depth, 8);
  EXPECT_EQ(paper.gen_channels, 64);
  EXPECT_EQ(paper.role, Role::T);
  EXPECT_NO_THROW(paper.validate());
  auto bad = translator_preset("desk");
  bad.height = 100;
  EXPECT_THROW(bad.validate(), ValueError);
  EXPECT_THROW(translator_preset("huge"), ValueError);
  const auto round = TranslatorConfig::from_json(paper.to_json());
  EXPECT_EQ(round.to_json(), paper.to_json());
}

TEST(Translate, SizeContract) {
  const auto cfg = translator_preset("desk", Role::U);
  TranslatorModel<float> m(cfg);
  std::mt19937_64 rng(5);
  const auto raw = testing::random_image(480, 720, rng);
  const auto t = translate(m, raw);
  EXPECT_TRUE(t.resized);
  EXPECT_EQ(t.image.height(), 128);
  EXPECT_EQ(t.image.width(), 192);
  EXPECT_EQ(t.image.range(), Range::byte);
  const auto r = translate(m, raw, {true});
  EXPECT_EQ(r.image.height(), 480);
  EXPECT_EQ(r.image.width(), 720);
  const auto same = translate(m, testing::random_image(128, 192, rng));
  EXPECT_FALSE(same.resized);
}

std::vector<ingest::PairedSample> tiny_pairs(int n, std::mt19937_64& rng) {
  std::vector<ingest::PairedSample> out;
  for (int i = 0; i < n; ++i)
    out.push_back({"p" + std::to_string(i), testing::random_image(16, 16, rng), testing::random_image(16, 16, rng)});
  return out;
}

TranslatorConfig small_train_config() {
  auto cfg = micro_config();
  cfg.height = 16;
  cfg.width = 16;
  cfg.checkpoint_every = 1;
  cfg.epochs = 3;
  return cfg;
}

TEST(TranslatorTraining, ZeroEpochsLeavesOnlyInitCheckpoint) {
  testing::TempDir dir("t0");
  std::mt19937_64 rng(6);
  auto cfg = small_train_config();
  cfg.epochs = 0;
  const auto res = train_translator(cfg, tiny_pairs(2, rng), {dir.path(), std::nullopt, {}});
  std::vector<std::string> trail;
  for (const auto& e : std::filesystem::directory_iterator(dir / "checkpoints"))
    trail.push_back(e.path().filename().string());
  std::sort(trail.begin(), trail.end());
  EXPECT_EQ(trail, (std::vector<std::string>{"epoch_0000.bin", "epoch_0000.json"}));
  EXPECT_TRUE(res.history.empty());
  const auto csv = io::read_file(dir / "loss.csv");
  EXPECT_EQ(std::string(csv.begin(), csv.end()), "epoch,adversarial_g,adversarial_d,l1,total_g,d_real,d_fake,steps\n");
}

TEST(TranslatorTraining, ResumeContinuesSameTrajectory) {
  std::mt19937_64 rng(7);
  const auto pairs = tiny_pairs(3, rng);
  testing::TempDir full("tfull"), part("tpart");
  const auto cfg = small_train_config();
  const auto a = train_translator(cfg, pairs, {full.path(), std::nullopt, {}});
  auto first = cfg;
  first.epochs = 1;
  train_translator(first, pairs, {part.path(), std::nullopt, {}});
  const auto b = train_translator(cfg, pairs, {part.path(), part / "checkpoints/epoch_0001", {}});
  auto pa = const_cast<TranslatorModel<float>&>(a.model).generator_params();
  auto pb = const_cast<TranslatorModel<float>&>(b.model).generator_params();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value) << pa[i]->name;
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(io::read_file(full / "loss.csv"), io::read_file(part / "loss.csv"));
  EXPECT_EQ(io::read_file(full / "translator_U.bin"), io::read_file(part / "translator_U.bin"));
}

TEST(TranslatorTraining, CheckpointRoundTripAndRoleCheck) {
  testing::TempDir dir("trole");
  std::mt19937_64 rng(8);
  auto cfg = small_train_config();
  cfg.epochs = 1;
  cfg.role = Role::T;
  const auto res = train_translator(cfg, tiny_pairs(2, rng), {dir.path(), std::nullopt, {}});
  const auto loaded = load_translator(res.final_checkpoint, Role::T);
  EXPECT_EQ(loaded.manifest.role_tag, "translator-T");
  EXPECT_EQ(loaded.manifest.epoch, 1);
  const auto img = testing::random_image(16, 16, rng);
  EXPECT_EQ(translate(loaded.model, img).image, translate(res.model, img).image);
  EXPECT_THROW(load_translator(res.final_checkpoint, Role::U), FormatError);
  EXPECT_THROW(train_translator(cfg, {}, {}), ValueError);
}

TEST(TranslatorTraining, IterationModeStopsAtStepCount) {
  std::mt19937_64 rng(9);
  auto cfg = small_train_config();
  cfg.max_iterations = 5;
  const auto res = train_translator(cfg, tiny_pairs(2, rng), {});
  EXPECT_EQ(res.steps, 5);
  EXPECT_EQ(res.history.size(), 3u);
}

}  // namespace
}  // namespace snowlens::translator
