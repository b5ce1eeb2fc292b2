#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>

#include "sscrop/data/distribution.hpp"
#include "sscrop/error.hpp"
#include "sscrop/synth/generator.hpp"

namespace sscrop::synth {
namespace {

constexpr std::size_t kNir = 3;

GeneratorConfig noiseless() {
  GeneratorConfig c;
  c.noise_std = 0.0;
  return c;
}

TEST(Templates, Invariants) {
  const auto tpls = default_templates();
  ASSERT_EQ(tpls.size(), 4u);
  for (std::size_t c = 0; c < tpls.size(); ++c) {
    EXPECT_EQ(tpls[c].class_id, static_cast<int>(c));
    ASSERT_EQ(tpls[c].bands.size(), kDefaultBands);
    for (const auto& b : tpls[c].bands) {
      EXPECT_TRUE(std::isfinite(b.baseline) && std::isfinite(b.peak_height));
      EXPECT_GE(b.peak_time, 0.0);
      EXPECT_LT(b.peak_time, static_cast<double>(kDefaultSteps));
      EXPECT_GT(b.width, 0.0);
    }
    EXPECT_LT(tpls[c].bands[kNir].baseline, tpls[c].bands[kNir].peak_height);
  }
}

TEST(Generate, NoiselessSamplesEqualTemplate) {
  const auto tpls = default_templates();
  const TaskDataset d = generate(tpls, noiseless(), std::nullopt, 5, 1);
  ASSERT_EQ(d.size(), 20u);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& tpl = tpls[static_cast<std::size_t>(d.labels[i])];
    for (std::size_t t = 0; t < d.steps; ++t)
      for (std::size_t b = 0; b < d.bands; ++b)
        EXPECT_EQ(d.samples[i](t, b), tpl.value(b, static_cast<double>(t)));
  }
}

TEST(Generate, AdditiveShift) {
  const auto tpls = default_templates();
  const GeneratorConfig cfg = default_scenario_config().generator;
  const DomainShift shift = DomainShift::uniform(kDefaultBands, 0.1, 1.0, 0.0, 0.0);
  const TaskDataset s = generate(tpls, cfg, std::nullopt, 10, 2);
  const TaskDataset t = generate(tpls, cfg, shift, 10, 2);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t k = 0; k < 70; ++k)
      EXPECT_NEAR(t.samples[i].values()[k], s.samples[i].values()[k] + 0.1, 1e-12);
}

TEST(Generate, IdentityShiftIsExact) {
  const auto tpls = default_templates();
  const GeneratorConfig cfg = default_scenario_config().generator;
  const TaskDataset s = generate(tpls, cfg, std::nullopt, 10, 3);
  const TaskDataset t = generate(tpls, cfg, DomainShift::identity(kDefaultBands), 10, 3);
  EXPECT_EQ(s.samples, t.samples);
}

TEST(Generate, DefaultShiftSeparatesMeansAtPeak) {
  const auto tpls = default_templates();
  ScenarioConfig sc = default_scenario_config();
  const TaskDataset s = generate(tpls, sc.generator, std::nullopt, 2000, 4);
  const TaskDataset t = generate(tpls, sc.generator, default_shift(), 2000, 5);
  const double noise = default_shift().noise_std;
  for (int c = 0; c < 4; ++c) {
    for (std::size_t b = 0; b < kDefaultBands; ++b) {
      const auto peak = static_cast<std::size_t>(std::lround(tpls[static_cast<std::size_t>(c)].bands[b].peak_time));
      const double gap = band_distribution_report(t, c, b).steps[peak].mean -
                         band_distribution_report(s, c, b).steps[peak].mean;
      EXPECT_GT(std::abs(gap), 2 * noise) << "class " << c << " band " << b;
    }
  }
}

TEST(Generate, NoiselessClassesAreLinearlySeparable) {
  const TaskDataset d = generate(default_templates(), noiseless(), std::nullopt, 1, 6);
  const Matrix x = to_batch(d);
  // Multiclass perceptron with a bias column; converges only on separable data.
  std::vector<std::vector<double>> w(4, std::vector<double>(x.cols() + 1, 0.0));
  bool clean = false;
  for (int epoch = 0; epoch < 10000 && !clean; ++epoch) {
    clean = true;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      std::size_t best = 0;
      double best_score = -1e300;
      for (std::size_t c = 0; c < 4; ++c) {
        double s = w[c].back();
        for (std::size_t k = 0; k < x.cols(); ++k) s += w[c][k] * x(i, k);
        if (s > best_score) {
          best_score = s;
          best = c;
        }
      }
      const auto y = static_cast<std::size_t>(d.labels[i]);
      if (best != y) {
        clean = false;
        for (std::size_t k = 0; k < x.cols(); ++k) {
          w[y][k] += x(i, k);
          w[best][k] -= x(i, k);
        }
        w[y].back() += 1.0;
        w[best].back() -= 1.0;
      }
    }
  }
  EXPECT_TRUE(clean);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) {
      double dist = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) dist += std::pow(x(a, k) - x(b, k), 2);
      EXPECT_GT(std::sqrt(dist), 0.1) << a << " vs " << b;
    }
}

TEST(Generate, ThreadCountDoesNotChangeOutput) {
  const auto tpls = default_templates();
  const GeneratorConfig cfg = default_scenario_config().generator;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const TaskDataset one = generate(tpls, cfg, default_shift(), 50, 7);
  omp_set_num_threads(4);
  const TaskDataset four = generate(tpls, cfg, default_shift(), 50, 7);
  omp_set_num_threads(saved);
  EXPECT_EQ(one.samples, four.samples);
  EXPECT_EQ(one.labels, four.labels);
}

TEST(Generate, Preconditions) {
  auto tpls = default_templates();
  EXPECT_THROW(generate(tpls, noiseless(), std::nullopt, 0, 1), ValueError);
  tpls.pop_back();
  EXPECT_THROW(generate(tpls, noiseless(), std::nullopt, 1, 1), ValueError);
  DomainShift bad = default_shift();
  bad.gain[2] = 0.0;
  EXPECT_THROW(generate(default_templates(), noiseless(), bad, 1, 1), ValueError);
  bad = default_shift();
  bad.offset.pop_back();
  EXPECT_THROW(generate(default_templates(), noiseless(), bad, 1, 1), ShapeError);
}

TEST(Scenario, SizesAndDeterminism) {
  ScenarioConfig sc = default_scenario_config();
  EXPECT_EQ(sc.source_per_class, 2000u);
  EXPECT_EQ(sc.few_shot_per_class, 100u);
  EXPECT_EQ(sc.target_per_class, 2000u);
  sc.source_per_class = 200;
  sc.target_per_class = 200;
  const Scenario a = make_scenario(sc, 11);
  const Scenario b = make_scenario(sc, 11);
  EXPECT_EQ(a.few_shot.size(), 400u);
  EXPECT_EQ(a.source.size(), 800u);
  EXPECT_EQ(a.source.samples, b.source.samples);
  EXPECT_EQ(a.few_shot.samples, b.few_shot.samples);
  EXPECT_EQ(a.target.samples, b.target.samples);
  EXPECT_NE(a.source.samples, make_scenario(sc, 12).source.samples);
}

TEST(Scenario, TargetShowsDistributionGap) {
  ScenarioConfig sc = default_scenario_config();
  sc.source_per_class = 300;
  sc.target_per_class = 300;
  const Scenario s = make_scenario(sc, 13);
  for (int c = 0; c < 4; ++c) {
    const auto src = band_distribution_report(s.source, c, kNir);
    const auto tgt = band_distribution_report(s.target, c, kNir);
    double max_gap = 0.0;
    for (std::size_t t = 0; t < src.steps.size(); ++t)
      max_gap = std::max(max_gap, std::abs(tgt.steps[t].mean - src.steps[t].mean));
    EXPECT_GT(max_gap, 0.05) << "class " << c;
  }
}

}  // namespace
}  // namespace sscrop::synth
