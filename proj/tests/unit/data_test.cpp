#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "sscrop/data/constructors.hpp"
#include "sscrop/data/csv.hpp"
#include "sscrop/data/dataset.hpp"
#include "sscrop/data/distribution.hpp"
#include "sscrop/data/sampling.hpp"
#include "sscrop/error.hpp"

namespace sscrop {
namespace {

namespace fs = std::filesystem;

TaskDataset random_dataset(std::size_t per_class, std::size_t steps, std::size_t bands,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TaskDataset d;
  d.steps = steps;
  d.bands = bands;
  for (int c = 0; c < kCropClasses; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      TimeSeriesSample s(steps, bands);
      for (double& v : s.values()) v = u(rng);
      d.push_back(std::move(s), c);
    }
  }
  return d;
}

std::vector<std::size_t> label_counts(const TaskDataset& d) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(d.num_classes), 0);
  for (int l : d.labels) ++counts.at(static_cast<std::size_t>(l));
  return counts;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("sscrop_data_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string header(std::size_t steps, std::size_t bands) {
  std::string h = "id,domain,label";
  for (std::size_t b = 0; b < bands; ++b)
    for (std::size_t t = 0; t < steps; ++t) h += ",b" + std::to_string(b) + "_t" + std::to_string(t);
  return h;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

TEST(Sample, Invariants) {
  EXPECT_THROW(TimeSeriesSample(1, 7), ShapeError);
  EXPECT_THROW(TimeSeriesSample(10, 0), ShapeError);
  EXPECT_THROW(TimeSeriesSample(2, 2, std::vector<double>(3)), ShapeError);
  EXPECT_THROW(TimeSeriesSample(2, 1, std::vector<double>{1.0, std::nan("")}), NumericError);
  TimeSeriesSample s(10, 7, 0.5);
  EXPECT_EQ(s.values().size(), 70u);
  s(3, 2) = 0.1;
  EXPECT_EQ(s.row(3)[2], 0.1);
}

TEST(Dataset, BatchIsTimeMajor) {
  TaskDataset d;
  d.steps = 2;
  d.bands = 3;
  d.push_back(TimeSeriesSample(2, 3, {1, 2, 3, 4, 5, 6}), 1);
  const Matrix m = to_batch(d);
  ASSERT_EQ(m.cols(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(m(0, i), static_cast<double>(i + 1));
  EXPECT_THROW(d.push_back(TimeSeriesSample(3, 3), 0), ShapeError);
}

TEST(Dataset, ValidateChecksLabels) {
  TaskDataset d = random_dataset(2, 10, 7, 1);
  d.validate();
  d.labels[0] = 4;
  EXPECT_THROW(d.validate(), ValueError);
  d.labels[0] = kUnlabeled;
  d.validate();
  d.labels.pop_back();
  EXPECT_THROW(d.validate(), ShapeError);
}

TEST(Dataset, TaskNames) {
  for (Task t : kAllTasks) EXPECT_EQ(task_from_string(to_string(t)), t);
  EXPECT_THROW(task_from_string("colour"), ValueError);
  EXPECT_EQ(domain_from_string("target"), DomainTag::Target);
  EXPECT_THROW(domain_from_string("elsewhere"), ValueError);
}

TEST(Csv, ScalesRawValues) {
  TempDir dir;
  std::string row = "p0,source,2";
  for (int i = 0; i < 70; ++i) row += i == 0 ? ",5230" : ",100";
  write_text(dir.path() / "one.csv", header(10, 7) + "\n" + row + "\n");
  const TaskDataset d = ingest_csv(dir.path() / "one.csv", 1e-4);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.samples[0].steps(), 10u);
  EXPECT_EQ(d.samples[0].bands(), 7u);
  EXPECT_DOUBLE_EQ(d.samples[0](0, 0), 0.5230);
  EXPECT_EQ(d.labels[0], 2);
  const TaskDataset raw = ingest_csv(dir.path() / "one.csv", 1.0);
  EXPECT_EQ(raw.samples[0](0, 0), 5230.0);
  EXPECT_EQ(raw.samples[0](1, 0), 100.0);
}

TEST(Csv, ColumnOrderIsFree) {
  TempDir dir;
  // b1 before b0, timesteps reversed.
  write_text(dir.path() / "p.csv",
             "label,b1_t1,b1_t0,id,b0_t1,b0_t0,domain\n3,4,3,x,2,1,target\n");
  const CsvTable t = read_csv(dir.path() / "p.csv", 1.0);
  const auto& s = t.data.samples.at(0);
  EXPECT_EQ(s(0, 0), 1.0);
  EXPECT_EQ(s(1, 0), 2.0);
  EXPECT_EQ(s(0, 1), 3.0);
  EXPECT_EQ(s(1, 1), 4.0);
  EXPECT_EQ(t.domains.at(0), DomainTag::Target);
  EXPECT_EQ(t.ids.at(0), "x");
}

TEST(Csv, ErrorsNameTheLine) {
  TempDir dir;
  const std::string h = "id,domain,label,b0_t0,b0_t1\n";
  auto expect_line = [&](const std::string& body, const std::string& needle) {
    write_text(dir.path() / "bad.csv", h + body);
    try {
      ingest_csv(dir.path() / "bad.csv", 1.0);
      ADD_FAILURE() << "expected IoError for " << body;
    } catch (const IoError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_line("a,source,0,1,2\nb,source,7,1,2\n", ":3");
  expect_line("a,source,0,1\n", ":2");
  expect_line("a,source,0,1,zz\n", ":2");
  expect_line("a,moon,0,1,2\n", ":2");
  write_text(dir.path() / "gap.csv", "id,domain,label,b0_t0,b0_t2\n");
  EXPECT_THROW(ingest_csv(dir.path() / "gap.csv", 1.0), IoError);
  write_text(dir.path() / "nolabel.csv", "id,domain,b0_t0,b0_t1\n");
  EXPECT_THROW(ingest_csv(dir.path() / "nolabel.csv", 1.0), IoError);
  EXPECT_THROW(ingest_csv(dir.path() / "missing.csv", 1.0), IoError);
}

TEST(Csv, RoundTripIsExact) {
  TempDir dir;
  const TaskDataset d = random_dataset(3, 10, 7, 2);
  write_csv(dir.path() / "d.csv", d, DomainTag::Source, 1.0, "s");
  const TaskDataset back = ingest_csv(dir.path() / "d.csv", 1.0);
  EXPECT_EQ(back.samples, d.samples);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(Csv, IngestedDataMatchesInMemoryUnderConstructors) {
  TempDir dir;
  const TaskDataset d = random_dataset(2, 10, 7, 3);
  write_csv(dir.path() / "d.csv", d, DomainTag::Source, 1.0, "s");
  const TaskDataset back = ingest_csv(dir.path() / "d.csv", 1.0);
  EXPECT_EQ(make_rotation(back).samples, make_rotation(d).samples);
  EXPECT_EQ(make_time_segment(back, 2).samples, make_time_segment(d, 2).samples);
  EXPECT_EQ(make_band(back).samples, make_band(d).samples);
}

TEST(Rotation, ReversesRowsAndLabels) {
  TaskDataset d;
  TimeSeriesSample s(10, 7);
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t b = 0; b < 7; ++b) s(t, b) = static_cast<double>(t * 10 + b);
  d.push_back(s, 3);
  const TaskDataset r = make_rotation(d);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.task, Task::Rotation);
  EXPECT_EQ(r.num_classes, 2);
  EXPECT_EQ(r.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.samples[0], s);
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t b = 0; b < 7; ++b) EXPECT_EQ(r.samples[1](t, b), s(9 - t, b));
}

TEST(Rotation, CardinalityAndDegenerateSamples) {
  const TaskDataset d = random_dataset(25, 10, 7, 4);
  const TaskDataset r = make_rotation(d);
  EXPECT_EQ(r.size(), 200u);
  EXPECT_EQ(label_counts(r), (std::vector<std::size_t>{100, 100}));
  TaskDataset flat;
  flat.push_back(TimeSeriesSample(10, 7, 0.3), 0);
  const TaskDataset rf = make_rotation(flat);
  EXPECT_EQ(rf.samples[0], rf.samples[1]);
  EXPECT_EQ(rf.labels[1], 1);
  EXPECT_TRUE(make_rotation(TaskDataset{}).empty());
}

TEST(TimeSegment, TilesSegmentsInOrder) {
  TaskDataset d;
  TimeSeriesSample s(10, 7);
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t b = 0; b < 7; ++b) s(t, b) = static_cast<double>(t) + 0.01 * static_cast<double>(b);
  d.push_back(s, 1);
  const TaskDataset ts = make_time_segment(d, 2);
  ASSERT_EQ(ts.size(), 5u);
  EXPECT_EQ(ts.num_classes, 5);
  EXPECT_EQ(ts.task, Task::TimeSegment);
  EXPECT_EQ(ts.labels, (std::vector<int>{0, 1, 2, 3, 4}));
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t t = 0; t < 10; ++t) {
      const std::size_t src = 2 * j + t % 2;  // rows a, b, a, b, ...
      for (std::size_t b = 0; b < 7; ++b) EXPECT_EQ(ts.samples[j](t, b), s(src, b));
    }
  }
}

TEST(TimeSegment, WholeSeriesAndBadCutoff) {
  const TaskDataset d = random_dataset(1, 10, 7, 5);
  const TaskDataset whole = make_time_segment(d, 10);
  EXPECT_EQ(whole.samples, d.samples);
  for (int l : whole.labels) EXPECT_EQ(l, 0);
  try {
    make_time_segment(d, 3);
    FAIL() << "expected ValueError";
  } catch (const ValueError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("10"), std::string::npos) << msg;
    EXPECT_NE(msg.find("3"), std::string::npos) << msg;
  }
  EXPECT_THROW(make_time_segment(d, 0), ValueError);
}

TEST(Band, SpreadsEachBand) {
  const TaskDataset d = random_dataset(1, 10, 7, 6);
  const TaskDataset bd = make_band(subset(d, std::vector<std::size_t>{0}));
  ASSERT_EQ(bd.size(), 7u);
  EXPECT_EQ(bd.num_classes, 7);
  EXPECT_EQ(bd.task, Task::Band);
  for (std::size_t b = 0; b < 7; ++b) {
    EXPECT_EQ(bd.labels[b], static_cast<int>(b));
    for (std::size_t t = 0; t < 10; ++t)
      for (std::size_t c = 0; c < 7; ++c) EXPECT_EQ(bd.samples[b](t, c), d.samples[0](t, b));
  }
  TaskDataset same;
  same.push_back(TimeSeriesSample(10, 7, 0.2), 0);
  const TaskDataset bs = make_band(same);
  for (std::size_t b = 1; b < 7; ++b) EXPECT_EQ(bs.samples[b], bs.samples[0]);
  TaskDataset narrow;
  narrow.bands = 1;
  narrow.push_back(TimeSeriesSample(10, 1), 0);
  EXPECT_THROW(make_band(narrow), ValueError);
}

TEST(Domain, LabelsByOrigin) {
  // Table 1 frequencies (1.2e6 source, 939000 target) scaled down by 1000.
  const TaskDataset s = random_dataset(300, 10, 7, 7);
  TaskDataset t = random_dataset(234, 10, 7, 8);
  t.push_back(TimeSeriesSample(10, 7, 0.1), 0);
  t.push_back(TimeSeriesSample(10, 7, 0.1), 0);
  t.push_back(TimeSeriesSample(10, 7, 0.1), 0);
  ASSERT_EQ(s.size(), 1200u);
  ASSERT_EQ(t.size(), 939u);
  const TaskDataset d = make_domain(s, t);
  EXPECT_EQ(d.size(), 2139u);
  EXPECT_EQ(label_counts(d), (std::vector<std::size_t>{1200, 939}));
  EXPECT_EQ(d.task, Task::Domain);

  const TaskDataset only = make_domain(s, TaskDataset{});
  for (int l : only.labels) EXPECT_EQ(l, 0);
  const TaskDataset pair = make_domain(subset(s, std::vector<std::size_t>{0}),
                                       subset(t, std::vector<std::size_t>{0}));
  EXPECT_EQ(pair.labels, (std::vector<int>{0, 1}));
  EXPECT_THROW(make_domain(s, random_dataset(1, 8, 7, 9)), ShapeError);
}

TEST(Union, CardinalitiesCompose) {
  const TaskDataset s = random_dataset(5, 10, 7, 10);
  const TaskDataset t = random_dataset(3, 10, 7, 11);
  const TaskDataset u = make_union_unlabeled(s, t);
  EXPECT_EQ(u.size(), 32u);
  for (int l : u.labels) EXPECT_EQ(l, kUnlabeled);
  EXPECT_EQ(make_rotation(u).size(), 64u);
  EXPECT_EQ(make_band(u).size(), 7u * 32u);
  EXPECT_THROW(make_union_unlabeled(s, random_dataset(1, 10, 6, 12)), ShapeError);
}

TEST(Constructors, DoNotMutateInput) {
  const TaskDataset d = random_dataset(4, 10, 7, 13);
  const TaskDataset copy = d;
  make_rotation(d);
  make_time_segment(d, 5);
  make_band(d);
  make_domain(d, d);
  EXPECT_EQ(d.samples, copy.samples);
  EXPECT_EQ(d.labels, copy.labels);
}

TEST(Unlabeled, ViewHidesLabels) {
  const TaskDataset d = random_dataset(2, 10, 7, 14);
  const UnlabeledView v(d);
  EXPECT_EQ(v.size(), d.size());
  const TaskDataset u = v.as_unlabeled();
  EXPECT_EQ(u.samples, d.samples);
  for (int l : u.labels) EXPECT_EQ(l, kUnlabeled);
}

TEST(Sampling, FewShotCountsAndDeterminism) {
  const TaskDataset d = random_dataset(150, 10, 7, 15);
  const TaskDataset k100 = sample_few_shot(d, 100, 1);
  EXPECT_EQ(k100.size(), 400u);
  EXPECT_EQ(k100.class_counts(), (std::vector<std::size_t>{100, 100, 100, 100}));
  EXPECT_EQ(sample_few_shot(d, 5, 1).size(), 20u);
  EXPECT_EQ(sample_few_shot(d, 5, 2).samples, sample_few_shot(d, 5, 2).samples);
  EXPECT_NE(sample_few_shot(d, 5, 2).samples, sample_few_shot(d, 5, 3).samples);
  EXPECT_THROW(sample_few_shot(d, 151, 1), ValueError);
}

TEST(Sampling, WithoutReplacement) {
  const TaskDataset d = random_dataset(20, 10, 7, 16);
  const TaskDataset k = sample_few_shot(d, 20, 4);
  std::set<std::vector<double>> seen;
  for (const auto& s : k.samples) seen.insert({s.values().begin(), s.values().end()});
  EXPECT_EQ(seen.size(), 80u);
}

TEST(Sampling, StratifiedSplitIsDisjoint) {
  const TaskDataset d = random_dataset(10, 10, 7, 17);
  const std::vector<std::size_t> parts = {6, 2, kRest};
  const auto split = stratified_split(d, parts, 3);
  ASSERT_EQ(split.size(), 3u);
  EXPECT_EQ(split[0].class_counts(), (std::vector<std::size_t>{6, 6, 6, 6}));
  EXPECT_EQ(split[1].class_counts(), (std::vector<std::size_t>{2, 2, 2, 2}));
  EXPECT_EQ(split[2].class_counts(), (std::vector<std::size_t>{2, 2, 2, 2}));
  std::set<std::vector<double>> seen;
  for (const auto& p : split)
    for (const auto& s : p.samples) seen.insert({s.values().begin(), s.values().end()});
  EXPECT_EQ(seen.size(), 40u);
  const std::vector<std::size_t> bad = {kRest, 1};
  EXPECT_THROW(stratified_split(d, bad, 3), ValueError);
  const std::vector<std::size_t> big = {11};
  EXPECT_THROW(stratified_split(d, big, 3), ValueError);
}

TEST(Distribution, ConstantData) {
  TaskDataset d;
  for (int i = 0; i < 5; ++i) d.push_back(TimeSeriesSample(10, 7, 0.3), 1);
  const BandDistribution r = band_distribution_report(d, 1, 3);
  ASSERT_EQ(r.steps.size(), 10u);
  EXPECT_EQ(r.samples, 5u);
  for (const auto& s : r.steps) {
    EXPECT_DOUBLE_EQ(s.mean, 0.3);
    EXPECT_DOUBLE_EQ(s.std, 0.0);
  }
}

TEST(Distribution, PopulationStdAndHistogram) {
  TaskDataset d;
  d.push_back(TimeSeriesSample(10, 7, 0.2), 0);
  d.push_back(TimeSeriesSample(10, 7, 0.4), 0);
  d.push_back(TimeSeriesSample(10, 7, 1.7), 2);
  const BandDistribution r = band_distribution_report(d, 0, 0);
  EXPECT_NEAR(r.steps[0].mean, 0.3, 1e-15);
  EXPECT_NEAR(r.steps[0].std, 0.1, 1e-15);
  std::size_t total = 0;
  for (auto c : r.steps[0].histogram) total += c;
  EXPECT_EQ(total, 2u);
  EXPECT_EQ(r.steps[0].histogram.size(), kHistogramBins);
  const BandDistribution out = band_distribution_report(d, 2, 0);
  EXPECT_EQ(out.steps[0].histogram.back(), 1u);
  EXPECT_THROW(band_distribution_report(d, 3, 0), ValueError);
  EXPECT_THROW(band_distribution_report(d, 0, 7), ValueError);
}

}  // namespace
}  // namespace sscrop
