#include "sscrop/synth/generator.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop::synth {
namespace {

// splitmix64 finaliser, used to derive independent per-sample seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t cls, std::uint64_t index) {
  return mix(mix(mix(seed) ^ cls) ^ index);
}

//                                         blue  green red   nir   swir1 swir2 thermal
constexpr std::array<double, 7> kSoil   = {0.10, 0.12, 0.14, 0.22, 0.26, 0.20, 0.30};
constexpr std::array<double, 7> kCanopy = {0.05, 0.09, 0.04, 0.48, 0.17, 0.08, 0.28};
constexpr std::array<double, 7> kWater  = {0.09, 0.10, 0.08, 0.12, 0.10, 0.06, 0.29};

struct Phenology {
  double peak_time;
  double width;
  double vigor;  // fraction of full canopy reached at the peak
  bool flooded;  // baseline is open water instead of soil
};

// Winter wheat peaks at the start of the season, corn late, rice in
// between over flooded fields, and "other" is a weak broad response.
constexpr std::array<Phenology, 4> kPhenology = {{
    {1.5, 1.6, 0.90, false},
    {6.0, 1.5, 1.00, false},
    {5.0, 1.8, 0.85, true},
    {4.0, 2.6, 0.45, false},
}};

}  // namespace

double CropTemplate::value(std::size_t band, double t, double time_offset,
                           double amplitude) const {
  const BandCurve& c = bands.at(band);
  const double d = t - (c.peak_time + time_offset);
  return c.baseline + amplitude * (c.peak_height - c.baseline) * std::exp(-d * d / (2.0 * c.width * c.width));
}

DomainShift DomainShift::identity(std::size_t bands) {
  return uniform(bands, 0.0, 1.0, 0.0, 0.0);
}

DomainShift DomainShift::uniform(std::size_t bands, double offset, double gain, double peak_shift,
                                 double noise_std) {
  DomainShift s;
  s.offset.assign(bands, offset);
  s.gain.assign(bands, gain);
  s.peak_shift = peak_shift;
  s.noise_std = noise_std;
  return s;
}

void DomainShift::validate(std::size_t bands) const {
  if (offset.size() != bands || gain.size() != bands) {
    throw ShapeError("domain shift needs " + std::to_string(bands) + " offsets and gains, got " +
                     std::to_string(offset.size()) + " and " + std::to_string(gain.size()));
  }
  for (double g : gain) {
    if (!(g > 0.0)) throw ValueError("domain shift gain must be positive");
  }
  if (!(noise_std >= 0.0)) throw ValueError("domain shift noise std must be non-negative");
  if (!std::isfinite(peak_shift)) throw ValueError("domain shift peak time must be finite");
}

std::vector<CropTemplate> default_templates() {
  std::vector<CropTemplate> out;
  for (int c = 0; c < kCropClasses; ++c) {
    const Phenology& ph = kPhenology[static_cast<std::size_t>(c)];
    CropTemplate tpl;
    tpl.class_id = c;
    for (std::size_t b = 0; b < kSoil.size(); ++b) {
      const double base = ph.flooded ? kWater[b] : kSoil[b];
      tpl.bands.push_back({base, base + ph.vigor * (kCanopy[b] - base), ph.peak_time, ph.width});
    }
    out.push_back(std::move(tpl));
  }
  return out;
}

DomainShift default_shift() { return DomainShift::uniform(kDefaultBands, 0.08, 1.15, 1.0, 0.02); }

TaskDataset generate(const std::vector<CropTemplate>& templates, const GeneratorConfig& config,
                     const std::optional<DomainShift>& shift, std::size_t n_per_class,
                     std::uint64_t seed) {
  if (templates.size() != static_cast<std::size_t>(kCropClasses)) {
    throw ValueError("generator needs exactly 4 class templates, got " +
                     std::to_string(templates.size()));
  }
  if (n_per_class < 1) throw ValueError("generator needs n_per_class >= 1");
  if (config.steps < 2) throw ValueError("generator needs at least 2 timesteps");
  if (config.noise_std < 0.0 || config.time_jitter < 0.0 || config.amplitude_jitter < 0.0 ||
      config.offset_jitter < 0.0) {
    throw ValueError("generator noise parameters must be non-negative");
  }
  const std::size_t bands = templates.front().bands.size();
  for (const auto& tpl : templates) {
    if (tpl.bands.size() != bands) throw ShapeError("templates disagree on band count");
  }
  if (shift) shift->validate(bands);

  const std::size_t steps = config.steps;
  TaskDataset out;
  out.task = Task::Crop;
  out.num_classes = kCropClasses;
  out.steps = steps;
  out.bands = bands;
  out.samples.resize(templates.size() * n_per_class);
  out.labels.resize(out.samples.size());

  const auto total = static_cast<std::ptrdiff_t>(out.samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t idx = static_cast<std::size_t>(k);
    const std::size_t cls = idx / n_per_class;
    const std::size_t i = idx % n_per_class;
    const CropTemplate& tpl = templates[cls];
    std::mt19937_64 rng(sample_seed(seed, cls, i));
    std::normal_distribution<double> unit(0.0, 1.0);

    // Draw order is fixed so a shifted and an unshifted call with the same
    // seed share their random components.
    const double time_offset = config.time_jitter * unit(rng);
    const double amplitude = 1.0 + config.amplitude_jitter * unit(rng);
    const double peak_shift = shift ? shift->peak_shift : 0.0;
    std::vector<double> background(bands);
    for (double& o : background) o = config.offset_jitter * unit(rng);
    std::vector<double> values(steps * bands);
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t b = 0; b < bands; ++b) {
        const double noise = config.noise_std * unit(rng);
        const double extra = unit(rng);
        double v = tpl.value(b, static_cast<double>(t), time_offset + peak_shift, amplitude) + background[b] + noise;
        if (shift) v = shift->gain[b] * v + shift->offset[b] + shift->noise_std * extra;
        values[t * bands + b] = v;
      }
    }
    out.samples[idx] = TimeSeriesSample(steps, bands, std::move(values));
    out.labels[idx] = tpl.class_id;
  }
  return out;
}

ScenarioConfig default_scenario_config() {
  ScenarioConfig c;
  c.generator.time_jitter = 1.0;
  c.generator.amplitude_jitter = 0.4;
  c.generator.offset_jitter = 0.15;
  return c;
}

Scenario make_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  const auto templates = default_templates();
  Scenario s;
  s.source = generate(templates, config.generator, std::nullopt, config.source_per_class, mix(seed ^ 1));
  s.few_shot =
      generate(templates, config.generator, std::nullopt, config.few_shot_per_class, mix(seed ^ 2));
  s.target = generate(templates, config.generator, config.shift, config.target_per_class, mix(seed ^ 3));
  return s;
}

Scenario default_scenario(std::uint64_t seed) {
  return make_scenario(default_scenario_config(), seed);
}

}  // namespace sscrop::synth
