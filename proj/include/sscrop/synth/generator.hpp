#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sscrop/data/dataset.hpp"

// Synthetic crop phenology: every band follows baseline + a Gaussian bump
// centred on the class's peak date. A domain shift moves the peak date and
// applies a per-band gain and offset, which is how the target region differs
// from the source region.
namespace sscrop::synth {

struct BandCurve {
  double baseline = 0.0;     // reflectance outside the growing season
  double peak_height = 0.0;  // reflectance at the peak (below baseline for absorbing bands)
  double peak_time = 0.0;    // timestep units
  double width = 1.0;        // timestep units, Gaussian sigma
};

struct CropTemplate {
  int class_id = 0;
  std::vector<BandCurve> bands;

  double value(std::size_t band, double t, double time_offset = 0.0,
               double amplitude = 1.0) const;
};

// Per-sample variability around the template.
struct GeneratorConfig {
  std::size_t steps = kDefaultSteps;
  double noise_std = 0.02;         // iid Gaussian per entry
  double time_jitter = 0.0;        // std of a per-sample shift of the peak date
  double amplitude_jitter = 0.0;   // std of a per-sample multiplicative bump height factor
  double offset_jitter = 0.0;      // std of a per-sample, per-band additive background level
};

struct DomainShift {
  std::vector<double> offset;  // per band, added after gain
  std::vector<double> gain;    // per band, > 0
  double peak_shift = 0.0;     // timestep units
  double noise_std = 0.0;      // extra iid noise on top of the generator's

  static DomainShift identity(std::size_t bands);
  // Uniform offset/gain over all bands.
  static DomainShift uniform(std::size_t bands, double offset, double gain, double peak_shift,
                             double noise_std);
  void validate(std::size_t bands) const;
};

// Wheat, corn, rice, other over blue, green, red, NIR, SWIR1, SWIR2, thermal.
std::vector<CropTemplate> default_templates();

// The default source -> target shift: offset 0.08, gain 1.15, one step later
// peak, 0.02 extra noise, on every band.
DomainShift default_shift();

// n_per_class samples of every template, grouped by class. Sample i of class c
// draws from its own stream derived from (seed, c, i), so output does not
// depend on thread count.
TaskDataset generate(const std::vector<CropTemplate>& templates, const GeneratorConfig& config,
                     const std::optional<DomainShift>& shift, std::size_t n_per_class,
                     std::uint64_t seed);

struct ScenarioConfig {
  std::size_t source_per_class = 2000;
  std::size_t few_shot_per_class = 100;
  std::size_t target_per_class = 2000;
  GeneratorConfig generator;
  DomainShift shift = default_shift();
};

struct Scenario {
  TaskDataset source;
  TaskDataset few_shot;
  TaskDataset target;
};

// Source/few-shot/target sizes 2000/100/2000 per class; time jitter 1.0,
// amplitude jitter 0.4, background jitter 0.15, noise 0.02.
ScenarioConfig default_scenario_config();

// Source, few-shot pool and shifted target drawn from independent streams.
Scenario make_scenario(const ScenarioConfig& config, std::uint64_t seed);
Scenario default_scenario(std::uint64_t seed);

}  // namespace sscrop::synth
