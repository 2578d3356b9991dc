#include "trailrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trailrec/error.hpp"
#include "trailrec/rng.hpp"

namespace trailrec {

void GeneratorSpec::validate() const {
  if (n_locations < 2) throw InputError("synth needs at least 2 locations");
  if (min_length < 2 || max_length < min_length) throw InputError("synth trail lengths must satisfy 2 <= min <= max");
  if (!(concentration >= 0.0)) throw InputError("concentration must be non-negative");
  if (!(gap_rate >= 0.0 && gap_rate <= 0.5)) throw InputError("gap rate must lie in [0, 0.5]");
  if (gap_magnitude < 0) throw InputError("gap magnitude must be non-negative");
  if (max_step < 1) throw InputError("max step must be at least 1");
}

namespace {

std::vector<double> peaked_row(Rng& rng, std::size_t n, double concentration) {
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  std::vector<double> row(n, 0.0);
  if (std::isinf(concentration)) {
    row[static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin())] = 1.0;
    return row;
  }
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    row[i] = std::exp(concentration * (z[i] - top));
    sum += row[i];
  }
  for (auto& p : row) p /= sum;
  return row;
}

std::size_t draw(Rng& rng, const double* probs, std::size_t n) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Rounding left a sliver of mass; give it to the last non-zero entry.
  for (std::size_t i = n; i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return n - 1;
}

std::vector<double> step_weights(std::int64_t max_step) {
  std::vector<double> w(static_cast<std::size_t>(max_step));
  double sum = 0.0;
  for (std::size_t d = 0; d < w.size(); ++d) {
    w[d] = std::pow(static_cast<double>(d + 1), -1.5);
    sum += w[d];
  }
  for (auto& v : w) v /= sum;
  return w;
}

HiddenModel sample_model(const GeneratorSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0));
  const std::size_t n = spec.n_locations;
  HiddenModel model;
  const std::size_t width = std::max<std::size_t>(2, std::to_string(n - 1).size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    model.tokens.push_back("L" + std::string(width - digits.size(), '0') + digits);
  }
  model.begin = peaked_row(rng, n, spec.concentration);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = peaked_row(rng, n, spec.concentration);
    model.transition.insert(model.transition.end(), row.begin(), row.end());
  }
  model.end.resize(n);
  for (auto& e : model.end) e = std::min(1.0, spec.gap_rate * 2.0 * rng.uniform01());
  return model;
}

Trail sample_trail(const GeneratorSpec& spec, const HiddenModel& model, const std::vector<double>& steps,
                   std::size_t index, std::size_t id_width) {
  Rng rng(derive_seed(spec.seed, index + 1));
  const std::size_t n = model.tokens.size();
  const std::size_t span = spec.max_length - spec.min_length + 1;
  const std::size_t length = spec.min_length + static_cast<std::size_t>(rng.index(span));

  std::string digits = std::to_string(index);
  Trail trail{"T" + std::string(id_width - std::min(id_width, digits.size()), '0') + digits, {}};
  trail.records.reserve(length);

  std::int64_t t = static_cast<std::int64_t>(rng.index(1000));
  std::size_t loc = draw(rng, model.begin.data(), n);
  trail.records.push_back({LocationId{static_cast<std::uint32_t>(loc + 2)}, Timestamp{t}});
  while (trail.records.size() < length) {
    std::int64_t dt = static_cast<std::int64_t>(draw(rng, steps.data(), steps.size())) + 1;
    if (rng.uniform01() < model.end[loc]) {
      dt += spec.gap_magnitude;
      loc = draw(rng, model.begin.data(), n);
    } else {
      loc = draw(rng, model.transition.data() + loc * n, n);
    }
    t += dt;
    trail.records.push_back({LocationId{static_cast<std::uint32_t>(loc + 2)}, Timestamp{t}});
  }
  return trail;
}

SynthOutput setup(const GeneratorSpec& spec) {
  spec.validate();
  SynthOutput out;
  out.hidden = sample_model(spec);
  for (const auto& token : out.hidden.tokens) out.data.locations.intern(token);
  out.data.unit = TimeUnit::ticks;
  out.data.trails.resize(spec.n_trails);
  return out;
}

std::size_t id_width(const GeneratorSpec& spec) {
  return std::to_string(spec.n_trails == 0 ? 0 : spec.n_trails - 1).size();
}

}  // namespace

SynthOutput generate_serial(const GeneratorSpec& spec) {
  auto out = setup(spec);
  const auto steps = step_weights(spec.max_step);
  const auto width = id_width(spec);
  for (std::size_t i = 0; i < spec.n_trails; ++i) out.data.trails[i] = sample_trail(spec, out.hidden, steps, i, width);
  return out;
}

SynthOutput generate(const GeneratorSpec& spec) {
  auto out = setup(spec);
  const auto steps = step_weights(spec.max_step);
  const auto width = id_width(spec);
  const auto count = static_cast<std::ptrdiff_t>(spec.n_trails);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.data.trails[k] = sample_trail(spec, out.hidden, steps, k, width);
  }
  return out;
}

}  // namespace trailrec
