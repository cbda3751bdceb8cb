// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ics/model.hpp"
#include "ics/network.hpp"
#include "ics/rng.hpp"

namespace ics {

struct GradCheckEntry {
  std::size_t layer_index = 0;
  std::string label;               // e.g. "layer 3 (TemporalConv) weights"
  double max_rel_error = 0.0;      // entries whose gradient magnitude > floor
  double max_small_abs_error = 0.0;  // absolute-error fallback entries
  std::size_t n_entries = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;  // one per parameter tensor
  double max_rel_error = 0.0;
  double max_small_abs_error = 0.0;
  double step = 1e-3;
  double small_floor = 1e-3;  // below this magnitude the absolute check applies

  bool passed(double rel_tol = 1e-4, double abs_tol = 1e-7) const {
    return max_rel_error < rel_tol && max_small_abs_error < abs_tol;
  }
};

// Compares analytic gradients against central finite differences computed
// in 64-bit shadow arithmetic. The model is built from `spec` with seeded
// initialization; `batch`/`labels` provide the probe input.
GradCheckReport gradient_check(const ModelSpec& spec, const TensorT<double>& batch,
                               std::span<const std::uint8_t> labels,
                               std::uint64_t seed, double step = 1e-3);

// Self-contained probe: random input and labels derived from the seed.
GradCheckReport gradient_check(const ModelSpec& spec, std::uint64_t seed,
                               double step = 1e-3);

// Random small-extent spec exercising every layer kind.
ModelSpec random_check_spec(Rng& rng);

}  // namespace ics
