// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ics/error.hpp"
#include "ics/tensor.hpp"

namespace ics {

// Labeled multichannel time-series samples. Sample storage is one
// contiguous f32 buffer, channel-major within each sample.
struct EegDataset {
  std::size_t n_channels = 0;
  std::size_t n_timepoints = 0;
  std::vector<float> values;  // n_samples * n_channels * n_timepoints
  std::vector<std::uint8_t> labels;     // 0 = alert, 1 = drowsy
  std::vector<std::uint16_t> subjects;
  std::vector<std::string> channel_names;
  std::uint16_t sampling_rate_hz = 0;   // uninterpreted metadata
  std::vector<std::uint16_t> planted;   // synthetic ground truth, may be empty

  std::size_t n_samples() const { return labels.size(); }

  std::span<const float> sample(std::size_t i) const {
    const std::size_t stride = n_channels * n_timepoints;
    return {values.data() + i * stride, stride};
  }
  std::span<float> sample(std::size_t i) {
    const std::size_t stride = n_channels * n_timepoints;
    return {values.data() + i * stride, stride};
  }

  // Checks the structural invariants (buffer length, label values,
  // channel-name count). Throws DataError on violation.
  void validate() const;

  std::vector<std::uint16_t> distinct_subjects() const;
};

struct LosoSplit {
  std::uint16_t held_out_subject = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// One split per distinct subject, ordered by subject id. Requires >= 2
// distinct subjects.
std::vector<LosoSplit> loso_splits(const EegDataset& dataset);

// Keep only the listed channel rows (strictly ascending indices). Planted
// indices are remapped to the surviving rows.
EegDataset restrict_channels(const EegDataset& dataset,
                             std::span<const std::size_t> channels);

// Row-subset of samples in the given order (labels/subjects follow).
EegDataset subset(const EegDataset& dataset, std::span<const std::size_t> indices);

// Fraction of matching entries; rejects empty or mismatched inputs.
double accuracy(std::span<const std::uint8_t> predictions,
                std::span<const std::uint8_t> labels);

struct SynthParams {
  std::size_t n_subjects = 8;
  std::size_t per_subject = 200;  // samples per subject, classes balanced
  std::size_t channels = 30;
  std::size_t timepoints = 384;
  std::size_t planted = 10;       // channels carrying the class signal
  double amplitude = 1.0;         // sinusoid amplitude on planted channels
  double noise = 1.0;             // Gaussian noise std on all channels
  double jitter = 0.2;            // per-subject per-channel gain in [1-j, 1+j]
  double signal_hz = 5.0;
  std::uint16_t sampling_rate_hz = 128;
  std::uint64_t seed = 0;
};

// Synthetic EEG with ground-truth discriminative channels: class 0 is pure
// Gaussian noise; class 1 adds a random-phase sinusoid on the planted
// channels only. Fully deterministic for a given seed.
EegDataset synth_generate(const SynthParams& params);

// Portable binary container ("EEGD", little-endian). Round-trips exactly.
void write_dataset(const EegDataset& dataset, const std::string& path);
EegDataset read_dataset(const std::string& path);

// Directory of per-sample CSV files (header row of channel names, then one
// row per timepoint) plus a manifest.csv with columns file,label,subject.
EegDataset import_csv(const std::string& directory);

}  // namespace ics
