// SPDX-License-Identifier: Apache-2.0
#include "ics/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ics/io_util.hpp"
#include "ics/rng.hpp"

namespace ics {

void EegDataset::validate() const {
  const std::size_t n = n_samples();
  if (values.size() != n * n_channels * n_timepoints)
    throw DataError("dataset: value buffer length does not match sample count");
  if (subjects.size() != n)
    throw DataError("dataset: subject id count does not match sample count");
  if (channel_names.size() != n_channels)
    throw DataError("dataset: channel name count does not match channel count");
  for (std::uint8_t l : labels)
    if (l > 1) throw DataError("dataset: labels must be 0 or 1");
  for (std::uint16_t p : planted)
    if (p >= n_channels) throw DataError("dataset: planted index out of range");
}

std::vector<std::uint16_t> EegDataset::distinct_subjects() const {
  std::vector<std::uint16_t> ids(subjects.begin(), subjects.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<LosoSplit> loso_splits(const EegDataset& dataset) {
  const auto ids = dataset.distinct_subjects();
  if (ids.size() < 2)
    throw DataError("loso_splits: at least 2 distinct subjects required, got " +
                    std::to_string(ids.size()));
  std::vector<LosoSplit> splits;
  splits.reserve(ids.size());
  for (std::uint16_t id : ids) {
    LosoSplit s;
    s.held_out_subject = id;
    for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
      if (dataset.subjects[i] == id)
        s.test_indices.push_back(i);
      else
        s.train_indices.push_back(i);
    }
    splits.push_back(std::move(s));
  }
  return splits;
}

EegDataset restrict_channels(const EegDataset& dataset,
                             std::span<const std::size_t> channels) {
  if (channels.empty()) throw UsageError("restrict_channels: empty channel list");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] >= dataset.n_channels)
      throw UsageError("restrict_channels: index " + std::to_string(channels[i]) +
                       " out of range (" + std::to_string(dataset.n_channels) +
                       " channels)");
    if (i > 0 && channels[i] <= channels[i - 1])
      throw UsageError("restrict_channels: indices must be strictly ascending");
  }
  EegDataset out;
  out.n_channels = channels.size();
  out.n_timepoints = dataset.n_timepoints;
  out.labels = dataset.labels;
  out.subjects = dataset.subjects;
  out.sampling_rate_hz = dataset.sampling_rate_hz;
  for (std::size_t c : channels) out.channel_names.push_back(dataset.channel_names[c]);
  for (std::size_t newi = 0; newi < channels.size(); ++newi) {
    const auto old_c = std::uint16_t(channels[newi]);
    if (std::find(dataset.planted.begin(), dataset.planted.end(), old_c) !=
        dataset.planted.end())
      out.planted.push_back(std::uint16_t(newi));
  }
  out.values.resize(dataset.n_samples() * out.n_channels * out.n_timepoints);
  const std::size_t T = dataset.n_timepoints;
  for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
    const auto src = dataset.sample(i);
    float* dst = out.values.data() + i * out.n_channels * T;
    for (std::size_t c = 0; c < channels.size(); ++c)
      std::copy_n(src.data() + channels[c] * T, T, dst + c * T);
  }
  return out;
}

EegDataset subset(const EegDataset& dataset, std::span<const std::size_t> indices) {
  EegDataset out;
  out.n_channels = dataset.n_channels;
  out.n_timepoints = dataset.n_timepoints;
  out.channel_names = dataset.channel_names;
  out.sampling_rate_hz = dataset.sampling_rate_hz;
  out.planted = dataset.planted;
  const std::size_t stride = dataset.n_channels * dataset.n_timepoints;
  out.values.resize(indices.size() * stride);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const std::size_t i = indices[j];
    if (i >= dataset.n_samples())
      throw UsageError("subset: sample index out of range");
    std::copy_n(dataset.values.data() + i * stride, stride,
                out.values.data() + j * stride);
    out.labels.push_back(dataset.labels[i]);
    out.subjects.push_back(dataset.subjects[i]);
  }
  return out;
}

double accuracy(std::span<const std::uint8_t> predictions,
                std::span<const std::uint8_t> labels) {
  if (predictions.size() != labels.size())
    throw UsageError("accuracy: prediction/label lengths differ");
  if (predictions.empty()) throw UsageError("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++correct;
  return double(correct) / double(predictions.size());
}

EegDataset synth_generate(const SynthParams& p) {
  if (p.n_subjects == 0 || p.per_subject == 0)
    throw UsageError("synth_generate: subjects and samples per subject must be >= 1");
  if (p.channels == 0 || p.timepoints == 0)
    throw UsageError("synth_generate: channels and timepoints must be >= 1");
  if (p.planted > p.channels)
    throw UsageError("synth_generate: planted channel count exceeds channel count");
  if (p.noise <= 0.0) throw UsageError("synth_generate: noise std must be > 0");
  if (p.amplitude < 0.0) throw UsageError("synth_generate: amplitude must be >= 0");
  if (p.jitter < 0.0 || p.jitter >= 1.0)
    throw UsageError("synth_generate: jitter must lie in [0, 1)");
  if (p.sampling_rate_hz == 0)
    throw UsageError("synth_generate: sampling rate must be > 0");

  Rng rng(p.seed);

  EegDataset ds;
  ds.n_channels = p.channels;
  ds.n_timepoints = p.timepoints;
  ds.sampling_rate_hz = p.sampling_rate_hz;
  for (std::size_t c = 0; c < p.channels; ++c) {
    char name[8];
    std::snprintf(name, sizeof name, "ch%02zu", c);
    ds.channel_names.emplace_back(name);
  }

  // Planted channels: a seeded draw of `planted` distinct indices.
  std::vector<std::uint16_t> all(p.channels);
  for (std::size_t c = 0; c < p.channels; ++c) all[c] = std::uint16_t(c);
  shuffle(all, rng);
  ds.planted.assign(all.begin(), all.begin() + std::ptrdiff_t(p.planted));
  std::sort(ds.planted.begin(), ds.planted.end());

  const std::size_t n = p.n_subjects * p.per_subject;
  ds.values.resize(n * p.channels * p.timepoints);
  ds.labels.resize(n);
  ds.subjects.resize(n);

  std::vector<char> is_planted(p.channels, 0);
  for (std::uint16_t c : ds.planted) is_planted[c] = 1;

  const double omega =
      2.0 * 3.141592653589793238462643383279 * p.signal_hz / double(p.sampling_rate_hz);

  std::size_t idx = 0;
  for (std::size_t s = 0; s < p.n_subjects; ++s) {
    // Fixed per-subject channel gains model cross-subject variation.
    std::vector<double> gain(p.channels);
    for (std::size_t c = 0; c < p.channels; ++c)
      gain[c] = rng.uniform(1.0 - p.jitter, 1.0 + p.jitter);
    for (std::size_t j = 0; j < p.per_subject; ++j, ++idx) {
      const std::uint8_t label = std::uint8_t(j % 2);
      ds.labels[idx] = label;
      ds.subjects[idx] = std::uint16_t(s);
      const double phase = rng.uniform(0.0, 2.0 * 3.141592653589793238462643383279);
      float* sample = ds.values.data() + idx * p.channels * p.timepoints;
      for (std::size_t c = 0; c < p.channels; ++c) {
        float* row = sample + c * p.timepoints;
        const double g = gain[c];
        if (label == 1 && is_planted[c] && p.amplitude > 0.0) {
          for (std::size_t t = 0; t < p.timepoints; ++t)
            row[t] = float(g * (p.noise * rng.normal() +
                                p.amplitude * std::sin(omega * double(t) + phase)));
        } else {
          for (std::size_t t = 0; t < p.timepoints; ++t)
            row[t] = float(g * p.noise * rng.normal());
        }
      }
    }
  }
  ds.validate();
  return ds;
}

namespace {

constexpr char kDatasetMagic[4] = {'E', 'E', 'G', 'D'};
constexpr std::uint16_t kDatasetVersion = 1;

}  // namespace

void write_dataset(const EegDataset& dataset, const std::string& path) {
  dataset.validate();
  std::string names;
  for (std::size_t c = 0; c < dataset.channel_names.size(); ++c) {
    if (c > 0) names += '\n';
    names += dataset.channel_names[c];
  }
  if (names.size() > 0xffff)
    throw DataError("write_dataset: channel name table exceeds 65535 bytes");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_dataset: cannot open " + path);
  out.write(kDatasetMagic, 4);
  io::write_u16(out, kDatasetVersion);
  io::write_u32(out, std::uint32_t(dataset.n_samples()));
  io::write_u16(out, std::uint16_t(dataset.n_channels));
  io::write_u16(out, std::uint16_t(dataset.n_timepoints));
  io::write_u16(out, dataset.sampling_rate_hz);
  io::write_u16(out, std::uint16_t(dataset.planted.size()));
  for (std::uint16_t p : dataset.planted) io::write_u16(out, p);
  io::write_u16(out, std::uint16_t(names.size()));
  out.write(names.data(), std::streamsize(names.size()));
  const std::size_t stride = dataset.n_channels * dataset.n_timepoints;
  for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
    io::write_u8(out, dataset.labels[i]);
    io::write_u16(out, dataset.subjects[i]);
    out.write(reinterpret_cast<const char*>(dataset.values.data() + i * stride),
              std::streamsize(stride * sizeof(float)));
  }
  if (!out) throw DataError("write_dataset: write failed for " + path);
}

EegDataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("read_dataset: cannot open " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kDatasetMagic, 4) != 0)
    throw DataError("read_dataset: bad magic at offset 0, expected \"EEGD\"");
  const std::uint16_t version = io::read_u16(in, "read_dataset", "version");
  if (version != kDatasetVersion)
    throw DataError("read_dataset: unsupported version " + std::to_string(version));

  EegDataset ds;
  const std::uint32_t n_samples = io::read_u32(in, "read_dataset", "sample count");
  ds.n_channels = io::read_u16(in, "read_dataset", "channel count");
  ds.n_timepoints = io::read_u16(in, "read_dataset", "timepoint count");
  ds.sampling_rate_hz = io::read_u16(in, "read_dataset", "sampling rate");
  const std::uint16_t n_planted = io::read_u16(in, "read_dataset", "planted count");
  for (std::uint16_t i = 0; i < n_planted; ++i)
    ds.planted.push_back(io::read_u16(in, "read_dataset", "planted index"));
  const std::uint16_t name_len = io::read_u16(in, "read_dataset", "name table length");
  std::string names(name_len, '\0');
  in.read(names.data(), name_len);
  if (!in) io::fail_truncated(in, "read_dataset", "channel name table");
  if (ds.n_channels > 0) {
    std::size_t start = 0;
    for (std::size_t c = 0; c + 1 < ds.n_channels; ++c) {
      const std::size_t nl = names.find('\n', start);
      if (nl == std::string::npos)
        throw DataError("read_dataset: name table holds fewer names than channels");
      ds.channel_names.push_back(names.substr(start, nl - start));
      start = nl + 1;
    }
    ds.channel_names.push_back(names.substr(start));
  }

  const std::size_t stride = ds.n_channels * ds.n_timepoints;
  ds.values.resize(std::size_t(n_samples) * stride);
  ds.labels.resize(n_samples);
  ds.subjects.resize(n_samples);
  for (std::uint32_t i = 0; i < n_samples; ++i) {
    ds.labels[i] = io::read_u8(in, "read_dataset", "label");
    if (ds.labels[i] > 1)
      throw DataError("read_dataset: sample " + std::to_string(i) +
                      " has label " + std::to_string(ds.labels[i]) +
                      ", expected 0 or 1");
    ds.subjects[i] = io::read_u16(in, "read_dataset", "subject id");
    in.read(reinterpret_cast<char*>(ds.values.data() + std::size_t(i) * stride),
            std::streamsize(stride * sizeof(float)));
    if (!in)
      throw DataError("read_dataset: truncated payload in sample " + std::to_string(i) +
                      " near offset " + std::to_string(io::offset_of(in)) +
                      " (header promises " + std::to_string(n_samples) + " samples)");
  }
  // Trailing bytes mean the header undercounts the payload.
  char extra;
  in.read(&extra, 1);
  if (in.gcount() != 0)
    throw DataError("read_dataset: payload longer than the " +
                    std::to_string(n_samples) + " samples promised by the header");
  ds.validate();
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

EegDataset import_csv(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  const fs::path manifest_path = dir / "manifest.csv";
  std::ifstream manifest(manifest_path);
  if (!manifest)
    throw DataError("import_csv: cannot open manifest " + manifest_path.string());

  std::string line;
  if (!std::getline(manifest, line))
    throw DataError("import_csv: empty manifest " + manifest_path.string());
  const auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "file" || header[1] != "label" ||
      header[2] != "subject")
    throw DataError("import_csv: manifest header must be file,label,subject");

  EegDataset ds;
  std::size_t row_no = 1;
  while (std::getline(manifest, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw DataError("import_csv: manifest row " + std::to_string(row_no) +
                      " must have 3 fields");
    const fs::path file = dir / fields[0];
    std::ifstream f(file);
    if (!f)
      throw DataError("import_csv: manifest references missing file " + file.string());

    std::string data_line;
    if (!std::getline(f, data_line))
      throw DataError("import_csv: " + file.string() + " is empty");
    const auto names = split_csv_line(data_line);
    std::vector<std::vector<float>> rows;
    std::size_t data_row = 1;
    while (std::getline(f, data_line)) {
      ++data_row;
      if (data_line.empty() || data_line == "\r") continue;
      const auto cells = split_csv_line(data_line);
      if (cells.size() != names.size())
        throw DataError("import_csv: " + file.string() + " row " +
                        std::to_string(data_row) + " has " +
                        std::to_string(cells.size()) + " columns, header has " +
                        std::to_string(names.size()));
      std::vector<float> vals(cells.size());
      for (std::size_t c = 0; c < cells.size(); ++c) {
        try {
          vals[c] = std::stof(cells[c]);
        } catch (const std::exception&) {
          throw DataError("import_csv: " + file.string() + " row " +
                          std::to_string(data_row) + ": bad value \"" + cells[c] + "\"");
        }
      }
      rows.push_back(std::move(vals));
    }
    if (rows.empty())
      throw DataError("import_csv: " + file.string() + " has no data rows");

    if (ds.n_samples() == 0) {
      ds.n_channels = names.size();
      ds.n_timepoints = rows.size();
      ds.channel_names = names;
    } else {
      if (names.size() != ds.n_channels || rows.size() != ds.n_timepoints)
        throw DataError("import_csv: " + file.string() + " is " +
                        std::to_string(rows.size()) + "x" + std::to_string(names.size()) +
                        ", expected " + std::to_string(ds.n_timepoints) + "x" +
                        std::to_string(ds.n_channels));
      if (names != ds.channel_names)
        throw DataError("import_csv: " + file.string() +
                        " channel names differ from the first file");
    }

    int label;
    unsigned long subject;
    try {
      label = std::stoi(fields[1]);
      subject = std::stoul(fields[2]);
    } catch (const std::exception&) {
      throw DataError("import_csv: manifest row " + std::to_string(row_no) +
                      ": bad label or subject");
    }
    if (label < 0 || label > 1)
      throw DataError("import_csv: manifest row " + std::to_string(row_no) +
                      ": label must be 0 or 1");
    if (subject > 0xffff)
      throw DataError("import_csv: manifest row " + std::to_string(row_no) +
                      ": subject id does not fit 16 bits");
    ds.labels.push_back(std::uint8_t(label));
    ds.subjects.push_back(std::uint16_t(subject));
    // CSV rows are timepoints; storage is channel-major.
    const std::size_t base = ds.values.size();
    ds.values.resize(base + ds.n_channels * ds.n_timepoints);
    for (std::size_t t = 0; t < ds.n_timepoints; ++t)
      for (std::size_t c = 0; c < ds.n_channels; ++c)
        ds.values[base + c * ds.n_timepoints + t] = rows[t][c];
  }
  if (ds.n_samples() == 0)
    throw DataError("import_csv: manifest lists no samples");
  ds.validate();
  return ds;
}

}  // namespace ics
