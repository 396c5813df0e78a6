#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace occdet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CSV input: schema, parse, or value-domain problems.
class CsvError : public Error {
 public:
  using Error::Error;
};

// Invalid argument or precondition violation.
class ValueError : public Error {
 public:
  using Error::Error;
};

// A solver failed in a way that has no usable result.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// The six environmental channels, in canonical order.
enum class Channel : int {
  co2_inhale = 0,
  co2_bg = 1,
  voc = 2,
  light = 3,
  temperature = 4,
  humidity = 5,
};

inline constexpr int kNumChannels = 6;
inline constexpr std::array<Channel, kNumChannels> kAllChannels = {
    Channel::co2_inhale, Channel::co2_bg,     Channel::voc,
    Channel::light,      Channel::temperature, Channel::humidity,
};

std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);
// Column header used for this channel in the sensor CSV format.
std::string_view channel_csv_column(Channel c);

// A requested channel has too many gaps (or is missing entirely) in a dataset.
class AvailabilityError : public Error {
 public:
  AvailabilityError(Channel channel, const std::string& message)
      : Error(message), channel_(channel) {}
  Channel channel() const { return channel_; }

 private:
  Channel channel_;
};

// One timestamped reading of all channels plus the occupancy label.
// Channels a zone does not measure are absent.
struct SensorSample {
  std::int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
  std::array<std::optional<double>, kNumChannels> channels{};
  int occupied = 0;  // {0, 1}

  std::optional<double>& channel(Channel c) {
    return channels[static_cast<int>(c)];
  }
  const std::optional<double>& channel(Channel c) const {
    return channels[static_cast<int>(c)];
  }
};

// Ordered, duplicate-free subset of channels. Construction normalizes to
// canonical order and rejects empty sets and duplicates.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<Channel> channels);

  const std::vector<Channel>& channels() const { return channels_; }
  std::size_t size() const { return channels_.size(); }
  bool contains(Channel c) const;
  // "co2_inhale+voc" style label.
  std::string label() const;

  bool operator==(const FeatureSet&) const = default;

 private:
  std::vector<Channel> channels_;
};

// Dense row-major numeric matrix over a feature set, with labels.
struct FeatureMatrix {
  FeatureSet features;
  std::size_t rows = 0;
  std::vector<double> values;  // rows x features.size(), row-major
  std::vector<int> labels;     // {0, 1}, length rows
  // Indices of the source samples each row came from; filled by
  // build_matrix (which may drop rows), empty for synthetic matrices.
  std::vector<std::size_t> source_rows;

  std::size_t cols() const { return features.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values.data() + r * cols(), cols());
  }
};

}  // namespace occdet
