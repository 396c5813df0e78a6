#include "occdet/types.hpp"

#include <algorithm>

namespace occdet {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::co2_inhale: return "co2_inhale";
    case Channel::co2_bg: return "co2_bg";
    case Channel::voc: return "voc";
    case Channel::light: return "light";
    case Channel::temperature: return "temperature";
    case Channel::humidity: return "humidity";
  }
  return "?";
}

std::optional<Channel> channel_from_name(std::string_view name) {
  for (Channel c : kAllChannels) {
    if (channel_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view channel_csv_column(Channel c) {
  switch (c) {
    case Channel::co2_inhale: return "co2_inhale_ppm";
    case Channel::co2_bg: return "co2_bg_ppm";
    case Channel::voc: return "voc_ppb";
    case Channel::light: return "light_lux";
    case Channel::temperature: return "temp_c";
    case Channel::humidity: return "rh_pct";
  }
  return "?";
}

FeatureSet::FeatureSet(std::vector<Channel> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) {
    throw ValueError("feature set must not be empty");
  }
  std::sort(channels_.begin(), channels_.end(),
            [](Channel a, Channel b) { return static_cast<int>(a) < static_cast<int>(b); });
  if (std::adjacent_find(channels_.begin(), channels_.end()) != channels_.end()) {
    throw ValueError("feature set contains a duplicate channel");
  }
}

bool FeatureSet::contains(Channel c) const {
  return std::find(channels_.begin(), channels_.end(), c) != channels_.end();
}

std::string FeatureSet::label() const {
  std::string out;
  for (Channel c : channels_) {
    if (!out.empty()) out += '+';
    out += channel_name(c);
  }
  return out;
}

}  // namespace occdet
