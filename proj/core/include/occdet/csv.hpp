#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

// Sensor CSV format:
//   timestamp,co2_inhale_ppm,co2_bg_ppm,voc_ppb,light_lux,temp_c,rh_pct,occupied
// Timestamps are ISO-8601 UTC ("2020-01-15T08:00:00Z"), empty fields mean the
// channel is absent, occupied is 0 or 1. Timestamps must be strictly
// increasing.
std::vector<SensorSample> load_csv(const std::string& path);
std::vector<SensorSample> parse_csv(std::string_view text, const std::string& origin = "<string>");

void write_csv(const std::string& path, const std::vector<SensorSample>& samples);
std::string format_csv(const std::vector<SensorSample>& samples);

// "2020-01-15T08:00:00Z" <-> seconds since the Unix epoch.
std::int64_t parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t epoch_seconds);

}  // namespace occdet
