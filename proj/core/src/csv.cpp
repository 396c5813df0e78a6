#include "occdet/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace occdet {

namespace {

constexpr std::array<const char*, 8> kHeaderColumns = {
    "timestamp", "co2_inhale_ppm", "co2_bg_ppm", "voc_ppb",
    "light_lux", "temp_c",         "rh_pct",     "occupied",
};

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  return true;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double_field(std::string_view field, const std::string& origin,
                          std::size_t line_no, const char* column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw CsvError(origin + ":" + std::to_string(line_no) + ": column " + column +
                   ": unparseable numeric value '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw CsvError(origin + ":" + std::to_string(line_no) + ": column " + column +
                   ": non-finite value");
  }
  return value;
}

void validate_channel_value(Channel c, double value, const std::string& origin,
                            std::size_t line_no) {
  const char* column = channel_csv_column(c).data();
  switch (c) {
    case Channel::co2_inhale:
    case Channel::co2_bg:
    case Channel::voc:
    case Channel::light:
      if (value < 0.0) {
        throw CsvError(origin + ":" + std::to_string(line_no) + ": column " + column +
                       ": negative value " + std::to_string(value));
      }
      break;
    case Channel::humidity:
      if (value < 0.0 || value > 100.0) {
        throw CsvError(origin + ":" + std::to_string(line_no) + ": column " + column +
                       ": relative humidity outside [0, 100]");
      }
      break;
    case Channel::temperature:
      break;
  }
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  // Strict "YYYY-MM-DDThh:mm:ssZ".
  int y, mo, d, h, mi, s;
  const bool ok = text.size() == 20 && parse_fixed_uint(text, 0, 4, y) &&
                  text[4] == '-' && parse_fixed_uint(text, 5, 2, mo) &&
                  text[7] == '-' && parse_fixed_uint(text, 8, 2, d) &&
                  text[10] == 'T' && parse_fixed_uint(text, 11, 2, h) &&
                  text[13] == ':' && parse_fixed_uint(text, 14, 2, mi) &&
                  text[16] == ':' && parse_fixed_uint(text, 17, 2, s) &&
                  text[19] == 'Z';
  if (!ok || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 59) {
    throw CsvError("unparseable timestamp '" + std::string(text) +
                   "' (expected ISO-8601 UTC, e.g. 2020-01-15T08:00:00Z)");
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::vector<SensorSample> parse_csv(std::string_view text, const std::string& origin) {
  std::vector<SensorSample> samples;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    const auto fields = split_fields(line);
    if (!header_seen) {
      if (fields.size() != kHeaderColumns.size()) {
        throw CsvError(origin + ":1: header has " + std::to_string(fields.size()) +
                       " columns, expected " + std::to_string(kHeaderColumns.size()));
      }
      for (std::size_t i = 0; i < kHeaderColumns.size(); ++i) {
        if (fields[i] != kHeaderColumns[i]) {
          throw CsvError(origin + ":1: expected column '" + kHeaderColumns[i] +
                         "' at position " + std::to_string(i + 1) + ", found '" +
                         std::string(fields[i]) + "'");
        }
      }
      header_seen = true;
      continue;
    }

    if (fields.size() != kHeaderColumns.size()) {
      throw CsvError(origin + ":" + std::to_string(line_no) + ": row has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(kHeaderColumns.size()));
    }

    SensorSample sample;
    try {
      sample.timestamp = parse_timestamp(fields[0]);
    } catch (const CsvError& e) {
      throw CsvError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    for (int ci = 0; ci < kNumChannels; ++ci) {
      const std::string_view field = fields[1 + ci];
      if (field.empty()) continue;
      const Channel c = kAllChannels[ci];
      const double value =
          parse_double_field(field, origin, line_no, channel_csv_column(c).data());
      validate_channel_value(c, value, origin, line_no);
      sample.channels[ci] = value;
    }
    const std::string_view occ = fields[7];
    if (occ == "0") {
      sample.occupied = 0;
    } else if (occ == "1") {
      sample.occupied = 1;
    } else {
      throw CsvError(origin + ":" + std::to_string(line_no) +
                     ": column occupied: value '" + std::string(occ) +
                     "' not in {0,1}");
    }
    if (!samples.empty() && sample.timestamp <= samples.back().timestamp) {
      throw CsvError(origin + ":" + std::to_string(line_no) +
                     ": non-monotone timestamp " + format_timestamp(sample.timestamp) +
                     " (previous row is " + format_timestamp(samples.back().timestamp) +
                     ")");
    }
    samples.push_back(std::move(sample));
  }
  if (!header_seen) {
    throw CsvError(origin + ": empty file, expected header row");
  }
  return samples;
}

std::vector<SensorSample> load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

std::string format_csv(const std::vector<SensorSample>& samples) {
  std::string out;
  out.reserve(64 * (samples.size() + 1));
  for (std::size_t i = 0; i < kHeaderColumns.size(); ++i) {
    if (i) out += ',';
    out += kHeaderColumns[i];
  }
  out += '\n';
  char buf[40];
  for (const SensorSample& s : samples) {
    out += format_timestamp(s.timestamp);
    for (int ci = 0; ci < kNumChannels; ++ci) {
      out += ',';
      if (s.channels[ci].has_value()) {
        std::snprintf(buf, sizeof(buf), "%.6f", *s.channels[ci]);
        out += buf;
      }
    }
    out += ',';
    out += (s.occupied ? '1' : '0');
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<SensorSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  out << format_csv(samples);
  if (!out) {
    throw Error("write failed: " + path);
  }
}

}  // namespace occdet
