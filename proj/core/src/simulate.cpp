#include "occdet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json.hpp"
#include "occdet/rng.hpp"

namespace occdet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lighting model.
constexpr double kArtificialLightLux = 400.0;
constexpr double kDaylightPeakLux = 450.0;
constexpr double kDaylightStartHour = 7.0;
constexpr double kDaylightHours = 10.5;

// HVAC / moisture dynamics. Occupant couplings are deliberately weak: the
// reference studies found temperature and humidity to be poor occupancy
// indicators, so these channels carry mostly cycling and drift.
// Rising zero-crossing of the supply-air VOC sinusoid; the peak lands a
// quarter period later, at 02:00. VOC accumulates overnight while outdoor-air
// dampers are on night setback and is purged by daytime ventilation.
constexpr double kVocSwingPhaseHour = 20.0;

constexpr double kTempCycleAmplitude = 0.6;     // degrees C
constexpr double kTempCyclePeriod = 1800.0;     // seconds
constexpr double kTempPerOccupant = 0.02;       // degrees C per person
constexpr double kRhBase = 38.0;                // percent
constexpr double kRhCycleAmplitude = 5.0;       // percent
constexpr double kRhCyclePeriod = 241200.0;     // 67 h, off the daily rhythm
constexpr double kRhPerOccupant = 0.1;          // percent per person

// Schedule shape (hours unless noted).
constexpr double kArrivalMean = 8.0, kArrivalJitter = 0.45;
constexpr double kDepartMean = 17.2, kDepartJitter = 0.55;
constexpr double kLunchProb = 0.75, kLunchMean = 11.9, kLunchJitter = 0.25;
constexpr double kWeekendVisitProb = 0.12;
constexpr double kWeekendMeetingProb = 0.06;
constexpr double kMeetingGapMinutes = 10.0;

void fill_range(std::vector<int>& occupants, std::size_t day_offset,
                double start_hour, double end_hour, int count) {
  const double lo = std::max(0.0, start_hour);
  const double hi = std::min(24.0, end_hour);
  if (hi <= lo) return;
  const auto first = day_offset + static_cast<std::size_t>(lo * 60.0);
  const auto last = day_offset + static_cast<std::size_t>(hi * 60.0);
  for (std::size_t i = first; i < last && i < occupants.size(); ++i) {
    occupants[i] = count;
  }
}

void office_day(std::vector<int>& occupants, std::size_t day_offset,
                bool weekend, Rng& rng) {
  if (weekend) {
    // Mostly empty; occasionally a short visit.
    const bool visit = rng.bernoulli(kWeekendVisitProb);
    const double start = 9.0 + 7.0 * rng.uniform();
    const double dur = 0.4 + 1.6 * rng.uniform();
    if (visit) fill_range(occupants, day_offset, start, start + dur, 1);
    return;
  }
  const double arrival =
      std::clamp(kArrivalMean + kArrivalJitter * rng.gaussian(), 6.5, 10.0);
  const double depart =
      std::clamp(kDepartMean + kDepartJitter * rng.gaussian(), 15.0, 19.5);
  fill_range(occupants, day_offset, arrival, depart, 1);

  const bool lunch_out = rng.bernoulli(kLunchProb);
  const double lunch_start = kLunchMean + kLunchJitter * rng.gaussian();
  const double lunch_dur = 0.5 + 0.35 * rng.uniform();
  if (lunch_out) {
    fill_range(occupants, day_offset, lunch_start, lunch_start + lunch_dur, 0);
  }

  const std::uint64_t n_breaks = rng.poisson(1.5);
  for (std::uint64_t b = 0; b < n_breaks; ++b) {
    const double span = depart - 0.75 - (arrival + 0.5);
    const double start = arrival + 0.5 + std::max(0.0, span) * rng.uniform();
    const double dur = (5.0 + 20.0 * rng.uniform()) / 60.0;
    fill_range(occupants, day_offset, start, start + dur, 0);
  }
}

void conference_day(std::vector<int>& occupants, std::size_t day_offset,
                    bool weekend, Rng& rng) {
  std::size_t n_meetings;
  if (weekend) {
    n_meetings = rng.bernoulli(kWeekendMeetingProb) ? 1 : 0;
  } else {
    n_meetings = 6 + rng.below(4);  // 6..9 booked slots
  }
  struct Meeting {
    double start_hour;
    double minutes;
    int occupants;
  };
  std::vector<Meeting> meetings;
  meetings.reserve(n_meetings);
  for (std::size_t i = 0; i < n_meetings; ++i) {
    Meeting m;
    m.start_hour = 8.0 + 0.5 * static_cast<double>(rng.below(18));
    const double pick = rng.uniform();
    m.minutes = pick < 0.25 ? 30.0 : (pick < 0.65 ? 60.0 : 90.0);
    m.occupants = 2 + static_cast<int>(rng.below(9));  // 2..10
    meetings.push_back(m);
  }
  std::sort(meetings.begin(), meetings.end(),
            [](const Meeting& a, const Meeting& b) {
              return a.start_hour < b.start_hour;
            });
  double last_end = 0.0;  // hours
  for (const Meeting& m : meetings) {
    if (m.start_hour < last_end + kMeetingGapMinutes / 60.0) continue;
    const double end_hour = m.start_hour + m.minutes / 60.0;
    fill_range(occupants, day_offset, m.start_hour, end_hour, m.occupants);
    last_end = end_hour;
  }
}

double daylight_shape(double hour_of_day) {
  const double u = (hour_of_day - kDaylightStartHour) / kDaylightHours;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::sin(kPi * u);
}

void validate_config(const ZoneConfig& c) {
  if (c.volume <= 0.0) throw ValueError("zone volume must be positive");
  if (c.ventilation_rate <= 0.0) {
    throw ValueError("zone ventilation_rate must be positive");
  }
  if (c.bg_sensor_dilution <= 0.0 || c.bg_sensor_dilution > 1.0) {
    throw ValueError("bg_sensor_dilution must be in (0, 1]");
  }
  if (c.lights_follow_occupancy_prob < 0.0 ||
      c.lights_follow_occupancy_prob > 1.0) {
    throw ValueError("lights_follow_occupancy_prob must be in [0, 1]");
  }
  if (c.bg_sensor_lag <= 0.0) {
    throw ValueError("bg_sensor_lag must be positive");
  }
  const double sigmas[] = {c.noise.co2, c.noise.voc, c.noise.light,
                           c.noise.temp, c.noise.rh};
  for (double s : sigmas) {
    if (s < 0.0) throw ValueError("noise sigmas must be non-negative");
  }
}

}  // namespace

OccupancySchedule generate_schedule(ScheduleKind kind, int days,
                                    std::uint64_t seed) {
  if (days < 1) throw ValueError("schedule requires days >= 1");
  OccupancySchedule sched;
  sched.days = days;
  sched.step_seconds = 60;
  sched.occupants.assign(static_cast<std::size_t>(days) *
                             sched.steps_per_day(),
                         0);
  Rng rng(mix_seed(seed, kind == ScheduleKind::single_office ? 0x0F5 : 0xC0F));
  for (int day = 0; day < days; ++day) {
    const std::size_t day_offset =
        static_cast<std::size_t>(day) * sched.steps_per_day();
    const bool weekend = day % 7 >= 5;  // trace starts on a Monday
    if (kind == ScheduleKind::single_office) {
      office_day(sched.occupants, day_offset, weekend, rng);
    } else {
      conference_day(sched.occupants, day_offset, weekend, rng);
    }
  }
  return sched;
}

GasSteadyState steady_state(const ZoneConfig& config, int occupants) {
  if (occupants < 0) throw ValueError("occupant count must be >= 0");
  validate_config(config);
  const double q = config.airflow();
  const double occ = static_cast<double>(occupants);
  GasSteadyState ss;
  ss.co2 = config.outdoor_co2 + 1e6 * occ * config.co2_per_occupant / q;
  // The sorption sink adds q_sink = k * V to the effective VOC exchange.
  const double q_voc = q + config.voc_sink_rate * config.volume;
  ss.voc = config.outdoor_voc +
           occ *
               (config.voc_base_per_occupant +
                config.voc_event_rate * config.voc_event_magnitude) /
               q_voc;
  return ss;
}

std::vector<SensorSample> simulate_zone(const ZoneConfig& config,
                                        const OccupancySchedule& schedule,
                                        std::uint64_t seed) {
  validate_config(config);
  if (schedule.step_seconds <= 0 || schedule.step_seconds > 60) {
    throw ValueError("schedule step must be in (0, 60] seconds");
  }
  if (schedule.days < 1) throw ValueError("schedule requires days >= 1");
  const std::size_t n_steps =
      static_cast<std::size_t>(schedule.days) * schedule.steps_per_day();
  if (schedule.occupants.size() != n_steps) {
    throw ValueError("schedule occupant count does not match days * steps");
  }
  const double dt_h = static_cast<double>(schedule.step_seconds) / 3600.0;
  const double tau_h = 1.0 / config.ventilation_rate;  // V/Q in hours
  if (dt_h > 0.5 * tau_h) {
    throw ValueError(
        "integration step too coarse for the zone air-change rate");
  }

  Rng rng_noise(mix_seed(seed, 1));
  Rng rng_event(mix_seed(seed, 2));
  Rng rng_light(mix_seed(seed, 3));

  const double q = config.airflow();
  const double v = config.volume;
  const double dt_s = static_cast<double>(schedule.step_seconds);
  const double lag_response = 1.0 - std::exp(-dt_s / config.bg_sensor_lag);

  double co2_zone = config.outdoor_co2;
  double voc_zone = config.outdoor_voc;
  double bg_state = config.outdoor_co2;
  bool lights_on = false;
  int prev_occ = 0;
  double day_amp = 0.0;

  std::vector<SensorSample> out;
  out.reserve(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t_s = static_cast<double>(i) * dt_s;
    const double hour = std::fmod(t_s / 3600.0, 24.0);
    const int occ = schedule.occupants[i];

    // Per-day daylight amplitude (cloud cover); drawn for every zone so the
    // random streams stay aligned across channel masks.
    if (i % schedule.steps_per_day() == 0) {
      day_amp = kDaylightPeakLux * (0.55 + 0.45 * rng_light.uniform());
    }
    if (occ > 0 && prev_occ == 0) {
      lights_on = rng_light.bernoulli(config.lights_follow_occupancy_prob);
    }
    prev_occ = occ;

    // Noise draws happen for all channels in fixed order, masked afterward.
    const double n_inhale = rng_noise.gaussian() * config.noise.co2;
    const double n_bg = rng_noise.gaussian() * config.noise.co2;
    const double n_voc = rng_noise.gaussian() * config.noise.voc;
    const double n_light = rng_noise.gaussian() * config.noise.light;
    const double n_temp = rng_noise.gaussian() * config.noise.temp;
    const double n_rh = rng_noise.gaussian() * config.noise.rh;

    const double daylight =
        config.has_daylight ? day_amp * daylight_shape(hour) : 0.0;
    const double artificial =
        occ > 0 && lights_on ? kArtificialLightLux : 0.0;
    const double inhale =
        co2_zone + (occ > 0 ? config.inhale_cloud_boost : 0.0) + n_inhale;
    const double temp = config.hvac_temp_setpoint +
                        kTempCycleAmplitude *
                            std::sin(2.0 * kPi * t_s / kTempCyclePeriod) +
                        kTempPerOccupant * static_cast<double>(occ) + n_temp;
    const double rh =
        kRhBase + kRhCycleAmplitude * std::sin(2.0 * kPi * t_s / kRhCyclePeriod) +
        kRhPerOccupant * static_cast<double>(occ) + n_rh;

    SensorSample s;
    s.timestamp = schedule.start_epoch +
                  static_cast<std::int64_t>(i) * schedule.step_seconds;
    s.occupied = occ > 0 ? 1 : 0;
    if (config.channels[static_cast<std::size_t>(Channel::co2_inhale)]) {
      s.channel(Channel::co2_inhale) = std::max(0.0, inhale);
    }
    if (config.channels[static_cast<std::size_t>(Channel::co2_bg)]) {
      s.channel(Channel::co2_bg) = std::max(0.0, bg_state + n_bg);
    }
    if (config.channels[static_cast<std::size_t>(Channel::voc)]) {
      s.channel(Channel::voc) = std::max(0.0, voc_zone + n_voc);
    }
    if (config.channels[static_cast<std::size_t>(Channel::light)]) {
      s.channel(Channel::light) = std::max(0.0, daylight + artificial + n_light);
    }
    if (config.channels[static_cast<std::size_t>(Channel::temperature)]) {
      s.channel(Channel::temperature) = temp + 0.0;
    }
    if (config.channels[static_cast<std::size_t>(Channel::humidity)]) {
      s.channel(Channel::humidity) = std::clamp(rh, 0.0, 100.0);
    }
    out.push_back(std::move(s));

    // Advance the zone state from t_i to t_{i+1} (forward Euler for the
    // continuous balance; instantaneous jumps for discrete VOC events).
    const double occ_d = static_cast<double>(occ);
    co2_zone += dt_h *
                (q * (config.outdoor_co2 - co2_zone) +
                 1e6 * occ_d * config.co2_per_occupant) /
                v;
    const double ambient_voc =
        config.outdoor_voc +
        config.outdoor_voc_swing *
            std::sin(2.0 * kPi * (hour - kVocSwingPhaseHour) / 24.0);
    voc_zone += dt_h * ((q * (ambient_voc - voc_zone) +
                         occ_d * config.voc_base_per_occupant) /
                            v -
                        config.voc_sink_rate * (voc_zone - ambient_voc));
    const std::uint64_t events =
        rng_event.poisson(config.voc_event_rate * occ_d * dt_h);
    voc_zone += static_cast<double>(events) * config.voc_event_magnitude / v;
    const double bg_target =
        config.outdoor_co2 +
        config.bg_sensor_dilution * (co2_zone - config.outdoor_co2);
    bg_state += lag_response * (bg_target - bg_state);
  }
  return out;
}

namespace {

ZoneConfig zone_from_json(const nlohmann::json& j) {
  ZoneConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      c.name = value.get<std::string>();
    } else if (key == "volume") {
      c.volume = value.get<double>();
    } else if (key == "ventilation_rate") {
      c.ventilation_rate = value.get<double>();
    } else if (key == "outdoor_co2") {
      c.outdoor_co2 = value.get<double>();
    } else if (key == "outdoor_voc") {
      c.outdoor_voc = value.get<double>();
    } else if (key == "outdoor_voc_swing") {
      c.outdoor_voc_swing = value.get<double>();
    } else if (key == "co2_per_occupant") {
      c.co2_per_occupant = value.get<double>();
    } else if (key == "voc_base_per_occupant") {
      c.voc_base_per_occupant = value.get<double>();
    } else if (key == "voc_event_rate") {
      c.voc_event_rate = value.get<double>();
    } else if (key == "voc_event_magnitude") {
      c.voc_event_magnitude = value.get<double>();
    } else if (key == "voc_sink_rate") {
      c.voc_sink_rate = value.get<double>();
    } else if (key == "has_daylight") {
      c.has_daylight = value.get<bool>();
    } else if (key == "lights_follow_occupancy_prob") {
      c.lights_follow_occupancy_prob = value.get<double>();
    } else if (key == "bg_sensor_lag") {
      c.bg_sensor_lag = value.get<double>();
    } else if (key == "bg_sensor_dilution") {
      c.bg_sensor_dilution = value.get<double>();
    } else if (key == "inhale_cloud_boost") {
      c.inhale_cloud_boost = value.get<double>();
    } else if (key == "hvac_temp_setpoint") {
      c.hvac_temp_setpoint = value.get<double>();
    } else if (key == "noise") {
      for (const auto& [nk, nv] : value.items()) {
        if (nk == "co2") {
          c.noise.co2 = nv.get<double>();
        } else if (nk == "voc") {
          c.noise.voc = nv.get<double>();
        } else if (nk == "light") {
          c.noise.light = nv.get<double>();
        } else if (nk == "temp") {
          c.noise.temp = nv.get<double>();
        } else if (nk == "rh") {
          c.noise.rh = nv.get<double>();
        } else {
          throw ValueError("unknown noise key: " + nk);
        }
      }
    } else if (key == "channels") {
      c.channels.fill(false);
      for (const auto& name : value) {
        const auto ch = channel_from_name(name.get<std::string>());
        if (!ch) {
          throw ValueError("unknown channel: " + name.get<std::string>());
        }
        c.channels[static_cast<std::size_t>(*ch)] = true;
      }
    } else if (key == "schedule_kind") {
      // handled by the caller
    } else {
      throw ValueError("unknown zone config key: " + key);
    }
  }
  return c;
}

ScheduleKind schedule_kind_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("schedule_kind", "single_office");
  if (kind == "single_office") return ScheduleKind::single_office;
  if (kind == "conference") return ScheduleKind::conference;
  throw ValueError("unknown schedule_kind: " + kind);
}

}  // namespace

std::vector<ZoneScenario> make_paper_zones(int days, std::uint64_t seed) {
  if (days < 1) throw ValueError("preset requires days >= 1");
  std::vector<ZoneScenario> zones(3);

  ZoneConfig& a = zones[0].config;
  a.name = "office_a";
  a.volume = 35.0;
  a.ventilation_rate = 1.2;
  a.outdoor_co2 = 420.0;
  a.outdoor_voc = 30.0;
  a.co2_per_occupant = 0.015;
  a.voc_base_per_occupant = 4000.0;
  a.voc_event_rate = 0.7;
  a.voc_event_magnitude = 2000.0;
  a.has_daylight = true;
  a.lights_follow_occupancy_prob = 0.9;
  a.bg_sensor_lag = 1800.0;
  a.bg_sensor_dilution = 0.5;
  a.inhale_cloud_boost = 150.0;
  a.hvac_temp_setpoint = 21.5;

  ZoneConfig& b = zones[1].config;
  b = a;
  b.name = "office_b";
  b.outdoor_voc = 40.0;
  b.voc_base_per_occupant = 150.0;
  b.voc_event_rate = 0.1;
  b.voc_event_magnitude = 400.0;
  b.lights_follow_occupancy_prob = 0.85;
  b.hvac_temp_setpoint = 22.0;
  b.channels[static_cast<std::size_t>(Channel::light)] = false;

  // Interior conference room on recirculated supply air: elevated ambient
  // CO2/VOC baselines, larger volume, shorter and sparser occupancy bursts.
  ZoneConfig& c = zones[2].config;
  c.name = "conference";
  c.volume = 90.0;
  c.ventilation_rate = 2.5;
  c.outdoor_co2 = 520.0;
  c.outdoor_voc = 120.0;
  c.outdoor_voc_swing = 48.0;
  c.co2_per_occupant = 0.015;
  c.voc_base_per_occupant = 400.0;
  c.voc_event_rate = 1.0;
  c.voc_event_magnitude = 2300.0;
  c.voc_sink_rate = 1.5;
  c.has_daylight = false;
  c.lights_follow_occupancy_prob = 1.0;
  c.bg_sensor_lag = 1500.0;
  c.bg_sensor_dilution = 0.5;
  c.inhale_cloud_boost = 150.0;
  c.hvac_temp_setpoint = 21.0;
  c.channels[static_cast<std::size_t>(Channel::co2_inhale)] = false;

  const ScheduleKind kinds[] = {ScheduleKind::single_office,
                                ScheduleKind::single_office,
                                ScheduleKind::conference};
  for (std::size_t i = 0; i < zones.size(); ++i) {
    zones[i].schedule = generate_schedule(kinds[i], days, mix_seed(seed, i));
    zones[i].sim_seed = mix_seed(seed, 10 + i);
  }
  return zones;
}

std::vector<ZoneScenario> parse_scenarios(const std::string& json_text,
                                          int days, std::uint64_t seed) {
  if (days < 1) throw ValueError("scenario requires days >= 1");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("invalid scenario json: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("zones") ||
        !doc["zones"].is_array() || doc["zones"].empty()) {
      throw ValueError("scenario json requires a non-empty \"zones\" array");
    }
    std::vector<ZoneScenario> zones;
    std::size_t index = 0;
    for (const auto& jz : doc["zones"]) {
      ZoneScenario z;
      z.config = zone_from_json(jz);
      if (z.config.name.empty()) {
        throw ValueError("every zone needs a non-empty name");
      }
      validate_config(z.config);
      z.schedule =
          generate_schedule(schedule_kind_from_json(jz), days,
                            mix_seed(seed, index));
      z.sim_seed = mix_seed(seed, 10 + index);
      ++index;
      zones.push_back(std::move(z));
    }
    return zones;
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("invalid scenario json: ") + e.what());
  }
}

}  // namespace occdet
