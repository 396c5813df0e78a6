#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

// Per-channel Gaussian measurement noise (standard deviations).
struct NoiseSigmas {
  double co2 = 15.0;   // ppm
  double voc = 10.0;   // ppb
  double light = 20.0; // lux
  double temp = 0.2;   // degrees C
  double rh = 1.0;     // percent
};

// Well-mixed single-zone model parameters.
struct ZoneConfig {
  std::string name;
  double volume = 30.0;            // m^3
  double ventilation_rate = 1.0;   // air changes per hour; Q = rate * volume
  double outdoor_co2 = 420.0;      // ppm
  double outdoor_voc = 30.0;       // ppb
  // Diurnal sinusoid on the supply-air VOC (ppb amplitude, peak in the early
  // morning hours). Models VOC accumulating in recirculated supply air while
  // outdoor-air dampers are on night setback.
  double outdoor_voc_swing = 0.0;
  double co2_per_occupant = 0.018; // m^3/h of CO2 exhaled per occupant
  double voc_base_per_occupant = 0.0;  // ppb*m^3 per hour, continuous
  double voc_event_rate = 0.0;         // events per occupant-hour
  double voc_event_magnitude = 0.0;    // ppb*m^3 released per event
  // First-order surface-sorption sink acting on VOC excess above the supply
  // concentration (1/h). VOC then clears faster than the ventilation time
  // constant alone, while CO2 is unaffected.
  double voc_sink_rate = 0.0;
  bool has_daylight = true;
  double lights_follow_occupancy_prob = 1.0;
  double bg_sensor_lag = 900.0;     // seconds (first-order time constant)
  double bg_sensor_dilution = 0.6;  // fraction of zone excess seen, (0,1]
  double inhale_cloud_boost = 150.0;  // ppm added while occupied
  double hvac_temp_setpoint = 21.5;   // degrees C
  NoiseSigmas noise;
  // Channels the zone's sensor package actually reports; the rest are absent
  // in the emitted samples (drives the "-" cells of the results table).
  std::array<bool, kNumChannels> channels{true, true, true,
                                          true, true, true};

  double airflow() const { return ventilation_rate * volume; }  // m^3/h
};

enum class ScheduleKind { single_office, conference };

struct OccupancySchedule {
  int days = 0;
  int step_seconds = 60;
  std::int64_t start_epoch = 1578873600;  // 2020-01-13T00:00:00Z, a Monday
  std::vector<int> occupants;             // one count per step

  std::size_t steps_per_day() const {
    return static_cast<std::size_t>(86400 / step_seconds);
  }
};

// Draws a stochastic but seed-deterministic occupancy trace. Offices get 0/1
// counts with jittered arrival/departure, lunch gaps, and short absences;
// conference rooms get non-overlapping meeting blocks of 2-10 people.
// Weekends are mostly empty for both kinds.
OccupancySchedule generate_schedule(ScheduleKind kind, int days,
                                    std::uint64_t seed);

// Expected steady concentrations under constant occupancy (test oracle).
struct GasSteadyState {
  double co2 = 0.0;  // ppm, zone concentration
  double voc = 0.0;  // ppb
};
GasSteadyState steady_state(const ZoneConfig& config, int occupants);

// Forward-Euler integration of the zone mass balance at the schedule step,
// with sensor models layered on top. Throws ValueError when the step exceeds
// 60 s or is too coarse for the zone's air-change rate.
std::vector<SensorSample> simulate_zone(const ZoneConfig& config,
                                        const OccupancySchedule& schedule,
                                        std::uint64_t seed);

// One zone of a simulation scenario: the physical configuration, its
// occupancy trace, and the seed for the sensor-level randomness.
struct ZoneScenario {
  ZoneConfig config;
  OccupancySchedule schedule;
  std::uint64_t sim_seed = 0;
};

// The three reference zones: office_a (strong VOC emitter, daylight, both
// CO2 sensors), office_b (weak VOC emitter, no light channel), conference
// (no daylight, lights always follow occupancy, background CO2 only).
std::vector<ZoneScenario> make_paper_zones(int days, std::uint64_t seed);

// Parses scenario descriptions from a JSON document:
//   {"zones": [{"name": ..., "volume": ..., ..., "channels": [...],
//               "schedule_kind": "single_office"|"conference"}, ...]}
// Keys mirror the ZoneConfig field names; omitted keys keep defaults.
std::vector<ZoneScenario> parse_scenarios(const std::string& json_text,
                                          int days, std::uint64_t seed);

}  // namespace occdet
