#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evcs/matrix.hpp"

namespace evcs {

enum class ChargerClass { Level2, Dcfc, Custom };

/// Preset per-charger service rates (vehicles/day).
inline constexpr double kLevel2ServiceRate = 6.0;  // 4 h per vehicle
inline constexpr double kDcfcServiceRate = 48.0;   // 0.5 h per vehicle

std::string_view to_string(ChargerClass c) noexcept;
ChargerClass charger_class_from_string(std::string_view s);  // "LEVEL2" | "DCFC" | "CUSTOM"
std::optional<double> preset_service_rate(ChargerClass c) noexcept;

enum class DistanceMode { Euclidean, Haversine, Matrix };
std::string_view to_string(DistanceMode m) noexcept;

enum class TravelProvenance { External, Euclidean, Haversine };

struct DemandNode {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  std::int64_t ev_count = 0;
  double arrival_rate = 0.0;  // lambda_i, vehicles/day

  bool operator==(const DemandNode&) const = default;
};

struct Station {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  int chargers = 1;            // k_j
  double service_rate = kLevel2ServiceRate;  // mu_j, vehicles/day per charger
  ChargerClass charger_class = ChargerClass::Level2;

  double service_time() const noexcept { return 1.0 / service_rate; }
  double capacity() const noexcept { return service_rate * chargers; }

  bool operator==(const Station&) const = default;
};

struct TravelTimeMatrix {
  Matrix values;  // days, |nodes| x |stations|
  TravelProvenance provenance = TravelProvenance::External;

  bool operator==(const TravelTimeMatrix&) const = default;
};

/// How the instance was described on disk; carried along so it can be
/// written back out unchanged.
struct NetworkSettings {
  DistanceMode distance_mode = DistanceMode::Matrix;
  std::optional<double> speed;  // length units per day
  double charge_factor = 1.0;   // charges/day per EV, used when arrival_rate is absent

  bool operator==(const NetworkSettings&) const = default;
};

/// Immutable, validated problem instance.
class Network {
 public:
  /// Validates every invariant; throws Error(InvalidInput) naming the field.
  Network(std::vector<DemandNode> nodes, std::vector<Station> stations, TravelTimeMatrix travel,
          NetworkSettings settings = {});

  const std::vector<DemandNode>& nodes() const noexcept { return nodes_; }
  const std::vector<Station>& stations() const noexcept { return stations_; }
  const TravelTimeMatrix& travel() const noexcept { return travel_; }
  const NetworkSettings& settings() const noexcept { return settings_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t station_count() const noexcept { return stations_.size(); }

  std::vector<double> arrival_rates() const;
  double total_demand() const;
  double total_capacity() const;
  std::optional<std::size_t> station_index(std::string_view id) const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<DemandNode> nodes_;
  std::vector<Station> stations_;
  TravelTimeMatrix travel_;
  NetworkSettings settings_;
};

/// d_ij = straight-line distance / speed. Throws on speed <= 0.
TravelTimeMatrix euclidean_travel_times(const std::vector<DemandNode>& nodes,
                                        const std::vector<Station>& stations, double speed);

/// Great-circle distance in km with x = longitude, y = latitude (degrees),
/// divided by speed in km/day.
TravelTimeMatrix haversine_travel_times(const std::vector<DemandNode>& nodes,
                                        const std::vector<Station>& stations, double speed);

/// New network with arrival_rate_i = ev_count_i * factor. Everything else is
/// copied unchanged.
Network scale_demand(const Network& network, double factor);

/// Parses the network JSON document. Relative CSV matrix paths resolve
/// against `base_dir`. Non-fatal issues are appended to `warnings`.
Network network_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {},
                          std::vector<std::string>* warnings = nullptr);
nlohmann::json network_to_json(const Network& network);

Network load_network(const std::filesystem::path& path,
                     std::vector<std::string>* warnings = nullptr);
void save_network(const Network& network, const std::filesystem::path& path);

/// Reads a travel-time CSV: header row of station ids, first column node ids.
/// Rows and columns are matched by id and returned in network order.
TravelTimeMatrix load_travel_matrix_csv(const std::filesystem::path& path,
                                        const std::vector<DemandNode>& nodes,
                                        const std::vector<Station>& stations);

}  // namespace evcs
