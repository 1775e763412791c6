#include "evcs/network.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "evcs/error.hpp"

namespace evcs {

using nlohmann::json;

std::string_view to_string(ChargerClass c) noexcept {
  switch (c) {
    case ChargerClass::Level2: return "LEVEL2";
    case ChargerClass::Dcfc: return "DCFC";
    case ChargerClass::Custom: return "CUSTOM";
  }
  return "CUSTOM";
}

ChargerClass charger_class_from_string(std::string_view s) {
  if (s == "LEVEL2") return ChargerClass::Level2;
  if (s == "DCFC") return ChargerClass::Dcfc;
  if (s == "CUSTOM") return ChargerClass::Custom;
  fail(ErrorKind::InvalidInput, fmt::format("unknown charger_class '{}'", s));
}

std::optional<double> preset_service_rate(ChargerClass c) noexcept {
  switch (c) {
    case ChargerClass::Level2: return kLevel2ServiceRate;
    case ChargerClass::Dcfc: return kDcfcServiceRate;
    case ChargerClass::Custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(DistanceMode m) noexcept {
  switch (m) {
    case DistanceMode::Euclidean: return "euclidean";
    case DistanceMode::Haversine: return "haversine";
    case DistanceMode::Matrix: return "matrix";
  }
  return "matrix";
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::InvalidInput, fmt::format("{}: {}", path, what));
}

void check_unique(const std::vector<std::string>& ids, std::string_view kind) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      fail(ErrorKind::InvalidInput, fmt::format("duplicate id '{}' in {}", id, kind));
    }
  }
}

}  // namespace

Network::Network(std::vector<DemandNode> nodes, std::vector<Station> stations,
                 TravelTimeMatrix travel, NetworkSettings settings)
    : nodes_(std::move(nodes)),
      stations_(std::move(stations)),
      travel_(std::move(travel)),
      settings_(settings) {
  if (nodes_.empty()) fail(ErrorKind::InvalidInput, "nodes: at least one demand node required");
  if (stations_.empty()) fail(ErrorKind::InvalidInput, "stations: at least one station required");

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.ev_count < 0) schema_error(fmt::format("nodes[{}].ev_count", i), "must be >= 0");
    if (!(n.arrival_rate >= 0.0) || !std::isfinite(n.arrival_rate)) {
      schema_error(fmt::format("nodes[{}].arrival_rate", i), "must be finite and >= 0");
    }
    ids.push_back(n.id);
  }
  check_unique(ids, "nodes");
  ids.clear();
  for (std::size_t j = 0; j < stations_.size(); ++j) {
    const auto& s = stations_[j];
    if (s.chargers < 1) schema_error(fmt::format("stations[{}].chargers", j), "must be >= 1");
    if (!(s.service_rate > 0.0) || !std::isfinite(s.service_rate)) {
      schema_error(fmt::format("stations[{}].service_rate", j), "must be finite and > 0");
    }
    ids.push_back(s.id);
  }
  check_unique(ids, "stations");

  const auto& m = travel_.values;
  if (m.rows() != nodes_.size() || m.cols() != stations_.size()) {
    fail(ErrorKind::InvalidInput,
         fmt::format("matrix shape: travel matrix is {}x{} but network has {} nodes and {} "
                     "stations",
                     m.rows(), m.cols(), nodes_.size(), stations_.size()));
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) {
        schema_error(fmt::format("travel_matrix[{}][{}]", i, j), "must be finite and >= 0");
      }
    }
  }
  if (!(total_capacity() > 0.0)) fail(ErrorKind::InvalidInput, "total station capacity is zero");
}

std::vector<double> Network::arrival_rates() const {
  std::vector<double> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.arrival_rate);
  return out;
}

double Network::total_demand() const {
  double sum = 0.0;
  for (const auto& n : nodes_) sum += n.arrival_rate;
  return sum;
}

double Network::total_capacity() const {
  double sum = 0.0;
  for (const auto& s : stations_) sum += s.capacity();
  return sum;
}

std::optional<std::size_t> Network::station_index(std::string_view id) const {
  for (std::size_t j = 0; j < stations_.size(); ++j) {
    if (stations_[j].id == id) return j;
  }
  return std::nullopt;
}

TravelTimeMatrix euclidean_travel_times(const std::vector<DemandNode>& nodes,
                                        const std::vector<Station>& stations, double speed) {
  if (!(speed > 0.0)) fail(ErrorKind::InvalidInput, "speed must be positive");
  TravelTimeMatrix out{Matrix(nodes.size(), stations.size()), TravelProvenance::Euclidean};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < stations.size(); ++j) {
      out.values(i, j) =
          std::hypot(nodes[i].x - stations[j].x, nodes[i].y - stations[j].y) / speed;
    }
  }
  return out;
}

TravelTimeMatrix haversine_travel_times(const std::vector<DemandNode>& nodes,
                                        const std::vector<Station>& stations, double speed) {
  if (!(speed > 0.0)) fail(ErrorKind::InvalidInput, "speed must be positive");
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kDeg = std::numbers::pi / 180.0;
  TravelTimeMatrix out{Matrix(nodes.size(), stations.size()), TravelProvenance::Haversine};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < stations.size(); ++j) {
      const double lat1 = nodes[i].y * kDeg;
      const double lat2 = stations[j].y * kDeg;
      const double dlat = lat2 - lat1;
      const double dlon = (stations[j].x - nodes[i].x) * kDeg;
      const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                       std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
      const double km = 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
      out.values(i, j) = km / speed;
    }
  }
  return out;
}

Network scale_demand(const Network& network, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    fail(ErrorKind::InvalidInput, "demand factor must be finite and >= 0");
  }
  auto nodes = network.nodes();
  for (auto& n : nodes) n.arrival_rate = static_cast<double>(n.ev_count) * factor;
  auto settings = network.settings();
  settings.charge_factor = factor;
  return Network(std::move(nodes), network.stations(), network.travel(), settings);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "required field missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(path, "expected a finite number");
  return d;
}

std::int64_t as_integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  schema_error(path, "expected an integer");
}

std::string as_id(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  schema_error(path, "expected a string id");
}

}  // namespace

Network network_from_json(const json& doc, const std::filesystem::path& base_dir,
                          std::vector<std::string>* warnings) {
  if (!doc.is_object()) schema_error("$", "expected a JSON object");
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  NetworkSettings settings;
  if (auto it = doc.find("distance_mode"); it != doc.end()) {
    if (!it->is_string()) schema_error("$.distance_mode", "expected a string");
    const auto mode = it->get<std::string>();
    if (mode == "euclidean") {
      settings.distance_mode = DistanceMode::Euclidean;
    } else if (mode == "haversine") {
      settings.distance_mode = DistanceMode::Haversine;
    } else if (mode == "matrix") {
      settings.distance_mode = DistanceMode::Matrix;
    } else {
      schema_error("$.distance_mode", "must be euclidean, haversine or matrix");
    }
  } else {
    settings.distance_mode = DistanceMode::Euclidean;
  }
  if (auto it = doc.find("speed"); it != doc.end()) {
    settings.speed = as_number(*it, "$.speed");
    if (!(*settings.speed > 0.0)) schema_error("$.speed", "must be positive");
  }
  if (auto it = doc.find("charge_factor"); it != doc.end()) {
    settings.charge_factor = as_number(*it, "$.charge_factor");
    if (settings.charge_factor < 0.0) schema_error("$.charge_factor", "must be >= 0");
  }

  const json& jnodes = require(doc, "nodes", "$");
  if (!jnodes.is_array()) schema_error("$.nodes", "expected an array");
  std::vector<DemandNode> nodes;
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const auto path = fmt::format("$.nodes[{}]", i);
    const json& jn = jnodes[i];
    if (!jn.is_object()) schema_error(path, "expected an object");
    DemandNode n;
    n.id = as_id(require(jn, "id", path), path + ".id");
    n.x = as_number(require(jn, "x", path), path + ".x");
    n.y = as_number(require(jn, "y", path), path + ".y");
    if (auto it = jn.find("ev_count"); it != jn.end()) {
      n.ev_count = as_integer(*it, path + ".ev_count");
      if (n.ev_count < 0) schema_error(path + ".ev_count", "must be >= 0");
    }
    auto rate = jn.find("arrival_rate");
    if (rate != jn.end()) {
      n.arrival_rate = as_number(*rate, path + ".arrival_rate");
      if (n.arrival_rate < 0.0) schema_error(path + ".arrival_rate", "must be >= 0");
      if (jn.contains("ev_count") &&
          n.arrival_rate != static_cast<double>(n.ev_count) * settings.charge_factor) {
        warn(fmt::format("{}: arrival_rate disagrees with ev_count x charge_factor; using "
                         "arrival_rate",
                         path));
      }
    } else {
      if (!jn.contains("ev_count")) {
        schema_error(path, "one of arrival_rate or ev_count is required");
      }
      n.arrival_rate = static_cast<double>(n.ev_count) * settings.charge_factor;
    }
    nodes.push_back(std::move(n));
  }

  const json& jstations = require(doc, "stations", "$");
  if (!jstations.is_array()) schema_error("$.stations", "expected an array");
  std::vector<Station> stations;
  for (std::size_t j = 0; j < jstations.size(); ++j) {
    const auto path = fmt::format("$.stations[{}]", j);
    const json& js = jstations[j];
    if (!js.is_object()) schema_error(path, "expected an object");
    Station s;
    s.id = as_id(require(js, "id", path), path + ".id");
    s.x = as_number(require(js, "x", path), path + ".x");
    s.y = as_number(require(js, "y", path), path + ".y");
    const auto chargers = as_integer(require(js, "chargers", path), path + ".chargers");
    if (chargers < 1 || chargers > 1'000'000) schema_error(path + ".chargers", "must be >= 1");
    s.chargers = static_cast<int>(chargers);
    if (auto it = js.find("charger_class"); it != js.end()) {
      if (!it->is_string()) schema_error(path + ".charger_class", "expected a string");
      try {
        s.charger_class = charger_class_from_string(it->get<std::string>());
      } catch (const Error& e) {
        schema_error(path + ".charger_class", e.what());
      }
    } else {
      s.charger_class = ChargerClass::Level2;
    }
    if (auto it = js.find("service_rate"); it != js.end()) {
      s.service_rate = as_number(*it, path + ".service_rate");
      if (!(s.service_rate > 0.0)) schema_error(path + ".service_rate", "must be > 0");
    } else if (auto preset = preset_service_rate(s.charger_class)) {
      s.service_rate = *preset;
    } else {
      schema_error(path + ".service_rate", "required for CUSTOM chargers");
    }
    stations.push_back(std::move(s));
  }

  TravelTimeMatrix travel;
  if (auto it = doc.find("travel_matrix"); it != doc.end()) {
    if (!it->is_array()) schema_error("$.travel_matrix", "expected an array of rows");
    const std::size_t rows = it->size();
    const std::size_t cols = rows > 0 && (*it)[0].is_array() ? (*it)[0].size() : 0;
    if (rows != nodes.size() || cols != stations.size()) {
      fail(ErrorKind::InvalidInput,
           fmt::format("matrix shape: travel_matrix is {}x{} but network has {} nodes and {} "
                       "stations",
                       rows, cols, nodes.size(), stations.size()));
    }
    travel.values = Matrix(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const json& row = (*it)[i];
      if (!row.is_array() || row.size() != cols) {
        fail(ErrorKind::InvalidInput,
             fmt::format("matrix shape: travel_matrix row {} has wrong length", i));
      }
      for (std::size_t j = 0; j < cols; ++j) {
        travel.values(i, j) = as_number(row[j], fmt::format("$.travel_matrix[{}][{}]", i, j));
      }
    }
    travel.provenance = TravelProvenance::External;
  } else if (auto csv = doc.find("travel_matrix_csv"); csv != doc.end()) {
    if (!csv->is_string()) schema_error("$.travel_matrix_csv", "expected a file path");
    std::filesystem::path p = csv->get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    travel = load_travel_matrix_csv(p, nodes, stations);
  } else {
    switch (settings.distance_mode) {
      case DistanceMode::Matrix:
        schema_error("$.travel_matrix", "required when distance_mode is matrix");
      case DistanceMode::Euclidean:
        if (!settings.speed) schema_error("$.speed", "required unless distance_mode is matrix");
        travel = euclidean_travel_times(nodes, stations, *settings.speed);
        break;
      case DistanceMode::Haversine:
        if (!settings.speed) schema_error("$.speed", "required unless distance_mode is matrix");
        travel = haversine_travel_times(nodes, stations, *settings.speed);
        break;
    }
  }

  return Network(std::move(nodes), std::move(stations), std::move(travel), settings);
}

json network_to_json(const Network& network) {
  const auto& settings = network.settings();
  json doc;
  doc["distance_mode"] = std::string(to_string(settings.distance_mode));
  if (settings.speed) doc["speed"] = *settings.speed;
  doc["charge_factor"] = settings.charge_factor;

  json nodes = json::array();
  for (const auto& n : network.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"x", n.x},
                     {"y", n.y},
                     {"ev_count", n.ev_count},
                     {"arrival_rate", n.arrival_rate}});
  }
  doc["nodes"] = std::move(nodes);

  json stations = json::array();
  for (const auto& s : network.stations()) {
    stations.push_back({{"id", s.id},
                        {"x", s.x},
                        {"y", s.y},
                        {"chargers", s.chargers},
                        {"charger_class", std::string(to_string(s.charger_class))},
                        {"service_rate", s.service_rate}});
  }
  doc["stations"] = std::move(stations);

  // Computed matrices are rebuilt from coordinates on load.
  if (network.travel().provenance == TravelProvenance::External) {
    const auto& m = network.travel().values;
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      rows.push_back(json(std::vector<double>(r.begin(), r.end())));
    }
    doc["travel_matrix"] = std::move(rows);
  }
  return doc;
}

Network load_network(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, fmt::format("cannot open network file '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidInput, fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return network_from_json(doc, path.parent_path(), warnings);
}

void save_network(const Network& network, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", path.string()));
  out << network_to_json(network).dump(2) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
      cell = cell.substr(1, cell.size() - 2);
    }
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

TravelTimeMatrix load_travel_matrix_csv(const std::filesystem::path& path,
                                        const std::vector<DemandNode>& nodes,
                                        const std::vector<Station>& stations) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, fmt::format("cannot open matrix CSV '{}'", path.string()));

  std::unordered_map<std::string, std::size_t> node_index;
  std::unordered_map<std::string, std::size_t> station_index;
  for (std::size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i].id] = i;
  for (std::size_t j = 0; j < stations.size(); ++j) station_index[stations[j].id] = j;

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::InvalidInput, "matrix CSV: missing header row");
  const auto header = split_csv_line(line);
  if (header.size() != stations.size() + 1) {
    fail(ErrorKind::InvalidInput,
         fmt::format("matrix shape: CSV has {} station columns, network has {} stations",
                     header.size() - 1, stations.size()));
  }
  std::vector<std::size_t> column_of(stations.size());
  for (std::size_t c = 1; c < header.size(); ++c) {
    auto it = station_index.find(header[c]);
    if (it == station_index.end()) {
      fail(ErrorKind::InvalidInput, fmt::format("matrix CSV: unknown station id '{}'", header[c]));
    }
    column_of[c - 1] = it->second;
  }

  TravelTimeMatrix out{Matrix(nodes.size(), stations.size()), TravelProvenance::External};
  std::vector<bool> row_seen(nodes.size(), false);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::InvalidInput, fmt::format("matrix shape: CSV row {} has {} cells, expected {}",
                                                rows + 1, cells.size(), header.size()));
    }
    auto it = node_index.find(cells[0]);
    if (it == node_index.end()) {
      fail(ErrorKind::InvalidInput, fmt::format("matrix CSV: unknown node id '{}'", cells[0]));
    }
    if (row_seen[it->second]) {
      fail(ErrorKind::InvalidInput, fmt::format("matrix CSV: duplicate id '{}'", cells[0]));
    }
    row_seen[it->second] = true;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
        out.values(it->second, column_of[c - 1]) = v;
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidInput,
             fmt::format("matrix CSV: row '{}' column {} is not a number", cells[0], c));
      }
    }
    ++rows;
  }
  if (rows != nodes.size()) {
    fail(ErrorKind::InvalidInput,
         fmt::format("matrix shape: CSV has {} node rows, network has {} nodes", rows, nodes.size()));
  }
  return out;
}

}  // namespace evcs
