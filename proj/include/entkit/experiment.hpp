#ifndef ENTKIT_EXPERIMENT_HPP
#define ENTKIT_EXPERIMENT_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace entkit {

inline constexpr int kSchemaVersion = 1;

using RecordValue = std::variant<std::int64_t, double, bool, std::string>;

/// One experiment run: inputs, tolerances in force and outputs. Maps keep
/// keys sorted so serialization is deterministic; runtime_ms is only emitted
/// when timing was requested (it would break byte-for-byte reproducibility).
struct ExperimentRecord {
  std::string experiment;
  std::map<std::string, RecordValue> params;
  std::map<std::string, RecordValue> tolerances;
  std::map<std::string, RecordValue> outputs;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> runtime_ms;
};

namespace detail {

inline nlohmann::ordered_json to_json_value(const RecordValue& v) {
  return std::visit([](const auto& x) { return nlohmann::ordered_json(x); }, v);
}

inline nlohmann::ordered_json to_json_map(const std::map<std::string, RecordValue>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m) j[k] = to_json_value(v);
  return j;
}

}  // namespace detail

inline std::string to_jsonl_line(const ExperimentRecord& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["params"] = detail::to_json_map(r.params);
  j["tolerances"] = detail::to_json_map(r.tolerances);
  j["outputs"] = detail::to_json_map(r.outputs);
  if (r.runtime_ms) j["runtime_ms"] = *r.runtime_ms;
  return j.dump();
}

inline void append_records(const std::string& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("append_records: cannot open " + path);
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

/// RFC-4180-style CSV: quotes fields containing separators or quotes,
/// '.' decimal separator comes from the C locale-independent json dump.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string record_value_string(const RecordValue& v) {
  return std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) return x;
        else return nlohmann::ordered_json(x).dump();
      },
      v);
}

/// Writes table_<experiment>.csv with one row per record. Column order is
/// fixed by the caller so tables stay diff-friendly across runs.
inline void write_table(const std::string& path, const std::vector<std::string>& columns,
                        const std::vector<std::map<std::string, RecordValue>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_table: cannot open " + path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << csv_escape(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out << (i ? "," : "");
      auto it = row.find(columns[i]);
      if (it != row.end()) out << csv_escape(record_value_string(it->second));
    }
    out << '\n';
  }
}

}  // namespace entkit

#endif  // ENTKIT_EXPERIMENT_HPP
