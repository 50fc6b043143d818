#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluenn/arch.hpp"
#include "gluenn/common.hpp"

namespace gluenn {

using ordered_json = nlohmann::ordered_json;

inline std::string transform_name(InputTransform t) {
  switch (t) {
    case InputTransform::identity: return "identity";
    case InputTransform::scaled: return "scaled";
    case InputTransform::log_scaled: return "log_scaled";
  }
  return "identity";
}

inline InputTransform transform_from_name(const std::string& name, const std::string& path) {
  if (name == "identity") return InputTransform::identity;
  if (name == "scaled") return InputTransform::scaled;
  if (name == "log_scaled") return InputTransform::log_scaled;
  throw ConfigError(path, "unknown input transform '" + name + "'");
}

inline ordered_json arch_to_json(const ArchSpec& arch) {
  ordered_json j;
  j["input_transform"] = transform_name(arch.input_transform);
  j["x_ref"] = arch.x_ref;
  j["head_hidden"] = arch.head_hidden;
  j["head_output"] = arch.head_output;
  ordered_json trunks = ordered_json::array();
  for (const auto& t : arch.trunks) {
    ordered_json jt;
    jt["label"] = t.label;
    jt["hidden"] = t.hidden;
    trunks.push_back(jt);
  }
  j["trunks"] = trunks;
  j["activation"] = "tanh";
  return j;
}

inline ArchSpec arch_from_json(const ordered_json& j, const std::string& path) {
  ArchSpec arch;
  arch.input_transform = transform_from_name(j.at("input_transform").get<std::string>(),
                                             path + ".input_transform");
  arch.x_ref = j.at("x_ref").get<double>();
  arch.head_hidden = j.at("head_hidden").get<std::vector<int>>();
  arch.head_output = j.at("head_output").get<int>();
  for (const auto& jt : j.at("trunks")) {
    TrunkSpec t;
    t.label = jt.at("label").get<std::string>();
    t.hidden = jt.at("hidden").get<std::vector<int>>();
    arch.trunks.push_back(std::move(t));
  }
  return arch;
}

// JSON numbers are emitted in shortest-round-trip form, so 64-bit values
// survive save/load bit-exactly.
inline void save_checkpoint(const std::filesystem::path& file, const ArchSpec& arch,
                            const NetworkParams& params) {
  ordered_json j;
  j["format_version"] = 1;
  j["arch"] = arch_to_json(arch);
  ordered_json flat = ordered_json::array();
  for (double p : params.flat) flat.push_back(p);
  j["params"] = flat;
  std::ofstream out(file);
  if (!out) throw Error("cannot write checkpoint " + file.string());
  out << j.dump(1) << "\n";
}

inline std::pair<ArchSpec, NetworkParams> load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read checkpoint " + file.string());
  ordered_json j = ordered_json::parse(in);
  if (j.at("format_version").get<int>() != 1)
    throw Error("unsupported checkpoint version in " + file.string());
  ArchSpec arch = arch_from_json(j.at("arch"), "arch");
  NetworkParams params;
  for (const auto& p : j.at("params")) params.flat.push_back(p.get<double>());
  const auto layout = make_layout(arch);
  if (params.size() != layout.total)
    throw Error("checkpoint parameter count does not match its arch");
  return {arch, params};
}

inline void write_text_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << content;
}

inline void write_json_file(const std::filesystem::path& file, const ordered_json& j) {
  write_text_file(file, j.dump(1) + "\n");
}

inline std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gluenn
