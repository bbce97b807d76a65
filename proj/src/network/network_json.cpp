#include "gdlab/network/network_json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gdlab/calculus/activations.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::network {

using nlohmann::json;

namespace {

std::pair<int, int> read_dims(const json& layer) {
  if (!layer.contains("dims") || !layer["dims"].is_array() || layer["dims"].size() != 2) {
    throw ValidationError("layer needs \"dims\": [a, b]");
  }
  return {layer["dims"][0].get<int>(), layer["dims"][1].get<int>()};
}

calculus::PiecewiseFn read_activation(const json& layer) {
  if (!layer.contains("activation")) return calculus::identity_fn();
  return calculus::activation_from_name(layer["activation"].get<std::string>());
}

}  // namespace

NetworkSpec network_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw ValidationError("network document needs a \"layers\" array");
  }
  std::vector<LayerSpec> layers;
  try {
    for (const auto& l : doc["layers"]) {
      const std::string kind = l.at("kind").get<std::string>();
      const auto [a, b] = read_dims(l);
      if (kind == "dense") {
        layers.emplace_back(DenseLayer{a, b, read_activation(l)});
      } else if (kind == "tied") {
        if (!l.contains("tie_pattern")) throw ValidationError("tied layer needs \"tie_pattern\"");
        std::vector<int> pattern;
        const auto& rows = l["tie_pattern"];
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(a)) {
          throw ValidationError("tie_pattern must have one row per output");
        }
        for (const auto& row : rows) {
          if (!row.is_array() || row.size() != static_cast<std::size_t>(b)) {
            throw ValidationError("tie_pattern rows must have one entry per input");
          }
          for (const auto& v : row) pattern.push_back(v.get<int>());
        }
        layers.emplace_back(TiedLayer{a, b, std::move(pattern), read_activation(l)});
      } else if (kind == "attention") {
        AttentionLayer att{a, b, std::nullopt};
        if (l.contains("scale")) att.scale = l["scale"].get<double>();
        layers.emplace_back(att);
      } else {
        throw ValidationError("unknown layer kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed network document: ") + e.what());
  }
  return NetworkSpec(std::move(layers));
}

json network_to_json(const NetworkSpec& spec) {
  json layers = json::array();
  for (const auto& layer : spec.layers()) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      layers.push_back({{"kind", "dense"}, {"dims", {d->out_dim, d->in_dim}},
                        {"activation", d->activation.name()}});
    } else if (const auto* t = std::get_if<TiedLayer>(&layer)) {
      json rows = json::array();
      for (int r = 0; r < t->out_dim; ++r) {
        json row = json::array();
        for (int c = 0; c < t->in_dim; ++c) {
          row.push_back(t->tie_pattern[static_cast<std::size_t>(r * t->in_dim + c)]);
        }
        rows.push_back(row);
      }
      layers.push_back({{"kind", "tied"}, {"dims", {t->out_dim, t->in_dim}},
                        {"activation", t->activation.name()}, {"tie_pattern", rows}});
    } else {
      const auto& a = std::get<AttentionLayer>(layer);
      json l = {{"kind", "attention"}, {"dims", {a.model_dim, a.seq_len}}};
      if (a.scale) l["scale"] = *a.scale;
      layers.push_back(l);
    }
  }
  return {{"layers", layers}};
}

NetworkSpec load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("network file " + path.string() + " is not valid JSON: " + e.what());
  }
  return network_from_json(doc);
}

Eigen::VectorXd params_from_json(const json& doc) {
  if (!doc.is_array()) throw ValidationError("parameter vector must be a JSON array");
  Eigen::VectorXd theta(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) throw ValidationError("parameter vector entries must be numbers");
    theta(static_cast<Eigen::Index>(i)) = doc[i].get<double>();
  }
  return theta;
}

json params_to_json(const Eigen::VectorXd& theta) {
  json out = json::array();
  for (Eigen::Index i = 0; i < theta.size(); ++i) out.push_back(theta(i));
  return out;
}

Eigen::VectorXd params_from_csv_row(const std::string& row) {
  std::vector<double> values;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw ValidationError("empty cell in parameter row");
    const std::string trimmed = cell.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(trimmed.c_str(), &end);
    if (end != trimmed.c_str() + trimmed.size()) {
      throw ValidationError("non-numeric cell '" + trimmed + "' in parameter row");
    }
    values.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace gdlab::network
