#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oddac/errors.h"
#include "oddac/harness.h"

namespace oddac {

using nlohmann::json;

namespace {

json matrix_to_json(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ScenarioError(std::string(what) + " must be a non-empty array of rows");
  }
  const auto r = j.size();
  const auto c = j.front().size();
  MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) {
      throw ScenarioError(std::string(what) + " has ragged rows");
    }
    for (std::size_t k = 0; k < c; ++k) {
      if (!j[i][k].is_number()) throw ScenarioError(std::string(what) + " has a non-number");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ScenarioError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("field '") + key + "': " + e.what());
  }
}

json scenario_json(const Scenario& sc) {
  json plant;
  const MatrixTrajectory& tr = *sc.plant;
  if (const auto* k = std::get_if<KeyframeSource>(&tr.source())) {
    plant["kind"] = "keyframes";
    json frames = json::array();
    for (const auto& f : k->keyframes) {
      frames.push_back({{"time", f.time}, {"A", matrix_to_json(f.A)}, {"B", matrix_to_json(f.B)}});
    }
    plant["keyframes"] = std::move(frames);
  } else if (const auto* c = std::get_if<ConstantSource>(&tr.source())) {
    plant["kind"] = "constant";
    plant["A"] = matrix_to_json(c->A);
    plant["B"] = matrix_to_json(c->B);
  } else {
    throw ScenarioError("explicit trajectories cannot be serialized");
  }
  plant["horizon"] = tr.horizon();

  const ControllerConfig& cfg = sc.cfg;
  json ctrl = {{"T", cfg.T},
               {"T_W", cfg.T_W},
               {"lambda", cfg.lambda},
               {"lambda_hat", cfg.lambda_hat},
               {"sigma1", cfg.sigma1},
               {"sigma2", cfg.sigma2},
               {"v_bar", cfg.v_bar},
               {"L", cfg.L},
               {"seed", cfg.seed},
               {"K0", matrix_to_json(cfg.K0)},
               {"Q0", matrix_to_json(cfg.Q0)}};
  json x0 = json::array();
  for (Eigen::Index i = 0; i < sc.x0.size(); ++i) x0.push_back(sc.x0(i));
  return {{"name", sc.name},     {"horizon", sc.horizon}, {"mode", to_string(sc.mode)},
          {"x0", std::move(x0)}, {"plant", std::move(plant)}, {"controller", std::move(ctrl)}};
}

// Pretty form with every innermost numeric array kept on one line.
std::string compact_dump(const json& j) {
  const std::string full = j.dump(2);
  std::string out;
  out.reserve(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full[i] == '[') {
      const std::size_t close = full.find(']', i);
      const std::size_t nested = full.find_first_of("[{", i + 1);
      if (close != std::string::npos && (nested == std::string::npos || nested > close)) {
        out += '[';
        bool space = false;
        for (std::size_t k = i + 1; k < close; ++k) {
          const char ch = full[k];
          if (ch == '\n' || ch == ' ') {
            space = true;
            continue;
          }
          if (space && out.back() == ',') out += ' ';
          space = false;
          out += ch;
        }
        out += ']';
        i = close;
        continue;
      }
    }
    out += full[i];
  }
  return out;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) { return compact_dump(scenario_json(sc)) + "\n"; }

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario sc;
  sc.name = j.value("name", std::string("scenario"));
  sc.horizon = field<int>(j, "horizon");
  sc.mode = parse_run_mode(j.value("mode", std::string("oddac")));

  const json& p = j.at("plant");
  const std::string kind = field<std::string>(p, "kind");
  const int plant_horizon = p.value("horizon", sc.horizon);
  try {
    if (kind == "keyframes") {
      std::vector<Keyframe> frames;
      for (const auto& f : p.at("keyframes")) {
        frames.push_back({field<int>(f, "time"), matrix_from_json(f.at("A"), "A"),
                          matrix_from_json(f.at("B"), "B")});
      }
      sc.plant = std::make_shared<MatrixTrajectory>(
          make_keyframe_trajectory(std::move(frames), plant_horizon));
    } else if (kind == "constant") {
      sc.plant = std::make_shared<MatrixTrajectory>(make_constant_trajectory(
          matrix_from_json(p.at("A"), "A"), matrix_from_json(p.at("B"), "B"), plant_horizon));
    } else {
      throw ScenarioError("unknown plant kind '" + kind + "'");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(std::string("plant: ") + e.what());
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("plant: ") + e.what());
  }

  const json x0 = j.at("x0");
  sc.x0.resize(static_cast<Eigen::Index>(x0.size()));
  for (std::size_t i = 0; i < x0.size(); ++i) sc.x0(i) = x0[i].get<double>();

  const json& c = j.at("controller");
  ControllerConfig& cfg = sc.cfg;
  cfg.T = field<int>(c, "T");
  cfg.T_W = field<int>(c, "T_W");
  cfg.lambda = field<double>(c, "lambda");
  cfg.lambda_hat = field<double>(c, "lambda_hat");
  cfg.sigma1 = field<double>(c, "sigma1");
  cfg.sigma2 = field<double>(c, "sigma2");
  cfg.v_bar = field<double>(c, "v_bar");
  cfg.seed = c.value("seed", std::uint64_t{0});
  if (c.contains("L") && c.at("L").is_string()) {
    if (c.at("L").get<std::string>() != "estimate") {
      throw ScenarioError("L must be a number or \"estimate\"");
    }
    cfg.L = estimate_lipschitz(*sc.plant);
  } else {
    cfg.L = field<double>(c, "L");
  }
  cfg.K0 = matrix_from_json(c.at("K0"), "K0");
  cfg.Q0 = matrix_from_json(c.at("Q0"), "Q0");
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write '" + path + "'");
  out << scenario_to_json(sc);
}

std::string scenario_hash(const Scenario& sc) {
  const std::string text = scenario_json(sc).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oddac
