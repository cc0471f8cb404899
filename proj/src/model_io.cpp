#include "psc/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace psc {

nlohmann::json model_to_json(const LinearModel& model) {
  nlohmann::json doc;
  doc["method_tag"] = std::string(to_string(model.method));
  doc["d"] = model.w.size();
  doc["w"] = std::vector<double>(model.w.data(), model.w.data() + model.w.size());
  doc["b"] = model.b;
  doc["n1"] = model.n1;
  doc["n2"] = model.n2;
  doc["gamma"] = model.gamma;
  doc["lambda"] = model.lambda;
  doc["c0"] = model.c0;
  doc["r_scale"] = model.r_scale;
  doc["converged"] = model.converged;
  doc["kkt_residual"] = model.kkt_residual;
  doc["iterations"] = model.iterations;
  doc["seed_provenance"] =
      model.seed_provenance ? nlohmann::json(*model.seed_provenance) : nlohmann::json(nullptr);
  return doc;
}

LinearModel model_from_json(const nlohmann::json& doc) {
  try {
    LinearModel model;
    model.method = parse_method(doc.at("method_tag").get<std::string>());
    const auto w = doc.at("w").get<std::vector<double>>();
    if (doc.at("d").get<std::size_t>() != w.size()) {
      throw std::runtime_error("model: d does not match length of w");
    }
    model.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    model.b = doc.at("b").get<double>();
    model.n1 = doc.at("n1").get<std::size_t>();
    model.n2 = doc.at("n2").get<std::size_t>();
    model.gamma = doc.at("gamma").get<double>();
    model.lambda = doc.at("lambda").get<double>();
    model.c0 = doc.at("c0").get<double>();
    model.r_scale = doc.at("r_scale").get<double>();
    model.converged = doc.at("converged").get<bool>();
    model.kkt_residual = doc.at("kkt_residual").get<double>();
    model.iterations = doc.value("iterations", std::int64_t{0});
    if (doc.contains("seed_provenance") && !doc["seed_provenance"].is_null()) {
      model.seed_provenance = doc["seed_provenance"].get<std::uint64_t>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed model document: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  write_json(path, model_to_json(model));
}

LinearModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

} // namespace psc
