#pragma once

#include "psc/classifier.hpp"

#include <json.hpp>

#include <filesystem>

namespace psc {

/// {method_tag, d, w, b, n1, n2, gamma, lambda, c0, r_scale, converged,
///  kkt_residual, seed_provenance}. Doubles are written in their shortest
/// round-trip form, so save/load is loss-free.
nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);

/// Pretty-printed JSON followed by a newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace psc
