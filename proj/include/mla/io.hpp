#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mla/hmm.hpp"
#include "mla/kernels.hpp"
#include "mla/patterns.hpp"
#include "mla/randomness.hpp"
#include "mla/signal.hpp"
#include "mla/svm.hpp"
#include "mla/synth.hpp"
#include "mla/transform.hpp"

namespace mla::io {

using json = nlohmann::json;

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// One value per line, optional header "value". Throws on non-finite data.
Signal parse_signal_csv(const std::string& text);
Signal read_signal(const std::filesystem::path& path);
std::string signal_csv(const std::vector<double>& values);

/// Several signals, one per line, comma-separated. A single-column file
/// (optionally headed "value") is read as one signal.
std::vector<Signal> read_signal_rows(const std::filesystem::path& path);

std::string format_double(double v);

json to_json(const IntervalRepresentation& rep);
IntervalRepresentation representation_from_json(const json& j);

json to_json(const IntervalTree& t);

json to_json(const Hmm& h);
Hmm hmm_from_json(const json& j);

json to_json(const SvmModel& m);

json to_json(const NucleosomeModel& m);
NucleosomeModel model_from_json(const json& j);

json to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const json& j);

json to_json(const RandomnessReport& r, const NullParams& p);

/// CSV with a header row of ids; rows in the same order.
std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& ids);
Eigen::MatrixXd parse_matrix_csv(const std::string& text, std::vector<std::string>* ids = nullptr);

}  // namespace mla::io
