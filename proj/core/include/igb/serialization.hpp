#pragma once

#include <filesystem>
#include <string>

#include "igb/gradient_tree.hpp"
#include "igb/model.hpp"

namespace igb {

/// Model dump: base constant plus, per increment, the step and each tree as
/// nodes [{"j": 1-based feature, "u": weight}] in heap order and leaf values.
std::string model_to_json(const EnsembleModel& model, int indent = -1);
EnsembleModel model_from_json(const std::string& text);

void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

/// Per-node proposals, scores and selection probabilities of one tree draw.
std::string tree_trace_to_json(const TreeTrace& trace, int indent = 2);

}  // namespace igb
