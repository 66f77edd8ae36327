#pragma once

#include <string>
#include <vector>

#include "blockade/config.hpp"

namespace blockade {

struct RunOutputs {
  std::vector<std::string> files;
};

// Executes one configured run and writes <name>.csv plus <name>.meta.json
// into out_dir (created if missing). Output bytes depend only on the
// resolved config. Truncation warnings while building the initial state
// abort with TruncationError unless the config allows them.
RunOutputs run_experiment(const ExperimentConfig& cfg,
                          const std::string& out_dir);

}  // namespace blockade
