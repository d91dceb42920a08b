#pragma once

#include "descentlab/harness/config.hpp"

#include <iosfwd>
#include <string>

namespace descentlab::harness {

struct ExperimentOutput {
  std::string csv;      ///< config echo + header + rows
  std::string summary;  ///< one human-readable line for the terminal
};

/// Runs the configured experiment in-process. Throws descentlab::Error (or a
/// subclass) on failure.
ExperimentOutput render_experiment(const ExperimentConfig& cfg);

/// Runs the experiment and writes the CSV atomically to cfg.output_path.
/// Returns 0 on success, 2 on a configuration error caught while running
/// and 1 on any other failure (message on `err`).
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace descentlab::harness
