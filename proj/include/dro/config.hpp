#pragma once

#include <string>

#include "dro/sim.hpp"

// Run configuration files: a single self-describing JSON document carrying
// the scenario (catalog name or inline constant-matrix definition), observer
// gains, integration settings, and diagnostics thresholds. schema_version
// must be 1.

namespace dro {

struct DiagnosticsConfig {
    // Negative pe_window_T means "default to 10% of the horizon".
    double pe_window_T = -1.0;
    double pe_level = 1e-6;

    double effective_window(double t_final) const {
        return pe_window_T > 0 ? pe_window_T : 0.1 * t_final;
    }
};

struct RunSetup {
    SimConfig sim;
    DiagnosticsConfig diagnostics;
};

RunSetup load_config_file(const std::string& path);

/// Parses the config document from text (exposed for tests).
RunSetup parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace dro
