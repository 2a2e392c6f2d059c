#pragma once

#include <string>
#include <vector>

#include "corrcam/io/keyval.hpp"
#include "corrcam/pairgen.hpp"

// Text-config binding for the simulation pipeline.  One flat `key = value`
// file describes object, optics, pair source, camera, and run parameters;
// unknown keys are rejected with line numbers.  The effective configuration
// (defaults filled in) serializes back to the same format.

namespace corrcam {

struct RunConfig {
    SimParams params;
    std::string object_kind;  // generator name, or "file"
    std::string object_path;  // kind = file only

    // canonical serialization with every effective value, including defaults
    std::string effective_text() const;
};

// Parses `key = value` text into a RunConfig.  overrides are extra
// "key=value" strings (from --set flags) applied on top of the file.
RunConfig run_config_from_text(const std::string& text, const std::string& source_name,
                               const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// object generator dispatch used by the config loader; exposed for tests
ObjectSpec make_object(const std::string& kind, const KeyValueFile& kv);

} // namespace corrcam
