// Case file schema: JSON with explicit unit tags, normalized to internal
// units on load. See README for the field reference.
#pragma once

#include <string>

#include "hgp/case.hpp"

namespace hgp {

/// Parses, normalizes and validates a case file. Throws InputError with
/// field context on parse errors or fatal validation diagnostics.
CaseDefinition load_case(const std::string& path);

/// Parses a case from a JSON string (used by load_case and tests).
CaseDefinition parse_case(const std::string& text, const std::string& origin = "<string>");

/// Serializes the case with temperatures expressed in `unit`.
std::string case_to_json(const CaseDefinition& c, TempUnit unit);

/// Atomic write (temp file + rename).
void save_case(const CaseDefinition& c, const std::string& path, TempUnit unit);

}  // namespace hgp
