#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "test_support.hpp"

// Randomized property cases. Each returns nullopt on success or a
// description of the first violation.
namespace testing_support {

using Failure = std::optional<std::string>;

// parse(serialize(doc)) == doc and serialize is a fixpoint, for a random
// spec carrying random saved values.
Failure xml_roundtrip_case(Rng& rng);
Failure xml_fixture_roundtrip(const std::filesystem::path& fixture);

// One deliberately invalid document per model rule and the error it must
// produce.
struct BrokenCase {
  std::string file;      // under tests/broken
  std::string fragment;  // expected in the single reported error
};
const std::vector<BrokenCase>& broken_cases();
Failure broken_fixture_case(const BrokenCase& c);

// Saved values survive export and reload: apply(parse(serialize(attach(s))))
// on a fresh session gives back s.
Failure persistence_case(Rng& rng);

// Random set/clear/reset/run sequences checked against a reference model.
Failure state_machine_case(Rng& rng);

// The preview of a random session tokenizes back to its argv, and argv
// matches an independently built expectation.
Failure assembler_oracle_case(Rng& rng);
Failure shell_quote_case(Rng& rng);

// parse_argv(assemble(session)) recovers the session's observable values.
Failure duality_case(Rng& rng);

// Independent acceptance oracle for raw option text; the value it would
// produce when accepted.
std::optional<optionhost::OptionValue> reference_parse(const optionhost::OptionDef& def,
                                                       const std::string& raw);

std::string describe(const std::vector<std::string>& argv);

}  // namespace testing_support
