#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfree/gogwords.hpp"

namespace vfree {

// Canonical JSON documents shipped in data/, keyed by file stem
// ("sl2z", "counterexample", "z2_z3", "z4_z6").
const std::map<std::string, std::string>& builtin_fixtures();

// The graph of groups stored in a builtin fixture.
GraphOfGroups builtin_graph(const std::string& name);

struct Check {
  std::string id;
  std::string description;
  bool pass = false;
  // Evidence for the outcome; never empty for a failing check.
  std::string witness;
  bool operator==(const Check&) const = default;
};

struct VerificationReport {
  std::string case_name;
  std::vector<Check> checks;

  bool overall() const;
  bool operator==(const VerificationReport&) const = default;
};

std::string report_to_json(const VerificationReport& r);
VerificationReport report_from_json(const std::string& text);
std::string report_to_text(const VerificationReport& r);

// SL2(Z) = Z/4 *_{Z/2} Z/6. The fixture document carries the graph and a
// "presentation" member whose relations are checked against the graph.
VerificationReport verify_sl2z();
VerificationReport verify_sl2z(const std::string& fixture_json);

struct CounterexampleOptions {
  // Replaces the conjugation action of z on C in check (f), in cycle
  // notation on the basis of C. Used for fault injection.
  std::optional<std::string> z_action_override;
  // Longest syllable length of the exhaustive normal-form sample in (e).
  std::size_t max_length = 6;
};

// A *_C B with |A| = 64, |B| = 48, the automorphism psi of A, u = z^-1 x y z
// and the endomorphism phi swapping x and y.
VerificationReport verify_counterexample();
VerificationReport verify_counterexample(const std::string& fixture_json,
                                         const CounterexampleOptions& options = {});

}  // namespace vfree
