#pragma once

#include <string>
#include <vector>

#include "qcap/channels.hpp"
#include "qcap/qmat.hpp"

namespace qcap {

// Channel + ensemble description document (JSON syntax). Complex numbers are
// [re, im] pairs; signals may be Bloch vectors or explicit kets. Dimensions
// and normalization are validated on load; violations raise InputError.
struct FixtureDoc {
  std::string name;
  WiretapChannel channel;
  CQWiretapEnsemble ensemble;
};

FixtureDoc load_fixture(const std::string& path);
FixtureDoc parse_fixture(const std::string& json_text);

// Divergence input: either {"systems":…, "rho":…, "sigma":…} for a state
// pair, or {"systems":…, "state":…, "part_a":…} for one bipartite state whose
// second argument is the product of its marginals.
struct DivergenceInput {
  Op rho;
  Op sigma;
  bool bipartite = false;
};

DivergenceInput load_divergence_input(const std::string& path);
DivergenceInput parse_divergence_input(const std::string& json_text);

// Deterministic float formatting: 12 significant digits, fixed across runs.
std::string format_float(double v);
std::string csv_row(const std::vector<double>& values);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace qcap
