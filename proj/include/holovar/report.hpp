#pragma once

#include <string>
#include <vector>

#include "holovar/serialize.hpp"

namespace holovar {

// One row of the comparison table rendered from degree-carrying reports
// (fiber-count and oracle runs).
struct SummaryRow {
  std::string group;
  std::string surface;
  int center_order = 0;
  int center_mod_squares = 0;
  int observed_degree = -1;
  int predicted_degree = 0;
  bool agreement = false;
  long trials = 0;
  bool exact = false;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
};

// Builds the table from report bodies; duplicate configurations merge into a
// single row with trial counts summed.  Throws SchemaMismatchError when a
// report carries an unknown schema version, Error when the list is empty.
SummaryTable summarize(const std::vector<Json>& reports);

std::string render_text(const SummaryTable& table);
std::string render_csv(const SummaryTable& table);

// Strips volatile fields (timing) so report bodies can be compared
// byte-for-byte across runs.
Json report_body(const Json& report);

}  // namespace holovar
