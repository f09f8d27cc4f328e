#pragma once

#include <ostream>
#include <vector>

#include "cloudq/master_solver.hpp"

namespace cloudq {

// step,bin,expected_count
void write_expected_counts_csv(std::ostream& out, const std::vector<ProbabilityTable>& series);

// step,state_id,probability where state_id is the occupation vector "n_1 n_2 ... n_N".
void write_probabilities_csv(std::ostream& out, const std::vector<ProbabilityTable>& series);

}  // namespace cloudq
