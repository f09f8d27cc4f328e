#include "cloudq/csv_export.hpp"

#include <iomanip>

namespace cloudq {

void write_expected_counts_csv(std::ostream& out, const std::vector<ProbabilityTable>& series) {
    out << "step,bin,expected_count\n" << std::setprecision(17);
    for (const auto& p : series) {
        for (int bin = 1; bin <= p.bins(); ++bin) out << p.step() << ',' << bin << ',' << expected_count(p, bin) << '\n';
    }
}

void write_probabilities_csv(std::ostream& out, const std::vector<ProbabilityTable>& series) {
    out << "step,state_id,probability\n" << std::setprecision(17);
    for (const auto& p : series) {
        for (const auto& [state, prob] : p.entries()) out << p.step() << ',' << state.to_string() << ',' << prob << '\n';
    }
}

}  // namespace cloudq
