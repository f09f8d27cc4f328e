#pragma once

#include <string>
#include <vector>

namespace cloudq {

// One compared cell: computed value against an embedded published value.
struct GoldenCell {
    std::string table;
    std::string row;
    std::string column;
    double expected = 0.0;
    double computed = 0.0;
    // Relative tolerance, or absolute when `absolute` is set.
    double tolerance = 0.0;
    bool absolute = false;
    bool pass = false;
};

struct ReproductionResult {
    std::vector<GoldenCell> cells;
    int arcsine_exact_rows = 0;
    int arcsine_required_exact = 10;
    bool all_pass() const;
};

// Resource table for the five presets and, unless skipped, the arcsine piece
// table (the slow part).
ReproductionResult reproduce_tables(bool include_arcsine = true);

}  // namespace cloudq
