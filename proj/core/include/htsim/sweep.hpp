#pragma once

#include "htsim/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace htsim {

// One grid point of the capacity sweep. All Monte Carlo columns of one row
// share the same fade draws across schemes (common random numbers).
struct SweepRow {
    double swept_dbw = 0;
    double c1_cf = 0, c1_mc = 0, c1_mc_se = 0;
    double c1_single_cf = 0, c1_single_mc = 0, c1_single_mc_se = 0;
    // scheme order: proposed, zf, slnr
    double c2_cf[3] = {0, 0, 0};
    double c2_mc[3] = {0, 0, 0};
    double c2_mc_se[3] = {0, 0, 0};
    double e2e_cf[3] = {0, 0, 0};
    int selected_users = 0; // proposed scheme after one-bit feedback
};

extern const char* const kSweepCsvHeader;

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

// Convenience wrapper: sweep the config and write the CSV file; returns the
// rows for further checks.
std::vector<SweepRow> run_sweep_to_file(const ScenarioConfig& cfg,
                                        const std::string& output_path);

} // namespace htsim
