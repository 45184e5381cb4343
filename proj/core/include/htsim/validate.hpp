#pragma once

#include "htsim/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace htsim {

struct CheckResult {
    std::string name;
    std::string context;
    double tolerance = 0;
    double observed = 0;
    bool pass = false;
    std::string note; // failure diagnostics / caught error text
};

// Full model-validation suite: density normalizations, sampler
// goodness-of-fit, closed forms against quadrature / Monte Carlo / finite
// differences, weight-update fixed-point residuals and gradient alignment.
// Every check runs even after failures.
std::vector<CheckResult> validate_models(const ScenarioConfig& cfg);

// Line-oriented key=value report; returns true when every check passed.
bool write_report(const std::vector<CheckResult>& results, std::ostream& out);

} // namespace htsim
