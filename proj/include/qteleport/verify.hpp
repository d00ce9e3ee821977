#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtel {

struct CheckRow {
    std::string name;
    bool pass = false;
    double value = 0.0;  // measured quantity
    double bound = 0.0;  // the tolerance / bound it was compared against
};

struct VerifyOptions {
    std::uint64_t seed = 12345;
    int threads = 1;
    // Testing hook: replaces one tolerance with an impossible one so that a
    // failure path is exercised end to end.
    bool inject_bad_tolerance = false;
};

// Runs every module's invariant & property suite and returns one row per
// check. Pure given the options; a fixed seed gives identical rows.
std::vector<CheckRow> run_all_checks(const VerifyOptions& opt);

}  // namespace qtel
