#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hft::cli {

// Effective configuration after merging per-model defaults, the optional
// JSON config file, and command-line flags (flags win). Axis values are
// already expanded: ranges a:b:n and explicit lists land in the same
// vectors.
struct RunConfig {
    std::string command;                  // verify | sweep | converge | models
    std::string model;
    std::map<std::string, double> params; // --set key=value
    std::vector<double> lambdas{0.0};
    std::vector<double> betas{1.0};
    std::optional<double> mu;
    std::string format = "csv"; // csv | json
    std::string out;            // empty = standard output
    std::uint64_t seed = 1;
    std::vector<Eigen::Index> ms; // converge only
    std::string quantity = "avg_H"; // converge only
};

// Full command entry point; returns the process exit code:
// 0 all checks passed, 1 at least one identity failed, 2 usage error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

} // namespace hft::cli
