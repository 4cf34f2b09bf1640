#ifndef MSSD_CONFIG_HPP
#define MSSD_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mssd/errors.hpp"

namespace mssd {

/**
 * Flat run configuration shared by the CLI subcommands. Serialized as a
 * commented key = value file; every key is overridable by a CLI flag of
 * the same name.
 */
struct RunConfig {
    std::string data;
    std::string out_dir = ".";
    int samples_per_hour = 1;
    int offset = -1; // -1: derive from timestamps, else explicit in-day offset
    int var = 0;
    bool multivariate = false;
    int jobs = 1;

    std::size_t input_len = 96;
    std::size_t horizon = 24;
    std::vector<int> kernel_scales{2, 3};
    int tcn_layers = 3;
    int tcn_kernel = 3;
    int channels = 16;
    int grid_rows = 4;
    double dropout = 0.05;

    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double lr = 1e-3;
    std::size_t patience = 10;
    std::uint64_t seed = 42;
    double train_frac = 0.7;
    double val_frac = 0.1;
    double test_frac = 0.2;

    std::string fill_policy = "forward-fill"; // or "reject"

    bool operator==(const RunConfig& other) const = default;
};

std::string serialize_config(const RunConfig& config);
RunConfig parse_config(const std::string& text);

void save_config(const RunConfig& config, const std::string& path);
RunConfig load_config(const std::string& path);

} // namespace mssd

#endif // MSSD_CONFIG_HPP
