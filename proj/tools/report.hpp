#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace ufem::report {

struct Series {
    std::string name;
    std::vector<double> x, y;
};

/// Log-log line plot with decade grid lines.  Nonpositive and non-finite
/// points are skipped.
std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series);

/// Splits "a,b,c" into trimmed, nonempty items.
std::vector<std::string> split_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);
/// "a..b" or a single integer.
std::pair<int, int> parse_range(const std::string& s);
/// "k0,k1".
std::pair<double, double> parse_pair(const std::string& s);

/// argv with every top-level key of `config` turned into a `--key value`
/// pair, inserted after the subcommand unless the same flag is already
/// present.  Arrays become comma lists, booleans become bare flags.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const nlohmann::json& config);

}  // namespace ufem::report
