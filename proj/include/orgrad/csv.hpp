#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orgrad/learner.hpp"

namespace orgrad {

// %.17g with nan/inf spelled out, so a round-trip through text is bit-exact
// for finite values.
[[nodiscard]] std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> comments;  // '#' lines, leading "# " stripped
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;

    [[nodiscard]] std::size_t col(const std::string& name) const;
    [[nodiscard]] const std::string& at(std::size_t row, const std::string& name) const;
    [[nodiscard]] double num(std::size_t row, const std::string& name) const;
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

[[nodiscard]] CsvTable read_csv(const std::string& path);

// One row per trajectory record, header t,eta,fro_err,rel_err,sup_err,incoh,regret.
void write_trajectory_csv(const std::string& path,
                          const std::vector<std::string>& comments,
                          const TrajectoryLog& log);

}  // namespace orgrad
