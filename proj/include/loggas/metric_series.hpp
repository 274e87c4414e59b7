#pragma once

// Time-indexed diagnostic records emitted by experiments as CSV.

#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/numeric.hpp"

namespace loggas {

// A named table with a leading time column and fixed value columns. Time must be
// non-decreasing; pure time series are strictly increasing, while long-form tables
// (one row per (t, z) pair) repeat t across a block.
struct MetricSeries {
    std::string name;
    std::vector<std::string> columns; // value columns, excluding the leading "t"
    std::vector<double> t;
    std::vector<std::vector<double>> rows;

    MetricSeries(std::string series_name, std::vector<std::string> value_columns)
        : name(std::move(series_name)), columns(std::move(value_columns)) {
        if (name.empty()) throw invalid_argument("MetricSeries: empty name");
        if (columns.empty()) throw invalid_argument("MetricSeries: no value columns");
    }

    std::size_t size() const { return t.size(); }

    void add_row(double time, std::vector<double> values) {
        if (values.size() != columns.size())
            throw invalid_argument("MetricSeries '" + name + "': row width mismatch");
        if (!t.empty() && time < t.back())
            throw invalid_argument("MetricSeries '" + name + "': time must be non-decreasing");
        t.push_back(time);
        rows.push_back(std::move(values));
    }

    void write_csv(std::ostream& os) const {
        os << "t";
        for (const auto& c : columns) os << ',' << c;
        os << '\n';
        for (std::size_t i = 0; i < t.size(); ++i) {
            os << format_double(t[i]);
            for (const double v : rows[i]) os << ',' << format_double(v);
            os << '\n';
        }
    }
};

} // namespace loggas
