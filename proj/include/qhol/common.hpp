#pragma once

/**
 * @file common.hpp
 * @brief Shared basics: error types, integer points, evaluation windows.
 */

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhol {

/// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual input (scalar, operator, DSL, window, config).
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

/// A precondition on arguments was violated (caller error).
struct UsageError : Error {
    using Error::Error;
};

/// Exact arithmetic attempted a division by zero (zero scalar, vanishing denominator).
struct DivisionByZeroError : Error {
    using Error::Error;
};

/// An integer point of Z^r.
using Point = std::vector<std::int64_t>;

std::string point_to_string(std::span<const std::int64_t> p);

/// A finite box of Z^r given by inclusive per-axis ranges.  Used both as an
/// evaluation window and as a support/truncation box.
struct Window {
    std::vector<std::pair<std::int64_t, std::int64_t>> axes;

    Window() = default;
    explicit Window(std::vector<std::pair<std::int64_t, std::int64_t>> a) : axes(std::move(a)) {}
    /// Uniform box [lo,hi]^rank.
    static Window cube(int rank, std::int64_t lo, std::int64_t hi);

    int rank() const { return static_cast<int>(axes.size()); }
    bool contains(std::span<const std::int64_t> p) const;
    /// Number of lattice points (0 if any range is empty).
    std::uint64_t point_count() const;
    /// Visit every lattice point in lexicographic order (axis 0 slowest).
    template <class Fn>
    void for_each_point(Fn&& fn) const {
        if (axes.empty()) {
            Point p;
            fn(p);
            return;
        }
        for (auto& [lo, hi] : axes)
            if (lo > hi) return;
        Point p(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i) p[i] = axes[i].first;
        while (true) {
            fn(const_cast<const Point&>(p));
            std::size_t i = axes.size();
            while (i > 0) {
                --i;
                if (p[i] < axes[i].second) {
                    ++p[i];
                    for (std::size_t j = i + 1; j < axes.size(); ++j) p[j] = axes[j].first;
                    break;
                }
                if (i == 0) return;
            }
        }
    }

    bool operator==(const Window&) const = default;

    /// Text forms: "lo..hi" per axis, comma-separated ("-4..8,-4..8").
    /// A single range with rank>1 broadcasts to every axis.
    static Window parse(std::string_view text, int rank);
    std::string str() const;
};

}  // namespace qhol
