#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace jumpgeo {

/// Neumaier-compensated running sum.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// `%.17g`-style text for a double; parses back to the same bits.
std::string format_double(double x);
/// Strict parse of a full field; throws DomainError on trailing garbage.
double parse_double(std::string_view field);

std::vector<std::string_view> split_csv_line(std::string_view line);

/// Counter-based seed splitting: stream `index` of master seed `master`.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

}  // namespace jumpgeo
