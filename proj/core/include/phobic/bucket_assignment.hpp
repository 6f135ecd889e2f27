#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace phobic {

enum class AssignmentKind : uint8_t {
    uniform = 0,
    skew = 1,
    beta_star = 2,
    beta_eps = 3,
};

std::string_view to_string(AssignmentKind kind);
AssignmentKind parse_assignment_kind(std::string_view name);

/// Which bucket assignment function to use. `epsilon` only matters for beta_eps.
struct AssignmentSpec {
    AssignmentKind kind = AssignmentKind::beta_eps;
    double epsilon = 0.0;

    friend bool operator==(const AssignmentSpec&, const AssignmentSpec&) = default;
};

// Closed forms. All of them throw std::domain_error outside [0, 1].
double beta_star(double x);
double beta_eps(double x, double epsilon);
double skew(double x);
double evaluate(const AssignmentSpec& spec, double x);

/// lambda / (5 sqrt(P)), clamped to [0, 0.99].
double default_epsilon(double lambda, double partition_size);

/// Number of buckets per partition, identical for every partition.
struct BucketCount {
    uint32_t value = 1;

    static BucketCount for_partition(double partition_size, double lambda);
    friend bool operator==(const BucketCount&, const BucketCount&) = default;
};

/// gamma sampled at k / 2048 for k = 0..2048, evaluated by linear interpolation.
class AssignmentTable {
public:
    static constexpr uint32_t kGridSize = 2048;

    AssignmentTable() : AssignmentTable(AssignmentSpec{AssignmentKind::uniform, 0.0}) {}
    explicit AssignmentTable(const AssignmentSpec& spec);

    const AssignmentSpec& spec() const { return spec_; }
    const std::array<double, kGridSize + 1>& entries() const { return entries_; }
    bool strictly_increasing() const { return strictly_increasing_; }

    /// Interpolated gamma(x) for x in (0, 1]; throws std::domain_error otherwise.
    double eval(double x) const;

    /// 1-based bucket index max(1, ceil(gamma(x) * B)), clamped to B.
    uint32_t bucket_for_hash(double x, BucketCount buckets) const {
        double y = interpolate(x) * buckets.value;
        auto b = static_cast<uint32_t>(y);
        b += static_cast<double>(b) < y;
        if (b < 1) return 1;
        return b > buckets.value ? buckets.value : b;
    }

    /// Bisection inverse of eval on [0, 1]. Throws std::logic_error when the
    /// table is not strictly increasing.
    double inverse(double y) const;

private:
    double interpolate(double x) const {
        double t = x * kGridSize;
        auto k = static_cast<uint32_t>(t);
        if (k >= kGridSize) return entries_[kGridSize];
        double frac = t - k;
        return entries_[k] + frac * (entries_[k + 1] - entries_[k]);
    }

    AssignmentSpec spec_;
    std::array<double, kGridSize + 1> entries_{};
    bool strictly_increasing_ = false;
};

inline AssignmentTable tabulate(const AssignmentSpec& spec) { return AssignmentTable(spec); }

} // namespace phobic
