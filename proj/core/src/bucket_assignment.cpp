#include "phobic/bucket_assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phobic {

namespace {

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + ": argument outside [0, 1]");
    }
}

} // namespace

std::string_view to_string(AssignmentKind kind) {
    switch (kind) {
    case AssignmentKind::uniform: return "uniform";
    case AssignmentKind::skew: return "skew";
    case AssignmentKind::beta_star: return "beta-star";
    case AssignmentKind::beta_eps: return "beta-eps";
    }
    return "unknown";
}

AssignmentKind parse_assignment_kind(std::string_view name) {
    if (name == "uniform") return AssignmentKind::uniform;
    if (name == "skew") return AssignmentKind::skew;
    if (name == "beta-star" || name == "beta_star") return AssignmentKind::beta_star;
    if (name == "beta-eps" || name == "beta_eps") return AssignmentKind::beta_eps;
    throw std::invalid_argument("unknown assignment function: " + std::string(name));
}

double beta_star(double x) {
    check_unit(x, "beta_star");
    if (x == 1.0) return 1.0;
    return x + (1.0 - x) * std::log1p(-x);
}

double beta_eps(double x, double epsilon) {
    check_unit(x, "beta_eps");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::domain_error("beta_eps: epsilon outside [0, 1)");
    }
    return epsilon * x + (1.0 - epsilon) * beta_star(x);
}

double skew(double x) {
    check_unit(x, "skew");
    return x <= 0.6 ? 0.5 * x : 1.75 * x - 0.75;
}

double evaluate(const AssignmentSpec& spec, double x) {
    switch (spec.kind) {
    case AssignmentKind::uniform: check_unit(x, "uniform"); return x;
    case AssignmentKind::skew: return skew(x);
    case AssignmentKind::beta_star: return beta_star(x);
    case AssignmentKind::beta_eps: return beta_eps(x, spec.epsilon);
    }
    throw std::domain_error("unknown assignment kind");
}

double default_epsilon(double lambda, double partition_size) {
    double eps = lambda / (5.0 * std::sqrt(partition_size));
    if (!(eps > 0.0)) return 0.0;
    return std::min(eps, 0.99);
}

BucketCount BucketCount::for_partition(double partition_size, double lambda) {
    double b = std::round(partition_size / lambda);
    if (!(b >= 1.0)) return BucketCount{1};
    if (b > 4294967295.0) throw std::invalid_argument("bucket count exceeds 32 bits");
    return BucketCount{static_cast<uint32_t>(b)};
}

AssignmentTable::AssignmentTable(const AssignmentSpec& spec) : spec_(spec) {
    for (uint32_t k = 0; k <= kGridSize; ++k) {
        entries_[k] = evaluate(spec, static_cast<double>(k) / kGridSize);
    }
    entries_[0] = 0.0;
    entries_[kGridSize] = 1.0;
    strictly_increasing_ = true;
    for (uint32_t k = 0; k < kGridSize; ++k) {
        if (entries_[k + 1] < entries_[k]) {
            throw std::logic_error("assignment table is not monotone");
        }
        strictly_increasing_ &= entries_[k + 1] > entries_[k];
    }
}

double AssignmentTable::eval(double x) const {
    if (!(x > 0.0 && x <= 1.0)) {
        throw std::domain_error("AssignmentTable::eval: argument outside (0, 1]");
    }
    return interpolate(x);
}

double AssignmentTable::inverse(double y) const {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw std::domain_error("AssignmentTable::inverse: argument outside [0, 1]");
    }
    if (!strictly_increasing_) {
        throw std::logic_error("AssignmentTable::inverse: table is not strictly increasing");
    }
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    double mid = 0.5;
    for (int it = 0; it < 60; ++it) {
        mid = 0.5 * (lo + hi);
        double v = interpolate(mid);
        if (std::abs(v - y) <= 1e-12) break;
        (v < y ? lo : hi) = mid;
    }
    return mid;
}

} // namespace phobic
