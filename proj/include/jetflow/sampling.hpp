#ifndef JETFLOW_SAMPLING_HPP
#define JETFLOW_SAMPLING_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "jetflow/expr.hpp"

namespace jetflow {

// Axis-aligned sampling box. Defaults match the library-wide test domain:
// t in [-2,2], q and v in [-3,3]^m, xdot0 in [0.5, 1.5].
struct SampleBox {
    double t_min = -2.0, t_max = 2.0;
    double q_min = -3.0, q_max = 3.0;
    double v_min = -3.0, v_max = 3.0;
    double vt_min = 0.5, vt_max = 1.5;
};

// Deterministic quasi-random point source: an additive Kronecker sequence
// (inverse powers of the generalized golden ratio) with a seed-dependent
// offset. Identical seeds yield identical streams on every platform.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed, int dims = 8);

    // Next value of coordinate `axis` in [0, 1).
    double unit(int axis) const;

    // Advance to the next point of the sequence.
    void advance();

    Point next_point(int m, const SampleBox& box = {});
    JetPoint next_jet(int m, const SampleBox& box = {});
    TangentPoint next_tangent(int m, const SampleBox& box = {});

private:
    std::vector<double> alpha_;
    std::vector<double> offset_;
    std::uint64_t n_ = 0;
};

// Max of |A - B| over `count` sampled points. Points where either side
// raises DomainError (or explodes) are rejected and replaced; throws if the
// box yields fewer than count/4 usable points.
double max_difference(const ScalarField& a, const ScalarField& b, Sampler& sampler,
                      int count, const SampleBox& box = {});

// Max of |F| over sampled points, with the same rejection policy.
double max_value(const ScalarField& f, Sampler& sampler, int count,
                 const SampleBox& box = {});

// Generic sampled maximum of a point functional. The functional may throw
// DomainError to reject a point.
double max_over_points(int m, const std::function<double(const Point&)>& fn,
                       Sampler& sampler, int count, const SampleBox& box = {});

}  // namespace jetflow

#endif
