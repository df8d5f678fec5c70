#include "jetflow/sampling.hpp"

#include <cmath>

namespace jetflow {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Root of x^(d+1) = x + 1, the basis of the d-dimensional Kronecker sequence.
double plastic_root(int d) {
    double x = 2.0;
    for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1));
    return x;
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

Sampler::Sampler(std::uint64_t seed, int dims) {
    if (dims < 1) dims = 1;
    const double g = plastic_root(dims);
    alpha_.resize(dims);
    offset_.resize(dims);
    std::uint64_t s = seed ^ 0x5bf0a8b1d8a5c73dULL;
    double a = 1.0;
    for (int i = 0; i < dims; ++i) {
        a /= g;
        alpha_[i] = a;
        offset_[i] = unit_from_bits(splitmix64(s));
    }
}

double Sampler::unit(int axis) const {
    const int d = static_cast<int>(alpha_.size());
    // Fold extra axes back with decorrelated offsets.
    const int i = axis % d;
    const double shift = 0.38196601125010515 * (axis / d);
    return frac(offset_[i] + shift + static_cast<double>(n_) * alpha_[i]);
}

void Sampler::advance() { ++n_; }

Point Sampler::next_point(int m, const SampleBox& box) {
    Point p;
    int axis = 0;
    p.t = box.t_min + unit(axis++) * (box.t_max - box.t_min);
    p.q.resize(m);
    p.v.resize(m);
    for (int i = 0; i < m; ++i) p.q[i] = box.q_min + unit(axis++) * (box.q_max - box.q_min);
    for (int i = 0; i < m; ++i) p.v[i] = box.v_min + unit(axis++) * (box.v_max - box.v_min);
    p.vt = box.vt_min + unit(axis++) * (box.vt_max - box.vt_min);
    advance();
    return p;
}

JetPoint Sampler::next_jet(int m, const SampleBox& box) {
    Point p = next_point(m, box);
    return JetPoint{p.t, std::move(p.q), std::move(p.v)};
}

TangentPoint Sampler::next_tangent(int m, const SampleBox& box) {
    Point p = next_point(m, box);
    TangentPoint tp;
    tp.x.push_back(p.t);
    tp.x.insert(tp.x.end(), p.q.begin(), p.q.end());
    tp.xdot.push_back(p.vt);
    tp.xdot.insert(tp.xdot.end(), p.v.begin(), p.v.end());
    return tp;
}

double max_over_points(int m, const std::function<double(const Point&)>& fn,
                       Sampler& sampler, int count, const SampleBox& box) {
    double worst = 0.0;
    int accepted = 0;
    int attempts = 0;
    const int max_attempts = count * 4;
    while (accepted < count && attempts < max_attempts) {
        ++attempts;
        Point p = sampler.next_point(m, box);
        double r;
        try {
            r = fn(p);
        } catch (const DomainError&) {
            continue;  // singular point of the sampled field; skip
        }
        if (!std::isfinite(r) || std::abs(r) > 1e12) continue;
        ++accepted;
        if (std::abs(r) > worst) worst = std::abs(r);
    }
    if (accepted < (count + 3) / 4)
        throw DomainError("sampling box lies almost entirely outside the field domain");
    return worst;
}

double max_difference(const ScalarField& a, const ScalarField& b, Sampler& sampler,
                      int count, const SampleBox& box) {
    if (a.dim() != b.dim()) throw DimensionMismatch("field dimension mismatch");
    return max_over_points(
        a.dim(), [&](const Point& p) { return a.eval(p) - b.eval(p); }, sampler, count, box);
}

double max_value(const ScalarField& f, Sampler& sampler, int count, const SampleBox& box) {
    return max_over_points(
        f.dim(), [&](const Point& p) { return f.eval(p); }, sampler, count, box);
}

}  // namespace jetflow
