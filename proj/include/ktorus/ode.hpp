#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ktorus {

using Rhs = std::function<void(double t, const double* y, double* dy)>;

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-11;
    double h_max = 0.0;  // 0 = unbounded
    double h0 = 0.0;     // 0 = automatic
    std::size_t max_steps = 2000000;
};

// Dormand-Prince 5(4) solution with the continuous extension of order 4,
// every accepted step kept so it can be evaluated anywhere on the span.
// The integration direction may be negative.
class DenseSolution {
public:
    explicit DenseSolution(int dim = 0) : dim_(dim) {}

    int dim() const { return dim_; }
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    std::size_t steps() const { return t0_.size(); }
    bool covers(double t) const;

    // Component i at t (t inside the span).
    double operator()(double t, int i) const;
    void eval(double t, double* y) const;

    // Step boundaries, in integration order.
    double step_t0(std::size_t k) const { return t0_[k]; }
    double step_t1(std::size_t k) const { return t0_[k] + h_[k]; }
    std::size_t step_of(double t) const;

    // Used by the integrator.
    void start(double t0, const double* y0);
    void push(double t0, double h, const double* rcont);

private:
    int dim_;
    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    std::vector<double> t0_;
    std::vector<double> h_;
    std::vector<double> rc_;  // 5 * dim per step
    std::vector<double> y_begin_;
};

// Called after each accepted step with the solution so far.
// Returning true stops the integration.
using StepObserver = std::function<bool(const DenseSolution&)>;

struct OdeResult {
    DenseSolution sol;
    bool reached_end = false;
    bool stopped = false;
    std::size_t rejected = 0;
};

OdeResult integrate_dopri5(const Rhs& f, int dim, double t0, const double* y0, double t_end,
                           const OdeOptions& opt = {}, const StepObserver& observer = {});

}  // namespace ktorus
