#include "optomech/ode.hpp"

#include "optomech/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optomech {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Continuous extension (Hairer, Norsett & Wanner, dense output of order 4).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double safety = 0.9;
constexpr double fac_min = 0.2;
constexpr double fac_max = 10.0;
constexpr double beta = 0.04;
constexpr double expo = 0.2 - beta * 0.75;

}  // namespace

StepperConfig StepperConfig::for_period(double tau) {
    StepperConfig cfg;
    cfg.max_step = tau / 50.0;
    return cfg;
}

void StepperConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "stepper tolerances must be positive");
    }
    if (!(max_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_step must be positive");
    if (!(overflow_guard > 0.0)) throw Error(ErrorKind::InvalidArgument, "overflow_guard must be positive");
}

DormandPrince::DormandPrince(VectorField f, double t0, std::vector<double> y0, StepperConfig cfg)
    : f_(std::move(f)), cfg_(cfg), n_(y0.size()), t_(t0), t_prev_(t0), h_(0.0), y_(std::move(y0)) {
    cfg_.validate();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &y_stage_, &y_new_, &err_, &r1_, &r2_,
                    &r3_, &r4_, &r5_}) {
        v->assign(n_, 0.0);
    }
    f_(t_, y_, k1_);
    h_ = cfg_.initial_step > 0.0 ? std::min(cfg_.initial_step, cfg_.max_step) : initial_step();
    r1_ = y_;
}

double DormandPrince::error_norm(std::span<const double> y_new) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
        const double r = err_[i] / sc;
        sum += r * r;
    }
    return n_ == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n_));
}

// Starting step heuristic from Hairer & Wanner (hinit).
double DormandPrince::initial_step() const {
    if (n_ == 0) return cfg_.max_step;
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
        dnf += (k1_[i] / sk) * (k1_[i] / sk);
        dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, cfg_.max_step);

    std::vector<double> y1(n_), f1(n_);
    for (std::size_t i = 0; i < n_; ++i) y1[i] = y_[i] + h * k1_[i];
    f_(t_ + h, y1, f1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
        const double d = (f1[i] - k1_[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, cfg_.max_step});
}

void DormandPrince::step(double t_limit) {
    const double remaining = t_limit - t_;
    if (remaining <= 0.0) throw Error(ErrorKind::InvalidArgument, "DormandPrince::step: t_limit not ahead");

    bool last_rejected = false;
    for (;;) {
        double h = std::min({h_, cfg_.max_step, remaining});
        // Avoid a sliver of a step right before the limit.
        if (remaining - h < 1e-12 * std::max(1.0, std::abs(t_limit))) h = remaining;

        if (h < 1e-14 * std::max(1.0, std::abs(t_))) {
            std::ostringstream os;
            os << "step size underflow at t = " << t_ << " (h = " << h << ")";
            throw Error(ErrorKind::StepFailure, os.str());
        }

        const auto& y = y_;
        for (std::size_t i = 0; i < n_; ++i) y_stage_[i] = y[i] + h * a21 * k1_[i];
        f_(t_ + c2 * h, y_stage_, k2_);
        for (std::size_t i = 0; i < n_; ++i) y_stage_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        f_(t_ + c3 * h, y_stage_, k3_);
        for (std::size_t i = 0; i < n_; ++i)
            y_stage_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        f_(t_ + c4 * h, y_stage_, k4_);
        for (std::size_t i = 0; i < n_; ++i)
            y_stage_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        f_(t_ + c5 * h, y_stage_, k5_);
        for (std::size_t i = 0; i < n_; ++i)
            y_stage_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        const double t_new = (h == remaining) ? t_limit : t_ + h;
        f_(t_new, y_stage_, k6_);
        for (std::size_t i = 0; i < n_; ++i)
            y_new_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
        f_(t_new, y_new_, k7_);
        for (std::size_t i = 0; i < n_; ++i)
            err_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);

        const double err = error_norm(y_new_);
        if (!std::isfinite(err)) {
            // Non-finite stage values: shrink hard and retry; underflow reports it.
            h_ = h * fac_min;
            ++rejected_;
            last_rejected = true;
            continue;
        }

        const double fac11 = std::pow(std::max(err, 1e-300), expo);
        double fac = fac11 / std::pow(fac_old_, beta) / safety;
        fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
        double h_new = h / fac;

        if (err <= 1.0) {
            fac_old_ = std::max(err, 1e-4);
            if (last_rejected) h_new = std::min(h_new, h);

            // Dense output coefficients for the accepted step.
            for (std::size_t i = 0; i < n_; ++i) {
                const double ydiff = y_new_[i] - y[i];
                const double bspl = h * k1_[i] - ydiff;
                r1_[i] = y[i];
                r2_[i] = ydiff;
                r3_[i] = bspl;
                r4_[i] = ydiff - h * k7_[i] - bspl;
                r5_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7_[i]);
            }
            t_prev_ = t_;
            t_ = t_new;
            y_.swap(y_new_);
            k1_.swap(k7_);
            h_ = h_new;
            last_error_ = err;
            ++accepted_;

            for (std::size_t i = 0; i < n_; ++i) {
                if (!(std::abs(y_[i]) <= cfg_.overflow_guard)) {
                    std::ostringstream os;
                    os << "state component " << i << " = " << y_[i] << " exceeds the overflow guard "
                       << cfg_.overflow_guard << " at t = " << t_;
                    throw Error(ErrorKind::Diverged, os.str());
                }
            }
            if (accepted_ + rejected_ > cfg_.max_steps) {
                throw Error(ErrorKind::StepFailure, "maximum number of steps exceeded");
            }
            return;
        }

        h_ = h / std::min(1.0 / fac_min, fac11 / safety);
        ++rejected_;
        last_rejected = true;
    }
}

void DormandPrince::interpolate(double t, std::span<double> out) const {
    const double h = t_ - t_prev_;
    if (h <= 0.0) {
        std::copy(y_.begin(), y_.end(), out.begin());
        return;
    }
    if (t == t_) {
        std::copy(y_.begin(), y_.end(), out.begin());
        return;
    }
    const double theta = (t - t_prev_) / h;
    const double theta1 = 1.0 - theta;
    for (std::size_t i = 0; i < n_; ++i) {
        out[i] = r1_[i] + theta * (r2_[i] + theta1 * (r3_[i] + theta * (r4_[i] + theta1 * r5_[i])));
    }
}

StepResult ode_step(const VectorField& f, double t, std::span<const double> y, const StepperConfig& cfg) {
    DormandPrince stepper(f, t, std::vector<double>(y.begin(), y.end()), cfg);
    stepper.step(t + cfg.max_step);
    return StepResult{stepper.t(), stepper.y(), stepper.last_error(), stepper.last_step()};
}

std::vector<double> integrate(const VectorField& f, double t0, std::vector<double> y0, double t_end,
                              std::span<const double> sample_times, const StepperConfig& cfg,
                              const SampleObserver& on_sample) {
    if (!(t_end >= t0)) throw Error(ErrorKind::InvalidArgument, "integrate: t_end before t0");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double ts = sample_times[i];
        if (ts < t0 || ts > t_end || (i > 0 && !(ts > sample_times[i - 1]))) {
            throw Error(ErrorKind::InvalidArgument,
                        "integrate: sample times must be strictly increasing and inside [t0, t_end]");
        }
    }

    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] == t0) {
        if (on_sample) on_sample(t0, y0);
        ++next;
    }
    if (t_end == t0) return y0;

    DormandPrince stepper(f, t0, std::move(y0), cfg);
    std::vector<double> buffer(stepper.y().size());
    while (stepper.t() < t_end) {
        stepper.step(t_end);
        while (next < sample_times.size() && sample_times[next] <= stepper.t()) {
            stepper.interpolate(sample_times[next], buffer);
            if (on_sample) on_sample(sample_times[next], buffer);
            ++next;
        }
    }
    return stepper.y();
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {t0};
    std::vector<double> grid(n);
    const double dt = (t1 - t0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) grid[i] = t0 + dt * static_cast<double>(i);
    grid.back() = t1;
    return grid;
}

}  // namespace optomech
