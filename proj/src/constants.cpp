#include "sdlab/constants.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "sdlab/errors.hpp"

namespace sdlab::constants {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void finish(DiffusionConstant& d) {
    d.sigma2_induced = variance_factor(d.theta) * d.c_M_f;
    d.sigma2_original = d.mu_M_M * d.sigma2_induced;
}

void require_measure(std::optional<double> m) {
    if (m && !(*m > 0.0 && *m <= 1.0)) {
        throw InvalidParameterError("measure of M must be in (0, 1]");
    }
}

}  // namespace

std::string to_string(Provenance p) {
    return p == Provenance::simulated ? "simulated" : "constants-only";
}

double theta_stadium() { return 3.0 * std::log(3.0) / 4.0; }
double theta_drivebelt() { return 7.0 * std::log(7.0) / 24.0; }

double variance_factor(double theta) {
    if (!(theta > -1.0 && theta < 1.0)) {
        throw InvalidParameterError("theta must lie in (-1, 1)");
    }
    return (1.0 + theta) / (1.0 - theta);
}

double stadium_measure_M(double l) {
    if (!(l > 0.0)) throw InvalidParameterError("stadium: l must be > 0");
    return 2.0 / (kPi + l);
}

double stadium_measure_M_prior(double l) {
    if (!(l > 0.0)) throw InvalidParameterError("stadium: l must be > 0");
    return kPi / (2.0 * (kPi + l));
}

double stadium_tail_constant(double l) {
    if (!(l > 0.0)) throw InvalidParameterError("stadium: l must be > 0");
    return l * l / 8.0;
}

static void check_drivebelt(double theta0, double theta1, double l) {
    if (!(theta0 > kPi && theta0 < 1.5 * kPi)) {
        throw InvalidParameterError("drivebelt: theta0 must lie in (pi, 3pi/2)");
    }
    if (!(theta1 > 0.0 && theta1 < 0.5 * kPi)) {
        throw InvalidParameterError("drivebelt: theta1 must lie in (0, pi/2)");
    }
    if (!(l > 0.0)) throw InvalidParameterError("drivebelt: l must be > 0");
}

double drivebelt_measure_M_printed(double theta0, double theta1, double l) {
    check_drivebelt(theta0, theta1, l);
    return (std::sin(theta0) + std::sin(theta1)) / (2.0 * (theta0 + theta1 + 2.0 * l));
}

double stadium_sigma2_printed(double channel_integral, double l) {
    if (!(l > 0.0)) throw InvalidParameterError("stadium: l must be > 0");
    const double k = 3.0 * std::log(3.0);
    return (4.0 + k) / (4.0 - k) * channel_integral * channel_integral / (16.0 * (kPi + l));
}

double drivebelt_sigma2_printed(double channel_integral, double theta0, double theta1, double l) {
    check_drivebelt(theta0, theta1, l);
    const double k = 7.0 * std::log(7.0);
    const double perimeter = theta0 + theta1 + 2.0 * l;
    return (24.0 + k) / (24.0 - k) * channel_integral * channel_integral / (8.0 * perimeter);
}

DiffusionConstant stadium_sigma2(double channel_integral, double l) {
    DiffusionConstant d;
    d.model = "stadium";
    d.theta = theta_stadium();
    d.c_M = stadium_tail_constant(l);
    d.mu_M_M = stadium_measure_M(l);
    d.I_f = channel_integral / (2.0 * l);
    d.c_M_f = d.I_f * d.I_f * d.c_M;
    if (channel_integral == 0.0) d.warning = "channel integral of f vanishes";
    finish(d);
    return d;
}

DiffusionConstant drivebelt_sigma2(double channel_integral, double theta0, double theta1, double l,
                                   std::optional<double> measure_M) {
    check_drivebelt(theta0, theta1, l);
    require_measure(measure_M);
    DiffusionConstant d;
    d.model = "drivebelt";
    d.theta = theta_drivebelt();
    const double perimeter = theta0 + theta1 + 2.0 * l;
    const double half_A = theta0 - kPi;
    d.I_f = channel_integral / (2.0 * half_A);
    if (measure_M) {
        d.mu_M_M = *measure_M;
    } else {
        const double printed = drivebelt_measure_M_printed(theta0, theta1, l);
        // Rounding leaves ~1e-17 where the formula is exactly zero.
        d.mu_M_M = printed > 1e-12 ? printed : kNaN;
    }
    // n mu_M(R >= n) -> (theta0 - pi)^2 / (2 |dD|); c_M carries 1/mu_M(M).
    const double tail_mass = half_A * half_A / (2.0 * perimeter);
    d.c_M = tail_mass / d.mu_M_M;
    d.c_M_f = d.I_f * d.I_f * d.c_M;
    d.sigma2_original = variance_factor(d.theta) * d.I_f * d.I_f * tail_mass;
    d.sigma2_induced = d.sigma2_original / d.mu_M_M;
    if (channel_integral == 0.0) d.warning = "channel integral of f vanishes";
    if (std::isnan(d.mu_M_M)) {
        d.warning += std::string(d.warning.empty() ? "" : "; ") +
                     "printed measure of M is not positive here; supply a Monte Carlo value";
    }
    return d;
}

double sqrt_cos_integral() {
    return std::sqrt(kPi) * boost::math::tgamma(0.75) / boost::math::tgamma(1.25);
}

DiffusionConstant cusp_sigma2(double wall_integral, double abar, double perimeter,
                              std::optional<double> measure_M) {
    if (!(abar > 0.0)) throw InvalidParameterError("cusp: mean curvature must be > 0");
    if (!(perimeter > 0.0)) throw InvalidParameterError("cusp: perimeter must be > 0");
    require_measure(measure_M);
    DiffusionConstant d;
    d.model = "cusp";
    d.theta = 0.0;
    d.provenance = Provenance::constants_only;
    d.c_M = abar / (2.0 * perimeter);
    d.I_f = wall_integral / (4.0 * abar);
    d.sigma2_original = wall_integral * wall_integral / (8.0 * abar * perimeter);
    d.mu_M_M = measure_M ? *measure_M : kNaN;
    d.sigma2_induced = d.sigma2_original / d.mu_M_M;
    d.c_M_f = d.sigma2_induced / variance_factor(d.theta);
    if (wall_integral == 0.0) d.warning = "wall integral of f vanishes";
    return d;
}

DiffusionConstant cusp_sigma2(const std::function<double(double)>& wall_sum, double abar,
                              double perimeter, std::optional<double> measure_M) {
    // tanh-sinh copes with the square-root endpoint behaviour.
    boost::math::quadrature::tanh_sinh<double> q;
    const double w = q.integrate(
        [&](double phi) { return wall_sum(phi) * std::sqrt(std::max(0.0, std::cos(phi))); },
        -0.5 * kPi, 0.5 * kPi);
    return cusp_sigma2(w, abar, perimeter, measure_M);
}

DiffusionConstant semidispersing_sigma2(const std::vector<ChannelTerm>& channels, double perimeter,
                                        std::optional<double> measure_M, Provenance provenance) {
    if (channels.empty()) throw InvalidParameterError("semidispersing: empty channel list");
    if (!(perimeter > 0.0)) throw InvalidParameterError("semidispersing: perimeter must be > 0");
    require_measure(measure_M);
    DiffusionConstant d;
    d.model = "semidispersing";
    d.theta = 0.0;
    d.provenance = provenance;
    double sigma2 = 0.0;
    double tail = 0.0;
    double integral = 0.0;
    double measure = 0.0;
    for (const auto& c : channels) {
        if (!(c.measure > 0.0) || !(c.flight_length > 0.0)) {
            throw InvalidParameterError("semidispersing: channel measure and flight length must be > 0");
        }
        sigma2 += c.integral * c.integral / (4.0 * c.flight_length * perimeter);
        tail += c.measure * c.measure / (4.0 * c.flight_length * perimeter);
        integral += c.integral;
        measure += c.measure;
    }
    d.I_f = channels.size() == 1 ? integral / measure : kNaN;
    d.mu_M_M = measure_M ? *measure_M : kNaN;
    d.c_M = tail / d.mu_M_M;
    d.c_M_f = sigma2 / d.mu_M_M;
    d.sigma2_original = sigma2;
    d.sigma2_induced = d.c_M_f;
    if (sigma2 == 0.0) d.warning = "all channel integrals of f vanish";
    return d;
}

double clt_denominator(double n, double theta, double c_M_f, std::optional<double> measure_M) {
    if (!(n >= 2.0)) throw InvalidParameterError("clt_denominator: n must be >= 2");
    if (!(c_M_f > 0.0)) throw InvalidParameterError("clt_denominator: c_M_f must be > 0");
    require_measure(measure_M);
    const double mu = measure_M ? *measure_M : 1.0;
    return std::sqrt(variance_factor(theta) * mu * c_M_f * n * std::log(n));
}

}  // namespace sdlab::constants
