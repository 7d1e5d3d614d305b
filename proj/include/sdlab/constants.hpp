#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sdlab::constants {

enum class Provenance { simulated, constants_only };
std::string to_string(Provenance p);

// Diffusion constants of one model/observable pair.
//   sigma2_induced  = (1+theta)/(1-theta) * c_M_f         (F-process, per n ln n)
//   sigma2_original = mu_M_M * sigma2_induced              (T-process, per n ln n)
// c_M is the tail constant of R itself; c_M_f = I_f^2 c_M for single-average
// models. Entries that the model does not determine are NaN.
struct DiffusionConstant {
    std::string model;
    double theta = 0.0;
    double c_M = 0.0;
    double c_M_f = 0.0;
    double mu_M_M = 0.0;
    double I_f = 0.0;
    double sigma2_induced = 0.0;
    double sigma2_original = 0.0;
    Provenance provenance = Provenance::simulated;
    std::string warning;  // non-empty when the limit theorem is vacuous
};

double theta_stadium();    // 3 ln 3 / 4
double theta_drivebelt();  // 7 ln 7 / 24

// (1+theta)/(1-theta); throws for |theta| >= 1.
double variance_factor(double theta);

double stadium_measure_M(double l);        // 2 / (pi + l)
double stadium_measure_M_prior(double l);  // pi / (2 (pi + l)), the disputed earlier value
double stadium_tail_constant(double l);    // l^2 / 8

// (sin theta0 + sin theta1) / (2 |dD|), evaluated exactly as printed. It is
// non-positive on part of the admissible parameter range (e.g. 7pi/6, pi/6).
double drivebelt_measure_M_printed(double theta0, double theta1, double l);

// Printed closed forms of sigma_f^2, given J = int_{r in A} f(r, 0) dr.
double stadium_sigma2_printed(double channel_integral, double l);
double drivebelt_sigma2_printed(double channel_integral, double theta0, double theta1, double l);

// Stadium: |A| = 2l.
DiffusionConstant stadium_sigma2(double channel_integral, double l);

// Drivebelt: |A| = 2 (theta0 - pi). mu_M(M) is taken from `measure_M` when
// given (Monte Carlo), else from the printed formula when that is positive,
// else left NaN; sigma2_original does not depend on it.
DiffusionConstant drivebelt_sigma2(double channel_integral, double theta0, double theta1, double l,
                                   std::optional<double> measure_M = std::nullopt);

// int_{-pi/2}^{pi/2} sqrt(cos phi) dphi = sqrt(pi) Gamma(3/4) / Gamma(5/4).
double sqrt_cos_integral();

// Cusp: sigma^2 = W^2 / (8 abar |dD|) with
// W = int (f(r', phi) + f(r'', phi)) sqrt(cos phi) dphi; theta = 0.
DiffusionConstant cusp_sigma2(double wall_integral, double abar, double perimeter,
                              std::optional<double> measure_M = std::nullopt);
// Same with W computed by quadrature from wall_sum(phi) = f(r',phi) + f(r'',phi).
DiffusionConstant cusp_sigma2(const std::function<double(double)>& wall_sum, double abar,
                              double perimeter, std::optional<double> measure_M = std::nullopt);

struct ChannelTerm {
    double integral = 0.0;       // int_{A_i} f(r, phi_i) dr
    double measure = 0.0;        // |A_i|
    double flight_length = 0.0;  // I_i
};

// Rectangle with scatterers: sigma^2 = sum_i integral_i^2 / (4 I_i |dD|), theta = 0.
DiffusionConstant semidispersing_sigma2(const std::vector<ChannelTerm>& channels, double perimeter,
                                        std::optional<double> measure_M = std::nullopt,
                                        Provenance provenance = Provenance::constants_only);

// sqrt((1+theta)/(1-theta) [mu_M(M)] c_M_f n ln n); the factor mu_M(M) is
// included iff measure_M is given (T-process).
double clt_denominator(double n, double theta, double c_M_f,
                       std::optional<double> measure_M = std::nullopt);

}  // namespace sdlab::constants
