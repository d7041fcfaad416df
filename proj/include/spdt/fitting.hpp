#ifndef SPDT_FITTING_HPP
#define SPDT_FITTING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdt/errors.hpp"
#include "spdt/time_grid.hpp"

namespace spdt {

// The five co-location interaction parameter sample sets plus activation
// frequencies, as read from one-integer-per-line files.
struct CipSamples {
    std::vector<std::int64_t> active_periods;     // t_a, steps, >= 1
    std::vector<std::int64_t> activation_freqs;   // h, activations/day, >= 0
    std::vector<std::int64_t> degrees;            // d, >= 1
    std::vector<std::int64_t> link_delays;        // t_c, steps, >= 0
    std::vector<std::int64_t> link_durations;     // t_d, steps, >= 1
};

struct FitDiagnostic {
    double log_likelihood = 0.0;
    std::uint32_t iterations = 0;
    bool boundary = false; // optimum hit the search boundary
};

struct FittedParams {
    double rho = 0.0;      // active-period stop probability
    double q = 0.0;        // inactive-period stop probability
    double lambda = 0.0;   // homogeneous degree continuation probability
    double beta = 0.0;     // degree power-law exponent
    double xi = 0.0;       // degree power-law lower bound
    double p_c = 0.0;      // link creation probability
    double p_b = 0.0;      // link break probability (= rho by default)

    FitDiagnostic rho_diag, q_diag, lambda_diag, degree_diag, p_c_diag;
    double beta_one_step = 0.0; // single half-iteration values, for reference
    double xi_one_step = 0.0;
    std::uint64_t p_c_dropped_samples = 0; // delays not covered by any bound
};

// Eq. 9: geometric MLE, stop-probability role. Returns m / sum(samples).
double fit_geometric(const std::vector<std::int64_t> &samples);

// Eq. 9 applied in the Eq. 4 role: continuation probability 1 - m / sum(d).
double fit_geometric_continuation(const std::vector<std::int64_t> &degrees);

// Eq. 11: closed-form q from mean daily activation frequency.
// Requires steps_per_day * rho > mean(h).
double fit_activation_rate(const std::vector<std::int64_t> &freq_samples, double rho,
                           std::uint32_t steps_per_day);

// Appendix A.2: p_c as the root of the marginal-likelihood score over the
// active-period sample set. At most `max_mixture` active periods are used per
// fit (uniform seeded subsample, always retaining the maximum).
double fit_truncated_geometric(const std::vector<std::int64_t> &delay_samples,
                               const std::vector<std::int64_t> &active_period_samples,
                               std::uint32_t delta_steps, FitDiagnostic *diag = nullptr,
                               std::uint64_t *dropped = nullptr,
                               std::size_t max_mixture = 10000,
                               std::uint64_t subsample_seed = 0x5bd1e995);

struct MixedDegreeFit {
    double beta = 0.0;
    double xi = 0.0;
    double beta_one_step = 0.0;
    double xi_one_step = 0.0;
    FitDiagnostic diag;
};

// Thrown when the alternating degree solve does not settle (the exponent
// drifts toward the boundary, e.g. for tail-free or homogeneous samples).
struct degree_fit_error : fit_error {
    degree_fit_error(const std::string &msg, double beta, double xi, double res_beta,
                     double res_xi)
        : fit_error(msg), last_beta(beta), last_xi(xi), residual_beta(res_beta),
          residual_xi(res_xi)
    {
    }
    double last_beta, last_xi, residual_beta, residual_xi;
};

// Eqs. 13-14: alternating solve of the two score equations, starting from
// beta = 2.5, until both parameters move less than 1e-4 (at most 100 rounds).
MixedDegreeFit fit_mixed_degree(const std::vector<std::int64_t> &degrees);

// Orchestration of the full Section 3.2 pipeline; p_b is set to rho.
FittedParams fit_all(const CipSamples &samples, const TimeGrid &grid, std::uint32_t delta_steps);

// Score and likelihood evaluations, exposed for tests and diagnostics.
// Compressed sample form: (value, count) pairs sorted by value.
using CompressedSamples = std::vector<std::pair<std::int64_t, std::uint64_t>>;
CompressedSamples compress_samples(const std::vector<std::int64_t> &samples);

double truncated_geometric_score(double p_c, const CompressedSamples &delays,
                                 const CompressedSamples &bounds);
double truncated_geometric_loglik(double p_c, const CompressedSamples &delays,
                                  const CompressedSamples &bounds);
double mixed_degree_loglik(double beta, double xi, const CompressedSamples &degrees);
double mixed_degree_beta_score(double beta, double xi, const CompressedSamples &degrees);
double mixed_degree_xi_score(double xi, double beta, const CompressedSamples &degrees);
// Appendix A.3 upper-bound score; implemented for completeness, unused by the
// default pipeline (the upper bound is fixed to 1).
double mixed_degree_psi_score(double psi, double beta, double xi,
                              const CompressedSamples &degrees);

// Bracketed scalar root finder (bisection with secant acceleration).
// Throws fit_error when the bracket does not change sign.
double find_root(const std::function<double(double)> &f, double lo, double hi,
                 std::uint32_t *iterations = nullptr, std::uint32_t max_iter = 200);

} // namespace spdt

#endif
