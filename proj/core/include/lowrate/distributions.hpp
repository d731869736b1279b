#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "lowrate/rng.hpp"

namespace lowrate {

enum class Family {
    GaussianCurved,   ///< N(mu, c*mu^2)
    Gaussian,         ///< N(mu, sigma^2)
    Gamma,            ///< shape k, rate lambda
    Deterministic,    ///< point mass at mu
    TwoPointLattice,  ///< a w.p. p, b w.p. 1-p
};

/// Closed-form moment table, orders 1..4. Entries that have no closed form
/// for the family are left unset; callers estimate those by sampling.
struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    std::array<std::optional<double>, 4> abs_central;  ///< E|X-mu|^r, r=1..4
    std::array<std::optional<double>, 4> pos_part;     ///< E[(X+)^s], s=1..4
};

/// Distribution family of one walk increment. Immutable after construction;
/// invalid parameters are rejected here, not at draw time.
class IncrementModel {
public:
    static IncrementModel gaussian_curved(double mu, double c);
    static IncrementModel gaussian(double mu, double sigma);
    static IncrementModel gamma(double shape_k, double rate_lambda);
    static IncrementModel deterministic(double mu);
    static IncrementModel two_point_lattice(double a, double b, double p);

    Family family() const { return family_; }
    double mean() const { return mean_; }
    double sd() const { return sd_; }
    double variance() const { return sd_ * sd_; }
    bool lattice() const { return family_ == Family::TwoPointLattice; }
    bool positive_support() const;

    /// Curvature constant for GaussianCurved (sigma^2 = c * mu^2).
    double curvature_c() const { return c_; }
    double shape_k() const { return k_; }
    double rate_lambda() const { return lambda_; }
    double point_a() const { return a_; }
    double point_b() const { return b_; }
    double point_p() const { return p_; }

    /// One i.i.d. draw; advances the stream deterministically.
    double sample(RngStream& stream) const;

    std::string describe() const;

private:
    IncrementModel() = default;
    Family family_ = Family::Deterministic;
    double mean_ = 0.0;
    double sd_ = 0.0;
    double c_ = 0.0;       // GaussianCurved
    double k_ = 0.0;       // Gamma shape
    double lambda_ = 0.0;  // Gamma rate
    double a_ = 0.0, b_ = 0.0, p_ = 0.0;  // TwoPointLattice
};

MomentSummary moments(const IncrementModel& model);

/// Limiting average overshoot rho(mu) where a closed form exists.
/// Positive-support families: mu/2 + sigma^2/(2 mu).
/// Gaussian: series in phi/Phi truncated at absolute term < 1e-12.
/// Lattice families have no valid closed form and yield nullopt.
/// Requires mu > 0.
std::optional<double> rho_closed_form(const IncrementModel& model);

/// w_c with rho(mu) = w_c * mu for GaussianCurved(mu, c).
double gaussian_w_constant(double c, double tol = 1e-12);

struct LadderMoments {
    double m1 = 0.0;       ///< sample mean of the first ascending ladder height
    double m2 = 0.0;       ///< sample second moment
    double rho_hat = 0.0;  ///< m2 / (2 m1)
    double se_m1 = 0.0;
    double se_m2 = 0.0;
};

/// Monte Carlo moments of the first ascending ladder height S_{tau+},
/// tau+ = inf{t : S_t > 0}. Requires mean > 0 so the ladder time is a.s.
/// finite.
LadderMoments ladder_height_moments(const IncrementModel& model,
                                    std::size_t reps, RngStream& stream);

} // namespace lowrate
