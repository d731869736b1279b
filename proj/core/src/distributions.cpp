#include "lowrate/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lowrate/stats.hpp"

namespace lowrate {

namespace {

double draw_standard_normal(RngStream& g) {
    // Marsaglia polar, stateless: the spare deviate is discarded so a draw
    // depends only on the stream position.
    for (;;) {
        const double u = 2.0 * g.uniform() - 1.0;
        const double v = 2.0 * g.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double draw_gamma(RngStream& g, double k, double lambda) {
    if (k < 1.0) {
        const double u = g.uniform();
        return draw_gamma(g, k + 1.0, lambda) * std::pow(u, 1.0 / k);
    }
    // Marsaglia-Tsang squeeze.
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = draw_standard_normal(g);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = g.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / lambda;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v / lambda;
    }
}

double binom(int n, int j) {
    double r = 1.0;
    for (int i = 1; i <= j; ++i) r = r * (n - j + i) / i;
    return r;
}

// I_j(c) = int_c^inf z^j phi(z) dz via I_j = (j-1) I_{j-2} + c^{j-1} phi(c).
double upper_hermite_integral(int j, double c) {
    const double pc = normal_pdf(c);
    double im2 = normal_cdf(-c);  // I_0
    double im1 = pc;              // I_1
    if (j == 0) return im2;
    if (j == 1) return im1;
    double cur = 0.0;
    for (int m = 2; m <= j; ++m) {
        cur = (m - 1) * im2 + std::pow(c, m - 1) * pc;
        im2 = im1;
        im1 = cur;
    }
    return cur;
}

double gaussian_pos_part(double mu, double sigma, int s) {
    const double c = -mu / sigma;
    double acc = 0.0;
    for (int j = 0; j <= s; ++j)
        acc += binom(s, j) * std::pow(mu, s - j) * std::pow(sigma, j) *
               upper_hermite_integral(j, c);
    return acc;
}

double gamma_raw_moment(double k, double lambda, double s) {
    return std::exp(std::lgamma(k + s) - std::lgamma(k)) / std::pow(lambda, s);
}

double gamma_abs_central(double k, double lambda, int r) {
    const double mu = k / lambda;
    double acc = 0.0;
    for (int j = 0; j <= r; ++j) {
        const double raw = gamma_raw_moment(k, lambda, j);
        const double lower = raw * boost::math::gamma_p(k + j, lambda * mu);
        const double upper = raw - lower;
        acc += binom(r, j) * (std::pow(mu, r - j) * std::pow(-1.0, j) * lower +
                              std::pow(-mu, r - j) * upper);
    }
    return std::max(acc, 0.0);
}

} // namespace

IncrementModel IncrementModel::gaussian_curved(double mu, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("GaussianCurved: c must be > 0");
    IncrementModel m;
    m.family_ = Family::GaussianCurved;
    m.mean_ = mu;
    m.c_ = c;
    m.sd_ = std::sqrt(c) * std::abs(mu);
    return m;
}

IncrementModel IncrementModel::gaussian(double mu, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("Gaussian: sigma must be >= 0");
    IncrementModel m;
    m.family_ = Family::Gaussian;
    m.mean_ = mu;
    m.sd_ = sigma;
    return m;
}

IncrementModel IncrementModel::gamma(double shape_k, double rate_lambda) {
    if (!(shape_k > 0.0) || !(rate_lambda > 0.0))
        throw std::invalid_argument("Gamma: shape and rate must be > 0");
    IncrementModel m;
    m.family_ = Family::Gamma;
    m.k_ = shape_k;
    m.lambda_ = rate_lambda;
    m.mean_ = shape_k / rate_lambda;
    m.sd_ = std::sqrt(shape_k) / rate_lambda;
    return m;
}

IncrementModel IncrementModel::deterministic(double mu) {
    IncrementModel m;
    m.family_ = Family::Deterministic;
    m.mean_ = mu;
    m.sd_ = 0.0;
    return m;
}

IncrementModel IncrementModel::two_point_lattice(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("TwoPointLattice: p must be in [0,1]");
    IncrementModel m;
    m.family_ = Family::TwoPointLattice;
    m.a_ = a;
    m.b_ = b;
    m.p_ = p;
    m.mean_ = p * a + (1.0 - p) * b;
    m.sd_ = std::sqrt(p * (1.0 - p)) * std::abs(a - b);
    return m;
}

bool IncrementModel::positive_support() const {
    switch (family_) {
        case Family::Gamma: return true;
        case Family::Deterministic: return mean_ > 0.0;
        case Family::TwoPointLattice: return a_ > 0.0 && b_ > 0.0;
        default: return false;
    }
}

double IncrementModel::sample(RngStream& stream) const {
    switch (family_) {
        case Family::GaussianCurved:
        case Family::Gaussian:
            if (sd_ == 0.0) return mean_;
            return mean_ + sd_ * draw_standard_normal(stream);
        case Family::Gamma:
            return draw_gamma(stream, k_, lambda_);
        case Family::Deterministic:
            return mean_;
        case Family::TwoPointLattice:
            return stream.uniform() < p_ ? a_ : b_;
    }
    return mean_;
}

std::string IncrementModel::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::GaussianCurved:
            os << "gaussian_curved(mu=" << mean_ << ",c=" << c_ << ")"; break;
        case Family::Gaussian:
            os << "gaussian(mu=" << mean_ << ",sigma=" << sd_ << ")"; break;
        case Family::Gamma:
            os << "gamma(k=" << k_ << ",lambda=" << lambda_ << ")"; break;
        case Family::Deterministic:
            os << "deterministic(mu=" << mean_ << ")"; break;
        case Family::TwoPointLattice:
            os << "two_point(a=" << a_ << ",b=" << b_ << ",p=" << p_ << ")"; break;
    }
    return os.str();
}

MomentSummary moments(const IncrementModel& model) {
    MomentSummary s;
    s.mean = model.mean();
    s.variance = model.variance();
    const double mu = model.mean();
    const double sigma = model.sd();
    switch (model.family()) {
        case Family::GaussianCurved:
        case Family::Gaussian: {
            if (sigma == 0.0) {
                for (int r = 1; r <= 4; ++r) {
                    s.abs_central[r - 1] = 0.0;
                    s.pos_part[r - 1] = std::pow(std::max(mu, 0.0), r);
                }
                break;
            }
            // E|Z|^r moments of the standard normal, r = 1..4.
            const double m[4] = {std::sqrt(2.0 / M_PI), 1.0,
                                 2.0 * std::sqrt(2.0 / M_PI), 3.0};
            for (int r = 1; r <= 4; ++r) {
                s.abs_central[r - 1] = std::pow(sigma, r) * m[r - 1];
                s.pos_part[r - 1] = gaussian_pos_part(mu, sigma, r);
            }
            break;
        }
        case Family::Gamma:
            for (int r = 1; r <= 4; ++r) {
                s.abs_central[r - 1] =
                    gamma_abs_central(model.shape_k(), model.rate_lambda(), r);
                s.pos_part[r - 1] =
                    gamma_raw_moment(model.shape_k(), model.rate_lambda(), r);
            }
            break;
        case Family::Deterministic:
            for (int r = 1; r <= 4; ++r) {
                s.abs_central[r - 1] = 0.0;
                s.pos_part[r - 1] = std::pow(std::max(mu, 0.0), r);
            }
            break;
        case Family::TwoPointLattice: {
            const double a = model.point_a(), b = model.point_b(),
                         p = model.point_p();
            for (int r = 1; r <= 4; ++r) {
                s.abs_central[r - 1] = p * std::pow(std::abs(a - mu), r) +
                                       (1.0 - p) * std::pow(std::abs(b - mu), r);
                s.pos_part[r - 1] = p * std::pow(std::max(a, 0.0), r) +
                                    (1.0 - p) * std::pow(std::max(b, 0.0), r);
            }
            break;
        }
    }
    return s;
}

std::optional<double> rho_closed_form(const IncrementModel& model) {
    const double mu = model.mean();
    if (!(mu > 0.0))
        throw std::invalid_argument("rho_closed_form: requires mu > 0");
    if (model.lattice()) return std::nullopt;
    const double sigma = model.sd();
    if (model.positive_support() || sigma == 0.0)
        return mu / 2.0 + sigma * sigma / (2.0 * mu);
    // Gaussian families.
    double rho = (mu * mu + sigma * sigma) / (2.0 * mu);
    constexpr double kTol = 1e-12;
    constexpr std::size_t kMaxTerms = 10'000'000;
    for (std::size_t n = 1; n <= kMaxTerms; ++n) {
        const double bn = mu * std::sqrt(static_cast<double>(n)) / sigma;
        const double term = sigma *
            (normal_pdf(bn) - bn * normal_cdf(-bn)) /
            std::sqrt(static_cast<double>(n));
        rho -= term;
        if (term < kTol) break;
    }
    return rho;
}

double gaussian_w_constant(double c, double tol) {
    if (!(c > 0.0)) throw std::invalid_argument("gaussian_w_constant: c must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("gaussian_w_constant: tol must be > 0");
    double w = (1.0 + c) / 2.0;
    constexpr std::size_t kMaxTerms = 10'000'000;
    for (std::size_t n = 1; n <= kMaxTerms; ++n) {
        const double rn = std::sqrt(static_cast<double>(n) / c);
        const double term = (normal_pdf(rn) - rn * normal_cdf(-rn)) / rn;
        w -= term;
        if (term < tol) break;
    }
    return w;
}

LadderMoments ladder_height_moments(const IncrementModel& model,
                                    std::size_t reps, RngStream& stream) {
    if (!(model.mean() > 0.0))
        throw std::invalid_argument("ladder_height_moments: requires mu > 0");
    if (reps < 1)
        throw std::invalid_argument("ladder_height_moments: reps must be >= 1");
    RunningStat h1, h2;
    for (std::size_t i = 0; i < reps; ++i) {
        double s = 0.0;
        do {
            s += model.sample(stream);
        } while (s <= 0.0);
        h1.add(s);
        h2.add(s * s);
    }
    LadderMoments out;
    out.m1 = h1.mean();
    out.m2 = h2.mean();
    out.rho_hat = out.m2 / (2.0 * out.m1);
    out.se_m1 = h1.se();
    out.se_m2 = h2.se();
    return out;
}

} // namespace lowrate
