#include "sirsim/analytics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sirsim {

// ------------------------------------------------------------------
// Limit laws
// ------------------------------------------------------------------

const char* to_string(LawShape shape) {
    switch (shape) {
        case LawShape::finite_start: return "finite_start";
        case LawShape::growing_start: return "growing_start";
        case LawShape::finite_start_gap: return "finite_start_gap";
        case LawShape::growing_start_gap: return "growing_start_gap";
        case LawShape::gumbel: return "gumbel";
    }
    return "unknown";
}

double AsymptoticLaw::standard_cdf(double w) const {
    switch (shape) {
        case LawShape::finite_start:
            if (w <= 0.0) return 0.0;
            return std::exp(-static_cast<double>(i0) * std::log1p(1.0 / w));
        case LawShape::growing_start:
            if (w <= 0.0) return 0.0;
            return std::exp(-1.0 / w);
        case LawShape::finite_start_gap: {
            if (w <= 0.0) return 0.0;
            const double x = a / std::expm1(a * w);
            return std::exp(-static_cast<double>(i0) * std::log1p(x));
        }
        case LawShape::growing_start_gap:
            if (w <= 0.0) return 0.0;
            return std::exp(-a / std::expm1(a * w));
        case LawShape::gumbel:
            return std::exp(-std::exp(-w));
    }
    return 0.0;
}

double AsymptoticLaw::cdf(double t) const { return standard_cdf(t / time_scale - time_shift); }

double asymptotic_cdf(const AsymptoticLaw& law, double t) { return law.cdf(t); }

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

// ceil that forgives the rounding error of pow: N^(1/4) evaluated as
// 10.000000000000002 must still index as 10, not 11.
int64_t ceil_index(double x) {
    const double r = std::round(x);
    if (std::fabs(x - r) < 1e-9 * std::max(1.0, std::fabs(x)))
        return static_cast<int64_t>(r);
    return static_cast<int64_t>(std::ceil(x));
}

}  // namespace

AsymptoticLaw AsymptoticLaw::finite_start(int64_t i0) {
    require(i0 >= 1, "AsymptoticLaw: i0 must be >= 1");
    AsymptoticLaw law;
    law.shape = LawShape::finite_start;
    law.i0 = i0;
    return law;
}

AsymptoticLaw AsymptoticLaw::growing_start(double scale) {
    require(scale > 0.0, "AsymptoticLaw: time scale must be > 0");
    AsymptoticLaw law;
    law.shape = LawShape::growing_start;
    law.time_scale = scale;
    return law;
}

AsymptoticLaw AsymptoticLaw::finite_start_gap(double a, int64_t i0) {
    require(a > 0.0, "AsymptoticLaw: a must be > 0");
    require(i0 >= 1, "AsymptoticLaw: i0 must be >= 1");
    AsymptoticLaw law;
    law.shape = LawShape::finite_start_gap;
    law.a = a;
    law.i0 = i0;
    return law;
}

AsymptoticLaw AsymptoticLaw::growing_start_gap(double a, double scale) {
    require(a > 0.0, "AsymptoticLaw: a must be > 0");
    require(scale > 0.0, "AsymptoticLaw: time scale must be > 0");
    AsymptoticLaw law;
    law.shape = LawShape::growing_start_gap;
    law.a = a;
    law.time_scale = scale;
    return law;
}

AsymptoticLaw AsymptoticLaw::gumbel(double scale, double shift) {
    require(scale > 0.0, "AsymptoticLaw: time scale must be > 0");
    AsymptoticLaw law;
    law.shape = LawShape::gumbel;
    law.time_scale = scale;
    law.time_shift = shift;
    return law;
}

// ------------------------------------------------------------------
// Scaling specifications
// ------------------------------------------------------------------

void ScalingSpec::validate() const {
    require(gap_sign == 1 || gap_sign == -1, "ScalingSpec: gap_sign must be +1 or -1");
    require(gap_coef > 0.0 && std::isfinite(gap_coef), "ScalingSpec: gap_coef must be > 0");
    require(gap_exp >= 0.0 && std::isfinite(gap_exp), "ScalingSpec: gap_exp must be >= 0");
    if (gap_exp == 0.0 && gap_sign == 1)
        require(gap_coef < 1.0, "ScalingSpec: constant gap needs gap_coef < 1 for lambda > 0");
    require(gamma_coef > 0.0 && std::isfinite(gamma_coef), "ScalingSpec: gamma_coef must be > 0");
    require(gamma_exp >= 0.0 && std::isfinite(gamma_exp), "ScalingSpec: gamma_exp must be >= 0");
    require(i0_coef > 0.0 && std::isfinite(i0_coef), "ScalingSpec: i0_coef must be > 0");
    require(i0_exp >= 0.0 && i0_exp < 1.0, "ScalingSpec: i0_exp must lie in [0, 1)");
    if (r0_macroscopic) {
        require(r0_coef > 0.0 && r0_coef < 1.0,
                "ScalingSpec: macroscopic fraction must lie in (0, 1)");
    } else {
        require(r0_coef > 0.0 && std::isfinite(r0_coef), "ScalingSpec: r0_coef must be > 0");
        require(r0_exp >= 0.0 && r0_exp < 1.0, "ScalingSpec: r0_exp must lie in [0, 1)");
    }
}

double ScalingSpec::lambda_at(int64_t n) const {
    const double gap = gap_coef * std::pow(static_cast<double>(n), -gap_exp);
    const double lambda = 1.0 - static_cast<double>(gap_sign) * gap;
    require(lambda > 0.0, "ScalingSpec: lambda(n) must be > 0 at the requested n");
    return lambda;
}

double ScalingSpec::gamma_at(int64_t n) const {
    return gamma_coef * std::pow(static_cast<double>(n), -gamma_exp);
}

int64_t ScalingSpec::i0_at(int64_t n) const {
    return ceil_index(i0_coef * std::pow(static_cast<double>(n), i0_exp));
}

int64_t ScalingSpec::r0_at(int64_t n) const {
    if (r0_macroscopic)
        return static_cast<int64_t>(std::llround(r0_coef * static_cast<double>(n)));
    return ceil_index(r0_coef * std::pow(static_cast<double>(n), r0_exp));
}

std::string CaseLabel::name() const {
    switch (kind) {
        case Kind::c1_1: return "C1_1";
        case Kind::c1_2: return "C1_2";
        case Kind::c1_3: return "C1_3";
        case Kind::c2_1: return "C2_1";
        case Kind::c2_2: return "C2_2";
        case Kind::boundary: return "boundary";
        case Kind::out_of_scope: return "out_of_scope";
    }
    return "unknown";
}

// ------------------------------------------------------------------
// Classifier
// ------------------------------------------------------------------

namespace {

constexpr double kMarginTol = 1e-12;

enum class Cmp { holds, marginal, fails };

Cmp strictly_less(double lhs, double rhs) {
    if (std::fabs(lhs - rhs) <= kMarginTol) return Cmp::marginal;
    return lhs < rhs ? Cmp::holds : Cmp::fails;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

ConditionCheck check_of(std::string text, Cmp cmp) {
    ConditionCheck c;
    c.text = std::move(text);
    c.satisfied = cmp == Cmp::holds;
    c.marginal = cmp == Cmp::marginal;
    return c;
}

// Applies the shared resolution rule: all conditions strict -> the case
// label; any strict failure -> out_of_scope; otherwise an exact margin ->
// boundary.
CaseLabel resolve(CaseLabel::Kind kind, const std::vector<ConditionCheck>& checks) {
    for (const auto& c : checks)
        if (!c.satisfied && !c.marginal)
            return {CaseLabel::Kind::out_of_scope, "condition fails: " + c.text};
    for (const auto& c : checks)
        if (c.marginal)
            return {CaseLabel::Kind::boundary, "exact-zero margin: " + c.text};
    return {kind, ""};
}

}  // namespace

Classification classify_case_detailed(const ScalingSpec& spec) {
    spec.validate();

    const double p = spec.gap_exp;
    const double q = spec.gamma_exp;
    const double u = spec.i0_exp;
    const bool subcritical = spec.gap_sign == 1;

    Classification out;

    if (spec.r0_macroscopic) {
        if (!subcritical) {
            out.label = {CaseLabel::Kind::out_of_scope, "supercritical beyond Case 1.1"};
            return out;
        }
        // Immune fraction of order N: the gamma decay must be polynomial.
        out.checks.push_back(
            check_of("gamma vanishes polynomially (q > 0): q = " + fmt(q), strictly_less(0.0, q)));
        const auto kind = (u <= kMarginTol) ? CaseLabel::Kind::c2_1 : CaseLabel::Kind::c2_2;
        out.label = resolve(kind, out.checks);
        return out;
    }

    const double v = spec.r0_exp;
    const Cmp product = strictly_less(u, p);  // exponent of I0 |1 - lambda|

    if (product == Cmp::holds) {
        // Vanishing product I0 |1 - lambda|; admissible for lambda on either
        // side of 1.
        out.checks.push_back(check_of(
            "I0 R0 small (u + v < 1): u + v = " + fmt(u + v), strictly_less(u + v, 1.0)));
        out.checks.push_back(
            check_of("I0 below the gamma barrier (u < (1 - q)/2): u = " + fmt(u) +
                         ", (1 - q)/2 = " + fmt((1.0 - q) / 2.0),
                     strictly_less(u, (1.0 - q) / 2.0)));
        out.label = resolve(CaseLabel::Kind::c1_1, out.checks);
        return out;
    }

    if (!subcritical) {
        out.label = {CaseLabel::Kind::out_of_scope, "supercritical beyond Case 1.1"};
        return out;
    }

    if (product == Cmp::marginal) {
        // I0 (1 - lambda) -> positive constant.
        out.checks.push_back(check_of(
            "I0 R0 small (u + v < 1): u + v = " + fmt(u + v), strictly_less(u + v, 1.0)));
        out.checks.push_back(
            check_of("I0 below the gamma barrier (u < (1 - q)/2): u = " + fmt(u) +
                         ", (1 - q)/2 = " + fmt((1.0 - q) / 2.0),
                     strictly_less(u, (1.0 - q) / 2.0)));
        out.label = resolve(CaseLabel::Kind::c1_2, out.checks);
        return out;
    }

    // Diverging product I0 (1 - lambda). Logarithmic factors in these
    // conditions vanish under strict power-law inequalities; exact equalities
    // are margins the classifier cannot resolve.
    out.checks.push_back(check_of("I0 small against N (1-lambda) gamma (u < 1 - p - q): u = " +
                                      fmt(u) + ", 1 - p - q = " + fmt(1.0 - p - q),
                                  strictly_less(u, 1.0 - p - q)));
    out.checks.push_back(check_of(
        "R0 small against N (1-lambda) (v < 1 - p): v = " + fmt(v) + ", 1 - p = " + fmt(1.0 - p),
        strictly_less(v, 1.0 - p)));
    out.label = resolve(CaseLabel::Kind::c1_3, out.checks);
    return out;
}

CaseLabel classify_case(const ScalingSpec& spec) { return classify_case_detailed(spec).label; }

AsymptoticLaw law_for_case(const CaseLabel& label, const ScalingSpec& spec, int64_t n) {
    spec.validate();
    require(n >= 1, "law_for_case: n must be >= 1");
    if (!label.is_case())
        throw std::invalid_argument("law_for_case: no law for label " + label.name());

    const bool growing = spec.i0_exp > kMarginTol;
    const double gap_n = spec.gap_coef * std::pow(static_cast<double>(n), -spec.gap_exp);
    const int64_t i0_n = spec.i0_at(n);

    // Limit of 1 - lambda + lambda r0 for the macroscopic cases.
    const auto macroscopic_a = [&] {
        const double lambda_inf =
            spec.gap_exp == 0.0 ? 1.0 - spec.gap_sign * spec.gap_coef : 1.0;
        return (1.0 - lambda_inf) + lambda_inf * spec.r0_coef;
    };

    switch (label.kind) {
        case CaseLabel::Kind::c1_1:
            if (growing) return AsymptoticLaw::growing_start(static_cast<double>(i0_n));
            return AsymptoticLaw::finite_start(i0_n);
        case CaseLabel::Kind::c1_2: {
            const double a =
                growing ? spec.i0_coef * spec.gap_coef : static_cast<double>(i0_n) * spec.gap_coef;
            if (growing) return AsymptoticLaw::growing_start_gap(a, static_cast<double>(i0_n));
            return AsymptoticLaw::finite_start_gap(a, i0_n);
        }
        case CaseLabel::Kind::c1_3:
            return AsymptoticLaw::gumbel(1.0 / gap_n,
                                         std::log(gap_n * static_cast<double>(i0_n)));
        case CaseLabel::Kind::c2_1:
            return AsymptoticLaw::finite_start_gap(macroscopic_a(), i0_n);
        case CaseLabel::Kind::c2_2: {
            const double a = macroscopic_a();
            return AsymptoticLaw::gumbel(1.0 / a, std::log(a * static_cast<double>(i0_n)));
        }
        default:
            throw std::invalid_argument("law_for_case: no law for label " + label.name());
    }
}

AsymptoticLaw bdp_extinction_limit_law(int case_index, double beta, double mu, int64_t l0) {
    require(mu > 0.0, "bdp_extinction_limit_law: mu must be > 0");
    require(beta >= 0.0, "bdp_extinction_limit_law: beta must be >= 0");
    require(l0 >= 1, "bdp_extinction_limit_law: l0 must be >= 1");
    switch (case_index) {
        case 1:
            return AsymptoticLaw::finite_start(l0);
        case 2:
            require(mu > beta, "bdp_extinction_limit_law: case 2 needs mu > beta");
            return AsymptoticLaw::finite_start_gap(mu - beta, l0);
        case 3:
            return AsymptoticLaw::growing_start(static_cast<double>(l0));
        case 4:
            require(mu > beta, "bdp_extinction_limit_law: case 4 needs mu > beta");
            return AsymptoticLaw::growing_start_gap((mu - beta) * static_cast<double>(l0),
                                                    static_cast<double>(l0));
        case 5:
            require(mu > beta, "bdp_extinction_limit_law: case 5 needs mu > beta");
            return AsymptoticLaw::gumbel(
                1.0 / (mu - beta), std::log(static_cast<double>(l0) * (1.0 - beta / mu)));
        default:
            throw std::invalid_argument("bdp_extinction_limit_law: case index must be 1..5");
    }
}

AsymptoticLaw bdp_extinction_limit_law_alt(double a, double mu, int64_t l0) {
    require(a > 0.0, "bdp_extinction_limit_law_alt: a must be > 0");
    require(mu > 0.0, "bdp_extinction_limit_law_alt: mu must be > 0");
    require(l0 >= 1, "bdp_extinction_limit_law_alt: l0 must be >= 1");
    return AsymptoticLaw::gumbel(static_cast<double>(l0) / a, std::log(a / mu));
}

// ------------------------------------------------------------------
// Hitting probabilities and bounds
// ------------------------------------------------------------------

double bdp_hit_probability(double beta, int64_t start, int64_t barrier) {
    require(beta > 0.0 && std::isfinite(beta), "bdp_hit_probability: beta must be > 0");
    require(barrier >= 1, "bdp_hit_probability: barrier must be >= 1");
    require(start >= 0 && start <= barrier, "bdp_hit_probability: need 0 <= start <= barrier");
    if (start == 0) return 0.0;
    if (start == barrier) return 1.0;

    if (std::fabs(1.0 - beta) < 1e-6) {
        // Removable singularity at beta = 1: h_i = sum_{j<i} beta^-j / sum_{j<k} beta^-j.
        double num = 0.0;
        double den = 0.0;
        double term = 1.0;
        const double inv_beta = 1.0 / beta;
        for (int64_t j = 0; j < barrier; ++j) {
            if (j < start) num += term;
            den += term;
            term *= inv_beta;
        }
        return num / den;
    }

    const double xi = -static_cast<double>(start) * std::log(beta);
    const double xk = -static_cast<double>(barrier) * std::log(beta);
    if (xk <= 700.0) return std::expm1(xi) / std::expm1(xk);
    // Large subcritical barriers overflow e^xk; factor the ratio instead.
    return std::exp(xi - xk) * (-std::expm1(-xi)) / (-std::expm1(-xk));
}

double immigration_death_hit_probability(double alpha, double mu, int64_t level) {
    require(alpha > 0.0 && std::isfinite(alpha),
            "immigration_death_hit_probability: alpha must be > 0");
    require(mu > 0.0 && std::isfinite(mu), "immigration_death_hit_probability: mu must be > 0");
    require(level >= 1, "immigration_death_hit_probability: level must be >= 1");

    // Terms (mu/alpha)^k k! overflow quickly; accumulate in the log domain.
    const double log_ratio = std::log(mu / alpha);
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> log_terms(static_cast<size_t>(2 * level));
    for (int64_t k = 0; k < 2 * level; ++k) {
        const double lt = static_cast<double>(k) * log_ratio + std::lgamma(static_cast<double>(k) + 1.0);
        log_terms[static_cast<size_t>(k)] = lt;
        max_term = std::max(max_term, lt);
    }
    double num = 0.0;
    double den = 0.0;
    for (int64_t k = 0; k < 2 * level; ++k) {
        const double e = std::exp(log_terms[static_cast<size_t>(k)] - max_term);
        if (k < level) num += e;
        den += e;
    }
    return num / den;
}

double immigration_death_timed_hit_bound(double alpha, double mu, int64_t level, double t0) {
    require(t0 > 0.0 && std::isfinite(t0),
            "immigration_death_timed_hit_bound: t0 must be > 0");
    const double regime = static_cast<double>(level) * mu / alpha;
    if (!(regime > std::exp(1.0)))
        throw std::invalid_argument(
            "immigration_death_timed_hit_bound: requires level * mu / alpha > e");

    const double h = immigration_death_hit_probability(alpha, mu, level);
    const double ceil_t0 = std::ceil(t0);
    const double crossings_term = (ceil_t0 + 1.0) * h;

    // Poisson tail (e alpha t0 / m)^m e^(-alpha t0) with m = level * ceil(t0).
    const double m = static_cast<double>(level) * ceil_t0;
    const double log_tail = m * (1.0 + std::log(alpha * t0) - std::log(m)) - alpha * t0;
    return crossings_term + std::exp(log_tail);
}

double occupation_integral_mean(double beta, double mu, int64_t l0) {
    require(beta >= 0.0, "occupation_integral_mean: beta must be >= 0");
    require(mu > beta, "occupation_integral_mean: requires mu > beta");
    require(l0 >= 0, "occupation_integral_mean: l0 must be >= 0");
    return static_cast<double>(l0) / (mu - beta);
}

double occupation_integral_laplace(double beta, double mu, int64_t l0, double a) {
    require(beta >= 0.0, "occupation_integral_laplace: beta must be >= 0");
    require(mu > beta, "occupation_integral_laplace: requires mu > beta");
    require(l0 >= 0, "occupation_integral_laplace: l0 must be >= 0");
    require(a >= 0.0, "occupation_integral_laplace: a must be >= 0");
    if (l0 == 0) return 1.0;
    if (beta == 0.0) return std::pow(mu / (mu + a), static_cast<double>(l0));
    // Discriminant written as (mu + a - beta)^2 + 4 a beta to avoid cancellation.
    const double d = std::sqrt((mu + a - beta) * (mu + a - beta) + 4.0 * a * beta);
    const double root = (beta + mu + a - d) / (2.0 * beta);
    return std::pow(root, static_cast<double>(l0));
}

double occupation_tail_bound(double beta, double mu, int64_t l0, double delta) {
    require(delta > 0.0, "occupation_tail_bound: delta must be > 0");
    return occupation_integral_mean(beta, mu, l0) / delta;
}

double sirs_recovered_excursion_bound(int64_t n_pop, double lambda, double gamma, int64_t i0,
                                      double r0_frac, double delta, double t1) {
    require(n_pop >= 1, "sirs_recovered_excursion_bound: n_pop must be >= 1");
    require(lambda > 0.0, "sirs_recovered_excursion_bound: lambda must be > 0");
    require(gamma > 0.0, "sirs_recovered_excursion_bound: gamma must be > 0");
    require(i0 >= 0, "sirs_recovered_excursion_bound: i0 must be >= 0");
    require(r0_frac > 0.0 && r0_frac < 1.0,
            "sirs_recovered_excursion_bound: r0_frac must lie in (0, 1)");
    require(delta > 0.0, "sirs_recovered_excursion_bound: delta must be > 0");
    if (!(t1 > 0.0 && t1 < delta / gamma))
        throw std::invalid_argument(
            "sirs_recovered_excursion_bound: requires 0 < t1 < delta / gamma");
    const double denom = 1.0 - lambda + lambda * r0_frac / 2.0;
    if (!(denom > 0.0))
        throw std::invalid_argument(
            "sirs_recovered_excursion_bound: requires 1 - lambda + lambda r0/2 > 0");

    const double n = static_cast<double>(n_pop);
    const double martingale_term =
        2.0 * std::exp(-delta * delta * n / (4.0 * (gamma + 1.0) * t1));
    const double integral_term = static_cast<double>(i0) / (denom * delta * n);
    return martingale_term + integral_term;
}

double bdp_extinction_cdf(double beta, double mu, int64_t l0, double t) {
    require(beta >= 0.0 && std::isfinite(beta), "bdp_extinction_cdf: beta must be >= 0");
    require(mu > 0.0 && std::isfinite(mu), "bdp_extinction_cdf: mu must be > 0");
    require(l0 >= 0, "bdp_extinction_cdf: l0 must be >= 0");
    require(t >= 0.0, "bdp_extinction_cdf: t must be >= 0");
    if (l0 == 0) return 1.0;
    if (t == 0.0) return 0.0;
    if (!std::isfinite(t)) return beta > mu ? std::pow(mu / beta, static_cast<double>(l0)) : 1.0;

    double base;
    if (beta == mu) {
        base = mu * t / (1.0 + mu * t);
    } else if (mu > beta) {
        const double x = std::exp(-(mu - beta) * t);  // in (0, 1]
        base = mu * (1.0 - x) / (mu - beta * x);
    } else {
        const double y = std::exp((mu - beta) * t);  // in (0, 1]
        base = mu * (1.0 - y) / (beta - mu * y);
    }
    return std::pow(base, static_cast<double>(l0));
}

}  // namespace sirsim
