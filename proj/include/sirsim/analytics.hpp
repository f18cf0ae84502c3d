#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sirsim {

// ------------------------------------------------------------------
// Limit laws for extinction times
// ------------------------------------------------------------------

// The closed-form limit CDF families, in standardised coordinates w:
//   finite_start:          (1 + 1/w)^(-i0)                w > 0
//   growing_start:         exp(-1/w)                      w > 0
//   finite_start_gap:      (1 + a/(e^{aw} - 1))^(-i0)     w > 0
//   growing_start_gap:     exp(-a/(e^{aw} - 1))           w > 0
//   gumbel:                exp(-e^{-w})                   w in R
// The first four are 0 for w <= 0; the Gumbel is supported on all of R.
enum class LawShape {
    finite_start,
    growing_start,
    finite_start_gap,
    growing_start_gap,
    gumbel,
};

const char* to_string(LawShape shape);

// A limit CDF together with the normalisation that maps raw time to the
// standardised coordinate: w(t) = t / time_scale - time_shift.
struct AsymptoticLaw {
    LawShape shape = LawShape::gumbel;
    int64_t i0 = 1;      // initial count (finite-start shapes)
    double a = 1.0;      // decay parameter (gap shapes)
    double time_scale = 1.0;
    double time_shift = 0.0;

    // CDF in standardised coordinates.
    double standard_cdf(double w) const;
    // CDF in raw time: P(T <= t) under the limit law.
    double cdf(double t) const;

    static AsymptoticLaw finite_start(int64_t i0);
    static AsymptoticLaw growing_start(double scale);
    static AsymptoticLaw finite_start_gap(double a, int64_t i0);
    static AsymptoticLaw growing_start_gap(double a, double scale);
    static AsymptoticLaw gumbel(double scale, double shift);
};

double asymptotic_cdf(const AsymptoticLaw& law, double t);

// ------------------------------------------------------------------
// Scaling specifications and the case classifier
// ------------------------------------------------------------------

// Power-law parameterisation of a sequence of SIRS models:
//   |1 - lambda(N)| = gap_coef * N^(-gap_exp), sign given by gap_sign
//   gamma(N)        = gamma_coef * N^(-gamma_exp)
//   I0(N)           = ceil(i0_coef * N^i0_exp)
//   R0(N)           = ceil(r0_coef * N^r0_exp),   or ceil(r0_frac * N)
struct ScalingSpec {
    int gap_sign = 1;        // +1: lambda < 1, -1: lambda > 1
    double gap_coef = 1.0;   // > 0
    double gap_exp = 0.0;    // p >= 0; p = 0 means a constant gap
    double gamma_coef = 1.0;
    double gamma_exp = 0.0;  // q >= 0
    double i0_coef = 1.0;
    double i0_exp = 0.0;     // u in [0, 1)
    bool r0_macroscopic = false;
    double r0_coef = 1.0;    // power law: c_R; macroscopic: fraction in (0, 1)
    double r0_exp = 0.0;     // v in [0, 1)

    void validate() const;

    double lambda_at(int64_t n) const;
    double gamma_at(int64_t n) const;
    int64_t i0_at(int64_t n) const;
    int64_t r0_at(int64_t n) const;
};

struct CaseLabel {
    enum class Kind { c1_1, c1_2, c1_3, c2_1, c2_2, boundary, out_of_scope };

    Kind kind = Kind::out_of_scope;
    std::string reason;  // set for boundary / out_of_scope

    std::string name() const;
    bool is_case() const { return kind != Kind::boundary && kind != Kind::out_of_scope; }

    bool operator==(const CaseLabel& other) const { return kind == other.kind; }
};

struct ConditionCheck {
    std::string text;
    bool satisfied = false;
    bool marginal = false;  // exact-zero exponent margin
};

struct Classification {
    CaseLabel label;
    std::vector<ConditionCheck> checks;
};

// Decides which limit law applies to a scaling specification by exponent
// arithmetic on the power laws. Exact-zero margins (where a strict inequality
// degenerates to equality) return `boundary`; regimes no case covers return
// `out_of_scope` with a reason. Total and deterministic.
CaseLabel classify_case(const ScalingSpec& spec);
Classification classify_case_detailed(const ScalingSpec& spec);

// Concrete law for a classified case, with scale/shift evaluated at finite n.
AsymptoticLaw law_for_case(const CaseLabel& label, const ScalingSpec& spec, int64_t n);

// Limit laws for plain linear birth-death sequences, by case index:
//   1: fixed start, gap -> 0           (1 + 1/w)^(-l0)
//   2: fixed start, gap -> a > 0       (1 + a/(e^{aw}-1))^(-l0)
//   3: growing start, l0*gap -> 0      exp(-1/w), time scaled by l0
//   4: growing start, l0*gap -> a > 0  exp(-a/(e^{aw}-1)), time scaled by l0
//   5: growing start, l0*gap -> inf    Gumbel, w = (mu-beta) t - log(l0 (1 - beta/mu))
// Scale and shift are evaluated at the finite (beta, mu, l0) supplied.
AsymptoticLaw bdp_extinction_limit_law(int case_index, double beta, double mu, int64_t l0);

// Alternative normalisation of case 5: w = a t / l0 - log(a / mu).
AsymptoticLaw bdp_extinction_limit_law_alt(double a, double mu, int64_t l0);

// ------------------------------------------------------------------
// Hitting probabilities and occupation bounds
// ------------------------------------------------------------------

// Probability that a linear birth-death chain (birth rate beta per head,
// death rate 1) started at `start` ever reaches `barrier` before 0:
// (beta^-i - 1) / (beta^-k - 1), with the removable singularity at beta = 1
// evaluated as i/k.
double bdp_hit_probability(double beta, int64_t start, int64_t barrier);

// Probability that an immigration-death chain (immigration alpha, death rate
// mu per head, absorbing at 0) started at level l ever reaches 2l:
// sum_{k<l} (mu/alpha)^k k! / sum_{k<2l} (mu/alpha)^k k!, computed in the log
// domain.
double immigration_death_hit_probability(double alpha, double mu, int64_t level);

// Upper bound on P(sup_{t<=t0} L_t >= 2l) for the non-absorbing
// immigration-death chain:
//   (ceil(t0)+1) h_l + (e alpha t0 / (l ceil(t0)))^(l ceil(t0)) e^(-alpha t0).
// Requires l mu / alpha > e. The bound may exceed 1 (then vacuous).
double immigration_death_timed_hit_bound(double alpha, double mu, int64_t level, double t0);

// Occupation integral H(l) = int_0^T L_s ds of a subcritical linear BDP.
double occupation_integral_mean(double beta, double mu, int64_t l0);       // l / (mu - beta)
double occupation_integral_laplace(double beta, double mu, int64_t l0, double a);
double occupation_tail_bound(double beta, double mu, int64_t l0, double delta);  // l / ((mu-beta) delta)

// Upper bound on P(sup_{t<=t1} |R_t/N - R_0/N| > 4 delta) for the SIRS chain
// with macroscopic initial immune fraction r0_frac:
//   2 exp(-delta^2 N / (4 (gamma+1) t1)) + I0 / ((1 - lambda + lambda r0/2) delta N).
// Requires t1 < delta / gamma and 1 - lambda + lambda r0/2 > 0.
double sirs_recovered_excursion_bound(int64_t n_pop, double lambda, double gamma,
                                      int64_t i0, double r0_frac, double delta,
                                      double t1);

// Exact extinction-time CDF of a linear birth-death chain:
//   (mu (e^{(mu-beta)t} - 1) / (mu e^{(mu-beta)t} - beta))^l0   for beta != mu
//   (mu t / (1 + mu t))^l0                                       for beta == mu
double bdp_extinction_cdf(double beta, double mu, int64_t l0, double t);

}  // namespace sirsim
