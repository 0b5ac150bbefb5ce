#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace bubblelator {

/// A number read from user input, kept as an exact rational when possible.
///
/// "1/3", "0.25" and "2" parse exactly; anything else (exponents, very long
/// decimals) falls back to a double and is flagged inexact.
class Fraction {
public:
    Fraction() = default;
    Fraction(std::int64_t num, std::int64_t den = 1);
    static Fraction from_double(double v);
    static Fraction parse(std::string_view text);

    bool is_exact() const { return exact_; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : approx_; }
    std::string str() const;

    friend Fraction operator+(const Fraction& a, const Fraction& b);
    friend Fraction operator-(const Fraction& a, const Fraction& b);
    friend Fraction operator*(const Fraction& a, const Fraction& b);
    friend Fraction operator/(const Fraction& a, const Fraction& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    double approx_ = 0.0;
    bool exact_ = true;
};

/// Raw, unvalidated inputs.  Defaults are the oscillating regime
/// alpha = 1/3, gamma = 1/3, r = 2/3, eta = 0.1.
struct ParameterSet {
    Fraction alpha{1, 3};
    Fraction gamma{1, 3};
    Fraction r{2, 3};
    double q = 1.0;
    double epsilon = 0.1;
    double eta = 0.1;
    double source = 0.0;
    double removal = 0.0;

    // Apply one `key = value` assignment; unknown keys throw ParameterError.
    void set(std::string_view key, std::string_view value);
};

// Parses `key = value` lines with '#' comments into `base`.
ParameterSet load_parameter_file(const std::filesystem::path& path, ParameterSet base = {});
ParameterSet parse_parameter_text(std::string_view text, ParameterSet base = {});

/// Validated model parameters.  Immutable once built.
class ModelParams {
public:
    explicit ModelParams(const ParameterSet& p);
    ModelParams() : ModelParams(ParameterSet{}) {}

    const ParameterSet& inputs() const { return p_; }
    double alpha() const { return p_.alpha.value(); }
    double gamma() const { return p_.gamma.value(); }
    double r() const { return p_.r.value(); }
    double q() const { return p_.q; }
    double epsilon() const { return p_.epsilon; }
    double eta() const { return p_.eta; }
    double source() const { return p_.source; }
    double removal() const { return p_.removal; }

    // beta = r/(1-alpha), nu = alpha/(1-alpha), exact when the inputs are.
    Fraction beta_exact() const { return p_.r / (Fraction(1) - p_.alpha); }
    Fraction nu_exact() const { return p_.alpha / (Fraction(1) - p_.alpha); }
    double beta() const { return beta_exact().value(); }
    double nu() const { return nu_exact().value(); }

    // (q/eps)^(1/gamma)
    double k_crit() const;

private:
    ParameterSet p_;
};

/// Inverse of the exponent map: alpha = nu/(1+nu), r = beta (1-alpha).
struct ExponentPair {
    double alpha;
    double r;
};
ExponentPair exponents_from_beta_nu(double beta, double nu);

/// Logarithm of a positive quantity that may not fit in a double.
struct LogValue {
    double log = 0.0;
    double nominal() const { return std::exp(log); }
    double log10() const { return log / std::log(10.0); }
};

struct ScaleSet {
    double k_crit;
    LogValue J_inf;
    LogValue X;   // size unit
    LogValue T;   // time unit
    LogValue F;   // density unit
    LogValue S;   // source rate
    LogValue R;   // removal rate
};

// log of sqrt(gamma/(2 pi q^(1/gamma))) eps^((gamma+1)/(2gamma)) exp(-gamma/(1-gamma) q^(1/gamma) eps^(1-1/gamma))
double log_arrhenius_flux(double epsilon, double gamma, double q);

ScaleSet compute_scales(const ModelParams& params);

// u = (n1 - 1 - eps) k_crit and back.
double monomer_rescale(double n1, const ModelParams& params);
double monomer_unscale(double u, const ModelParams& params);

}  // namespace bubblelator
