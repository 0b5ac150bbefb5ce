#include "bubblelator/model_params.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bubblelator/errors.hpp"

namespace bubblelator {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, std::int64_t& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

double parse_double(std::string_view s) {
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParameterError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

Fraction::Fraction(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ParameterError("fraction with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const auto g = std::gcd(num, den);
    num_ = num / (g == 0 ? 1 : g);
    den_ = den / (g == 0 ? 1 : g);
}

Fraction Fraction::from_double(double v) {
    Fraction f;
    f.exact_ = false;
    f.approx_ = v;
    return f;
}

Fraction Fraction::parse(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ParameterError("empty number");

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto n = trim(text.substr(0, slash));
        const auto d = trim(text.substr(slash + 1));
        std::int64_t ni = 0;
        std::int64_t di = 0;
        if (parse_int(n, ni) && parse_int(d, di)) return Fraction(ni, di);
        const double dd = parse_double(d);
        if (dd == 0.0) throw ParameterError("fraction with zero denominator: '" + std::string(text) + "'");
        return from_double(parse_double(n) / dd);
    }

    std::int64_t ni = 0;
    if (parse_int(text, ni)) return Fraction(ni, 1);

    // Plain decimal "ddd.ddd": exact as n / 10^k while it fits.
    if (text.find_first_of("eEnNiI") == std::string_view::npos) {
        const auto dot = text.find('.');
        if (dot != std::string_view::npos) {
            std::string digits(text.substr(0, dot));
            const auto frac = text.substr(dot + 1);
            digits += frac;
            if (frac.size() <= 15 && digits.size() <= 18 && parse_int(digits, ni)) {
                std::int64_t den = 1;
                for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
                return Fraction(ni, den);
            }
        }
    }
    return from_double(parse_double(text));
}

std::string Fraction::str() const {
    if (!exact_) {
        std::ostringstream os;
        os.precision(17);
        os << approx_;
        return os.str();
    }
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

namespace {

template <class Op, class DOp>
Fraction combine(const Fraction& a, const Fraction& b, Op exact_op, DOp double_op) {
    if (a.is_exact() && b.is_exact()) {
        __int128 n = 0;
        __int128 d = 0;
        exact_op(a, b, n, d);
        if (d < 0) {
            n = -n;
            d = -d;
        }
        if (d == 0) throw ParameterError("division by zero in parameter arithmetic");
        __int128 x = n < 0 ? -n : n;
        __int128 y = d;
        while (y != 0) {
            const __int128 t = x % y;
            x = y;
            y = t;
        }
        if (x > 1) {
            n /= x;
            d /= x;
        }
        constexpr auto lim = static_cast<__int128>(std::numeric_limits<std::int64_t>::max());
        if (n <= lim && n >= -lim && d <= lim) {
            return Fraction(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
        }
    }
    return Fraction::from_double(double_op(a.value(), b.value()));
}

}  // namespace

Fraction operator+(const Fraction& a, const Fraction& b) {
    return combine(
        a, b,
        [](const Fraction& x, const Fraction& y, __int128& n, __int128& d) {
            n = static_cast<__int128>(x.num()) * y.den() + static_cast<__int128>(y.num()) * x.den();
            d = static_cast<__int128>(x.den()) * y.den();
        },
        [](double x, double y) { return x + y; });
}

Fraction operator-(const Fraction& a, const Fraction& b) {
    return combine(
        a, b,
        [](const Fraction& x, const Fraction& y, __int128& n, __int128& d) {
            n = static_cast<__int128>(x.num()) * y.den() - static_cast<__int128>(y.num()) * x.den();
            d = static_cast<__int128>(x.den()) * y.den();
        },
        [](double x, double y) { return x - y; });
}

Fraction operator*(const Fraction& a, const Fraction& b) {
    return combine(
        a, b,
        [](const Fraction& x, const Fraction& y, __int128& n, __int128& d) {
            n = static_cast<__int128>(x.num()) * y.num();
            d = static_cast<__int128>(x.den()) * y.den();
        },
        [](double x, double y) { return x * y; });
}

Fraction operator/(const Fraction& a, const Fraction& b) {
    if (b.value() == 0.0) throw ParameterError("division by zero in parameter arithmetic");
    return combine(
        a, b,
        [](const Fraction& x, const Fraction& y, __int128& n, __int128& d) {
            n = static_cast<__int128>(x.num()) * y.den();
            d = static_cast<__int128>(x.den()) * y.num();
        },
        [](double x, double y) { return x / y; });
}

void ParameterSet::set(std::string_view key, std::string_view value) {
    key = trim(key);
    const auto v = Fraction::parse(value);
    if (key == "alpha") alpha = v;
    else if (key == "gamma") gamma = v;
    else if (key == "r") r = v;
    else if (key == "q") q = v.value();
    else if (key == "epsilon") epsilon = v.value();
    else if (key == "eta") eta = v.value();
    else if (key == "S" || key == "source") source = v.value();
    else if (key == "R" || key == "removal") removal = v.value();
    else throw ParameterError("unknown parameter '" + std::string(key) + "'");
}

ParameterSet parse_parameter_text(std::string_view text, ParameterSet base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParameterError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        base.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

ParameterSet load_parameter_file(const std::filesystem::path& path, ParameterSet base) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_parameter_text(buf.str(), base);
}

ModelParams::ModelParams(const ParameterSet& p) : p_(p) {
    const double a = p.alpha.value();
    const double g = p.gamma.value();
    if (!(a >= 0.0 && a < 1.0)) throw ParameterError("alpha must lie in [0,1)");
    if (!(g > 0.0 && g < 1.0)) throw ParameterError("gamma must lie in (0,1)");
    if (!(p.q > 0.0) || !std::isfinite(p.q)) throw ParameterError("q must be positive");
    if (!(p.r.value() >= 0.0)) throw ParameterError("r must be nonnegative");
    if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) throw ParameterError("epsilon must be positive");
    if (!(p.eta > 0.0) || !std::isfinite(p.eta)) throw ParameterError("eta must be positive");
    if (!(p.source >= 0.0)) throw ParameterError("source must be nonnegative");
    if (!(p.removal >= 0.0)) throw ParameterError("removal must be nonnegative");
}

double ModelParams::k_crit() const { return std::pow(p_.q / p_.epsilon, 1.0 / gamma()); }

ExponentPair exponents_from_beta_nu(double beta, double nu) {
    if (!(beta >= 0.0) || !(nu >= 0.0)) throw ParameterError("beta and nu must be nonnegative");
    const double alpha = nu / (1.0 + nu);
    return {alpha, beta * (1.0 - alpha)};
}

double log_arrhenius_flux(double epsilon, double gamma, double q) {
    const double q_pow = std::pow(q, 1.0 / gamma);
    return 0.5 * std::log(gamma / (2.0 * std::numbers::pi * q_pow)) +
           (gamma + 1.0) / (2.0 * gamma) * std::log(epsilon) -
           gamma / (1.0 - gamma) * q_pow * std::pow(epsilon, -(1.0 - gamma) / gamma);
}

ScaleSet compute_scales(const ModelParams& params) {
    const double eps = params.epsilon();
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("compute_scales: epsilon must lie in (0,1)");
    const double alpha = params.alpha();
    const double gamma = params.gamma();
    const double q = params.q();

    ScaleSet s{};
    s.k_crit = params.k_crit();
    const double log_k = (std::log(q) - std::log(eps)) / gamma;
    s.J_inf.log = log_arrhenius_flux(eps, gamma, q);
    s.X.log = (std::log(eps) - log_k - s.J_inf.log) / (2.0 - alpha);
    s.T.log = (1.0 - alpha) * s.X.log - std::log(eps);
    // Density unit chosen so that the boundary flux becomes e^u and the
    // condensation term in the monomer balance has unit coefficient.
    s.F.log = -log_k - 2.0 * s.X.log;
    s.S.log = -s.T.log - log_k;
    s.R.log = std::log(params.eta()) - s.T.log - params.r() * s.X.log;

    for (double v : {s.J_inf.log, s.X.log, s.T.log, s.F.log, s.S.log, s.R.log}) {
        if (!std::isfinite(v)) throw ParameterError("compute_scales: scale outside representable range");
    }
    return s;
}

double monomer_rescale(double n1, const ModelParams& params) {
    return ((n1 - 1.0) - params.epsilon()) * params.k_crit();
}

double monomer_unscale(double u, const ModelParams& params) {
    return 1.0 + (params.epsilon() + u / params.k_crit());
}

}  // namespace bubblelator
