#include "oe/omega.hpp"

#include <cmath>

#include "oe/rational.hpp"
#include <sstream>

namespace oe {

namespace {

double check_finite(double v) {
    if (!std::isfinite(v)) throw OmegaOverflowError("omega value out of double range");
    return v;
}

double to_double_checked(const mpz_class& n) {
    double d = n.get_d();
    if (!std::isfinite(d)) throw OmegaOverflowError("argument out of double range");
    return d;
}

}  // namespace

OmegaFn::OmegaFn(Family f, mpq_class p, mpq_class q, std::vector<double> tab)
    : family_(f), p_(std::move(p)), q_(std::move(q)), table_(std::move(tab)) {}

OmegaFn OmegaFn::power(const mpq_class& p) {
    if (p <= 0 || p > 1) throw Error("Power: need 0 < p <= 1");
    return OmegaFn(Family::Power, p, 0, {});
}

OmegaFn OmegaFn::power_log(const mpq_class& p, const mpq_class& q) {
    if (p <= 0 || p > 1) throw Error("PowerLog: need 0 < p <= 1");
    OmegaFn f(Family::PowerLog, p, q, {});
    // monotonicity is analytic for q >= 0; for q < 0 reject shapes that dip
    if (q < 0) {
        double prev = f.eval(std::uint64_t{0});
        for (std::uint64_t n = 1; n <= (1u << 20); n = n < 64 ? n + 1 : n + n / 2) {
            double cur = f.eval(n);
            if (cur + 1e-12 < prev) throw Error("PowerLog: not non-decreasing for these (p, q)");
            prev = cur;
        }
    }
    return f;
}

OmegaFn OmegaFn::log() { return OmegaFn(Family::Log, 0, 0, {}); }

OmegaFn OmegaFn::constant(const mpq_class& c) {
    if (c < 0) throw Error("Constant: need c >= 0");
    return OmegaFn(Family::Constant, c, 0, {});
}

OmegaFn OmegaFn::table(std::vector<double> values) {
    if (values.empty()) throw Error("Table: need at least one value");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0)) throw Error("Table: values must be non-negative");
        if (i > 0 && values[i] < values[i - 1]) throw Error("Table: values must be non-decreasing");
    }
    return OmegaFn(Family::Table, 0, 0, std::move(values));
}

double OmegaFn::eval_from_double(double nd) const {
    switch (family_) {
        case Family::Power:
            if (nd == 0.0) return 0.0;
            return check_finite(std::pow(nd, p_.get_d()));
        case Family::PowerLog:
            if (nd == 0.0) return 0.0;
            return check_finite(std::pow(nd, p_.get_d()) *
                                std::pow(std::log(nd + std::exp(1.0)), q_.get_d()));
        case Family::Log:
            return check_finite(std::log1p(nd));
        case Family::Constant:
            return p_.get_d();
        case Family::Table:
            break;
    }
    throw Error("omega: table family has no dense evaluation");
}

double OmegaFn::eval(const mpz_class& n) const {
    if (n < 0) throw Error("omega: n must be >= 0");
    if (family_ == Family::Table) {
        if (n >= static_cast<long>(table_.size())) return table_.back();
        return table_[n.get_ui()];
    }
    return eval_from_double(to_double_checked(n));
}

double OmegaFn::eval(std::uint64_t n) const {
    if (family_ == Family::Table)
        return n < table_.size() ? table_[n] : table_.back();
    return eval_from_double(static_cast<double>(n));
}

double log_mpz(const mpz_class& n) {
    if (n <= 0) throw Error("log_mpz: n must be positive");
    signed long exp2;
    const double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * M_LN2;
}

double OmegaFn::log_eval(const mpz_class& n) const {
    if (n < 0) throw Error("omega: n must be >= 0");
    if (n == 0 || family_ == Family::Table || mpz_sizeinbase(n.get_mpz_t(), 2) < 512)
        return std::log(eval(n));
    const double ln = log_mpz(n);
    switch (family_) {
        case Family::Power:
            return p_.get_d() * ln;
        case Family::PowerLog:
            // log(n + e) and log(n) agree to every retained bit at this size
            return p_.get_d() * ln + q_.get_d() * std::log(ln);
        case Family::Log:
            return std::log(ln);
        case Family::Constant:
            return std::log(p_.get_d());
        case Family::Table:
            break;
    }
    throw Error("omega: unreachable family");
}

bool OmegaFn::is_sublinear() const {
    switch (family_) {
        case Family::Power:
            return p_ < 1;
        case Family::PowerLog:
            return p_ < 1 || (p_ == 1 && q_ < 0);
        case Family::Log:
        case Family::Constant:
        case Family::Table:
            return true;
    }
    return false;
}

mpz_class OmegaFn::sublinearity_threshold(double eps, const mpz_class& cap) const {
    if (eps <= 0) throw Error("sublinearity_threshold: eps must be > 0");
    if (!is_sublinear()) throw NotSublinearError("omega is not sublinear: " + describe());
    for (mpz_class n = 1; n <= cap; n *= 2) {
        if (eval(n) / n.get_d() < eps) return n;
    }
    throw CapExceededError("sublinearity threshold above cap for " + describe());
}

std::string OmegaFn::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Power:
            os << "power:" << p_.get_str();
            break;
        case Family::PowerLog:
            os << "powerlog:" << p_.get_str() << ":" << q_.get_str();
            break;
        case Family::Log:
            os << "log";
            break;
        case Family::Constant:
            os << "const:" << p_.get_str();
            break;
        case Family::Table: {
            os << "table:";
            for (std::size_t i = 0; i < table_.size(); ++i) os << (i ? "," : "") << table_[i];
            break;
        }
    }
    return os.str();
}

OmegaFn OmegaFn::parse(const std::string& s) {
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "power") return power(parse_rational(rest));
    if (head == "powerlog") {
        auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw Error("powerlog needs p:q");
        return power_log(parse_rational(rest.substr(0, c2)), parse_rational(rest.substr(c2 + 1)));
    }
    if (head == "log") return log();
    if (head == "const" || head == "constant") return constant(parse_rational(rest));
    if (head == "table") {
        std::vector<double> vals;
        std::istringstream is(rest);
        std::string tok;
        while (std::getline(is, tok, ',')) vals.push_back(std::stod(tok));
        return table(std::move(vals));
    }
    throw Error("unknown omega shorthand: " + s);
}

}  // namespace oe
