#include "oe/supernatural.hpp"

#include <algorithm>
#include <sstream>

namespace oe {

namespace {

// Miller-Rabin, deterministic for n < 3.3*10^24 with this base set.
constexpr unsigned long kMrBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

bool miller_rabin(const mpz_class& n) {
    if (n < 2) return false;
    for (unsigned long b : kMrBases) {
        if (n == b) return true;
        if (n % b == 0) return false;
    }
    mpz_class d = n - 1;
    unsigned long s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++s;
    }
    mpz_class nm1 = n - 1;
    for (unsigned long b : kMrBases) {
        mpz_class x;
        mpz_class base = b;
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool witness = true;
        for (unsigned long r = 1; r < s; ++r) {
            x = (x * x) % n;
            if (x == nm1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

}  // namespace

bool is_prime(const mpz_class& q) {
    if (mpz_sizeinbase(q.get_mpz_t(), 2) > 64)
        throw Error("is_prime: input beyond desk scale (>= 2^64)");
    return miller_rabin(q);
}

unsigned long valuation(const mpz_class& k, const mpz_class& q) {
    if (k == 0) throw Error("valuation: k must be >= 1");
    if (!is_prime(q)) throw Error("valuation: q = " + q.get_str() + " is not prime");
    mpz_class reduced;
    return static_cast<unsigned long>(
        mpz_remove(reduced.get_mpz_t(), k.get_mpz_t(), q.get_mpz_t()));
}

SupernaturalNumber::SupernaturalNumber(std::map<mpz_class, Exponent> exps)
    : exps_(std::move(exps)) {
    for (auto it = exps_.begin(); it != exps_.end();) {
        if (!it->second.infinite && it->second.value == 0) {
            it = exps_.erase(it);
            continue;
        }
        if (!is_prime(it->first))
            throw Error("SupernaturalNumber: key " + it->first.get_str() + " is not prime");
        ++it;
    }
}

Exponent SupernaturalNumber::exponent_of(const mpz_class& q) const {
    auto it = exps_.find(q);
    return it == exps_.end() ? Exponent::fin(0) : it->second;
}

bool SupernaturalNumber::has_infinite_exponent() const {
    return std::any_of(exps_.begin(), exps_.end(),
                       [](const auto& kv) { return kv.second.infinite; });
}

mpz_class SupernaturalNumber::smallest_infinite_prime() const {
    for (const auto& [q, e] : exps_)
        if (e.infinite) return q;
    throw NoFillerPrimeError("supernatural number has no infinite-exponent prime");
}

mpz_class SupernaturalNumber::finite_product() const {
    mpz_class out = 1;
    for (const auto& [q, e] : exps_) {
        if (e.infinite) throw Error("finite_product: exponent of " + q.get_str() + " is infinite");
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), q.get_mpz_t(), e.value);
        out *= pw;
    }
    return out;
}

std::string SupernaturalNumber::to_string() const {
    if (exps_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [q, e] : exps_) {
        if (!first) os << "*";
        first = false;
        os << q.get_str() << "^";
        if (e.infinite)
            os << "inf";
        else
            os << e.value;
    }
    return os.str();
}

SupernaturalNumber SupernaturalNumber::parse(const std::string& s) {
    std::map<mpz_class, Exponent> exps;
    if (s.empty() || s == "1") return SupernaturalNumber(std::move(exps));
    std::string factor;
    std::istringstream is(s);
    while (std::getline(is, factor, '*')) {
        auto caret = factor.find('^');
        std::string base = factor.substr(0, caret);
        Exponent e = Exponent::fin(1);
        if (caret != std::string::npos) {
            std::string es = factor.substr(caret + 1);
            if (es == "inf" || es == "INF" || es == "oo")
                e = Exponent::inf();
            else
                e = Exponent::fin(std::stoul(es));
        }
        mpz_class q(base);
        auto [it, inserted] = exps.emplace(q, e);
        if (!inserted) throw Error("parse: repeated prime " + base);
    }
    return SupernaturalNumber(std::move(exps));
}

PrefixSupernatural supernatural_of_prefix(const BaseSequence& seq, Parity parity, bool complete) {
    std::map<mpz_class, Exponent> exps;
    for (long n = (parity == Parity::Odd ? 1 : 2); n <= seq.depth(); n += 2) {
        mpz_class rest = seq.k(n);
        for (mpz_class q = 2; rest > 1;) {
            // trial division: desk-scale entries factor fast enough here
            if (rest % q == 0) {
                mpz_class red;
                unsigned long v = static_cast<unsigned long>(
                    mpz_remove(red.get_mpz_t(), rest.get_mpz_t(), q.get_mpz_t()));
                rest = red;
                auto it = exps.find(q);
                if (it == exps.end())
                    exps.emplace(q, Exponent::fin(v));
                else if (!it->second.infinite && it->second.value < v)
                    it->second.value = v;
            }
            mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
        }
    }
    return {SupernaturalNumber(std::move(exps)), complete};
}

ChunkStream::ChunkStream(SupernaturalNumber sn, std::uint64_t position) : sn_(std::move(sn)) {
    for (const auto& [q, e] : sn_.exponents()) {
        primes_.push_back(q);
        exps_.push_back(e);
        emitted_.push_back(0);
    }
    skip_to_live();
    while (position_ < position) next();
}

void ChunkStream::skip_to_live() {
    std::size_t tried = 0;
    while (tried < primes_.size()) {
        const Exponent& e = exps_[cursor_];
        if (e.infinite || emitted_[cursor_] < e.value) return;
        cursor_ = (cursor_ + 1) % primes_.size();
        ++tried;
    }
    cursor_ = primes_.size();  // exhausted
}

bool ChunkStream::exhausted() const { return primes_.empty() || cursor_ >= primes_.size(); }

mpz_class ChunkStream::next() {
    if (exhausted()) throw Error("chunk stream exhausted");
    mpz_class q = primes_[cursor_];
    ++emitted_[cursor_];
    ++position_;
    cursor_ = (cursor_ + 1) % primes_.size();
    skip_to_live();
    return q;
}

std::vector<mpz_class> ChunkStream::prefix(const SupernaturalNumber& sn, std::uint64_t count) {
    ChunkStream s(sn);
    std::vector<mpz_class> out;
    while (out.size() < count && !s.exhausted()) out.push_back(s.next());
    return out;
}

BaseSequence::BaseSequence() : ks_{1, 1} {}

BaseSequence::BaseSequence(std::vector<mpz_class> ks) : ks_{1, 1} {
    if (ks.size() < 2 || ks[0] != 1 || ks[1] != 1)
        throw Error("BaseSequence: must start with k_{-1} = k_0 = 1");
    for (std::size_t i = 2; i < ks.size(); ++i) push_back(ks[i]);
}

const mpz_class& BaseSequence::k(long n) const {
    if (n < -1 || n > depth()) throw Error("BaseSequence: index out of range");
    return ks_[static_cast<std::size_t>(n + 1)];
}

void BaseSequence::push_back(const mpz_class& k_next) {
    long n = depth();  // new entry gets index n+1
    if (k_next <= 0) throw Error("BaseSequence: entries must be positive");
    if (n >= 1 && k_next <= k(n)) throw Error("BaseSequence: not strictly increasing at k_" +
                                              std::to_string(n + 1));
    if (k_next % k(n - 1) != 0)
        throw Error("BaseSequence: k_" + std::to_string(n - 1) + " does not divide k_" +
                    std::to_string(n + 1));
    if (k_next <= k(n - 1) * k(n))
        throw Error("BaseSequence: growth k_{n+1} > k_{n-1}k_n fails at k_" +
                    std::to_string(n + 1));
    ks_.push_back(k_next);
}

void BaseSequence::pop_back() {
    if (depth() < 1) throw Error("BaseSequence: nothing to pop");
    ks_.pop_back();
}

}  // namespace oe
