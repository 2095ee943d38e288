#include "oe/coupling.hpp"

#include <cmath>
#include <sstream>

namespace oe {

mpz_class cocycle(const IntervalMap& map, const mpz_class& x) {
    if (x < 0 || x >= map.domain) throw Error("cocycle: point out of range");
    mpz_class next = x + 1 == map.domain ? mpz_class(0) : mpz_class(x + 1);
    return map.eval(next) - map.eval(x);
}

NormValue psi_norm_bound(const BaseSequence& seq, long n, const OmegaFn& omega) {
    if (n < 1 || n > seq.depth()) throw Error("psi_norm_bound: level out of range");
    const double w1 = omega.eval(mpz_class(1));
    double total = 0.0;
    // log-space products: the individual factors outrun a double well before
    // the terms stop being summable
    for (long m = 1; m <= n; ++m) {
        const double lkm = log_mpz(seq.k(m));
        const double lK2 = log_mpz(mpz_class(seq.k(m - 2) * seq.k(m - 1)));
        total += std::exp(M_LN2 - lkm + omega.log_eval(mpz_class(seq.k(m - 1) * seq.k(m)))) +
                 (std::exp(-lK2) + std::exp(lK2 - lkm)) * w1;
    }
    std::ostringstream prov;
    prov << "psi bound, levels 1.." << n << ", omega " << omega.describe();
    return {total, prov.str()};
}

NormValue phi_norm_bound(const BaseSequence& seq, long n, const OmegaFn& omega) {
    if (n + 1 > seq.depth()) throw Error("phi_norm_bound: plan depth insufficient");
    NormValue base = psi_norm_bound(seq, n, omega);
    base.value += std::exp(log_mpz(mpz_class(seq.k(n - 1) * seq.k(n))) - log_mpz(seq.k(n + 1)) +
                           omega.log_eval(seq.k(n)));
    base.provenance = "phi bound = " + base.provenance + " + wrap term";
    return base;
}

mpz_class psi_eval(const BaseSequence& seq, long n, const mpz_class& x) {
    return psi_eval(kspan(seq), n, x);
}
mpz_class psi_inv_eval(const BaseSequence& seq, long n, const mpz_class& y) {
    return psi_inv_eval(kspan(seq), n, y);
}
mpz_class phi_eval(const BaseSequence& seq, long n, const mpz_class& x) {
    return phi_eval(kspan(seq), n, x);
}
mpz_class cocycle_of_phi(const BaseSequence& seq, long n, const mpz_class& x) {
    return cocycle_of_phi(kspan(seq), n, x);
}

}  // namespace oe
