#include "oe/verifier.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace oe {

namespace {

constexpr std::uint64_t kBlock = 1ull << 16;

// fn(block_index, begin, end); block ownership is by index, so any merge
// indexed by block is independent of the thread count
template <class Fn>
void for_blocks(std::uint64_t total, int threads, Fn&& fn) {
    const std::uint64_t nblocks = (total + kBlock - 1) / kBlock;
    if (threads <= 1 || nblocks <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b)
            fn(b, b * kBlock, std::min(total, (b + 1) * kBlock));
        return;
    }
    const int t = std::min<std::uint64_t>(threads, nblocks);
    std::vector<std::thread> workers;
    workers.reserve(t);
    for (int w = 0; w < t; ++w)
        workers.emplace_back([&, w] {
            for (std::uint64_t b = w; b < nblocks; b += t)
                fn(b, b * kBlock, std::min(total, (b + 1) * kBlock));
        });
    for (auto& th : workers) th.join();
}

std::uint64_t num_blocks(std::uint64_t total) { return (total + kBlock - 1) / kBlock; }

mpq_class exact_fraction(std::uint64_t num, std::uint64_t den) {
    mpq_class q(mpz_class(static_cast<unsigned long>(num)),
                mpz_class(static_cast<unsigned long>(den)));
    q.canonicalize();
    return q;
}

void add_check(LevelReport& r, std::string name, bool pass, std::string value,
               std::string bound) {
    r.checks.push_back({std::move(name), pass, std::move(value), std::move(bound)});
}

struct U64Ks {
    std::vector<std::uint64_t> ks;  // ks[0] = k_{-1}
    std::uint64_t k(long n) const { return ks[static_cast<std::size_t>(n + 1)]; }
};

/// the ks prefix up to index `upto`, stopping early at the first entry
/// that overflows u64
std::vector<std::uint64_t> u64_prefix(const SequencePlan& plan, long upto) {
    std::vector<std::uint64_t> out;
    for (long n = -1; n <= std::min(upto, plan.depth()); ++n) {
        if (!plan.k(n).fits_ulong_p()) break;
        out.push_back(plan.k(n).get_ui());
    }
    return out;
}

}  // namespace

bool LevelReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

bool VerificationReport::all_pass() const {
    return std::all_of(levels.begin(), levels.end(),
                       [](const LevelReport& l) { return l.all_pass(); });
}

bool VerificationReport::any_skipped() const {
    return std::any_of(levels.begin(), levels.end(),
                       [](const LevelReport& l) { return l.skipped; });
}

LevelTables build_level_tables(const SequencePlan& plan, long n, std::uint64_t cap) {
    if (n < 1 || n > plan.depth()) throw Error("build_level_tables: level out of range");
    // exact-size check first: the u64 product below could silently wrap
    const mpz_class domain_exact = plan.k(n - 1) * plan.k(n);
    if (domain_exact > cap)
        throw CapExceededError("build_level_tables: domain " + domain_exact.get_str() +
                               " exceeds cap " + std::to_string(cap));
    LevelTables t;
    t.ks = u64_prefix(plan, n + 1);
    if (t.ks.size() < static_cast<std::size_t>(n) + 2)
        throw CapExceededError("build_level_tables: entries exceed 64 bits");
    U64Ks kv{t.ks};

    t.psi.resize(static_cast<std::size_t>(n) + 1);
    t.psi_inv.resize(static_cast<std::size_t>(n) + 1);
    // psi_1 = id
    t.psi[1].resize(kv.k(1));
    std::iota(t.psi[1].begin(), t.psi[1].end(), 0u);
    t.psi_inv[1] = t.psi[1];

    for (long m = 2; m <= n; ++m) {
        const std::uint64_t Kp = kv.k(m - 2) * kv.k(m - 1);  // previous-level domain
        const std::uint64_t km = kv.k(m);
        const std::uint64_t dom = kv.k(m - 1) * km;
        const std::uint64_t c = km / Kp;
        const std::uint64_t d = km % Kp;
        const auto& inv_prev = t.psi_inv[static_cast<std::size_t>(m - 1)];
        auto& cur = t.psi[static_cast<std::size_t>(m)];
        cur.resize(dom);
        for (std::uint64_t x = 0; x < dom; ++x) {
            const std::uint64_t a = x / km;
            const std::uint64_t b = x % km;
            const std::uint64_t e = b / Kp;
            const std::uint64_t f = b % Kp;
            cur[x] = e < c ? static_cast<std::uint32_t>((a * c + e) * Kp + inv_prev[f])
                           : static_cast<std::uint32_t>(c * kv.k(m - 1) * Kp + a * d + f);
        }
        auto& inv = t.psi_inv[static_cast<std::size_t>(m)];
        inv.resize(dom);
        for (std::uint64_t x = 0; x < dom; ++x) inv[cur[x]] = static_cast<std::uint32_t>(x);
    }
    return t;
}

IntervalMap build_table(const SequencePlan& plan, long n, MapId id, std::uint64_t cap) {
    LevelTables t = build_level_tables(plan, n, cap);
    U64Ks kv{t.ks};
    const std::uint64_t K = kv.k(n - 1) * kv.k(n);
    auto table_map = [](std::vector<std::uint32_t> tab, mpz_class codomain) {
        auto shared = std::make_shared<std::vector<std::uint32_t>>(std::move(tab));
        IntervalMap m;
        m.domain = static_cast<unsigned long>(shared->size());
        m.codomain = std::move(codomain);
        m.eval = [shared](const mpz_class& x) {
            return mpz_class((*shared)[x.get_ui()]);
        };
        return m;
    };
    switch (id) {
        case MapId::Psi:
            return table_map(t.psi[static_cast<std::size_t>(n)], mpz_class(plan.k(n - 1) * plan.k(n)));
        case MapId::PsiInv:
            return table_map(t.psi_inv[static_cast<std::size_t>(n)],
                             mpz_class(plan.k(n - 1) * plan.k(n)));
        case MapId::ModKnPsiInv: {
            std::vector<std::uint32_t> tab(K);
            const auto& inv = t.psi_inv[static_cast<std::size_t>(n)];
            for (std::uint64_t z = 0; z < K; ++z)
                tab[z] = static_cast<std::uint32_t>(inv[z] % kv.k(n));
            return table_map(std::move(tab), plan.k(n));
        }
        case MapId::Phi: {
            if (n + 1 > plan.depth()) throw Error("build_table: phi needs depth >= n+1");
            const std::uint64_t dom = kv.k(n + 1);
            if (dom > cap) throw CapExceededError("build_table: phi domain exceeds cap");
            std::vector<std::uint32_t> tab(dom);
            const auto& inv = t.psi_inv[static_cast<std::size_t>(n)];
            for (std::uint64_t x = 0; x < dom; ++x)
                tab[x] = static_cast<std::uint32_t>(inv[x % K] % kv.k(n));
            return table_map(std::move(tab), plan.k(n));
        }
    }
    throw Error("build_table: unknown map id");
}

LevelReport verify_level_with_tables(const SequencePlan& plan, long n, const OmegaFn& omega,
                                     const LevelTables& t, const VerifyOptions& opt) {
    LevelReport r;
    r.level = n;
    U64Ks kv{t.ks};
    KSpan<std::uint64_t> kspan_u{std::span(t.ks)};
    const std::uint64_t K = kv.k(n - 1) * kv.k(n);
    r.domain = std::to_string(K);
    const auto& psi_t = t.psi[static_cast<std::size_t>(n)];
    const auto& inv_t = t.psi_inv[static_cast<std::size_t>(n)];

    // bijectivity
    {
        std::vector<std::uint8_t> seen(K, 0);
        bool bij = true;
        for (std::uint64_t x = 0; x < K && bij; ++x) {
            if (psi_t[x] >= K || seen[psi_t[x]]) bij = false;
            else seen[psi_t[x]] = 1;
        }
        add_check(r, "bijection", bij, bij ? "permutation of [" + r.domain + "]" : "collision",
                  "");
    }
    // endpoint fixing
    add_check(r, "endpoints", psi_t[0] == 0 && psi_t[K - 1] == K - 1,
              "psi(0)=" + std::to_string(psi_t[0]) + ", psi(K-1)=" + std::to_string(psi_t[K - 1]),
              "0 and K-1");

    // recursive evaluators vs tables, pointwise
    {
        std::vector<std::uint64_t> mism(num_blocks(K), 0);
        for_blocks(K, opt.threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
            std::uint64_t local = 0;
            for (std::uint64_t x = lo; x < hi; ++x) {
                if (psi_eval(kspan_u, n, x) != psi_t[x]) ++local;
                if (psi_inv_eval(kspan_u, n, x) != inv_t[x]) ++local;
            }
            mism[b] = local;
        });
        r.table_mismatches = std::accumulate(mism.begin(), mism.end(), std::uint64_t{0});
        add_check(r, "evaluator agreement", r.table_mismatches == 0,
                  std::to_string(r.table_mismatches) + " mismatches", "0");
    }

    // diagram defect of the level-(n-1)/level-n square and its containment in the red region
    if (n >= 2) {
        const std::uint64_t Kp = kv.k(n - 2) * kv.k(n - 1);
        const std::uint64_t kn = kv.k(n);
        const auto& inv_prev = t.psi_inv[static_cast<std::size_t>(n - 1)];
        std::vector<std::uint64_t> defect(num_blocks(K), 0), escaped(num_blocks(K), 0);
        for_blocks(K, opt.threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
            std::uint64_t local = 0, esc = 0;
            for (std::uint64_t x = lo; x < hi; ++x) {
                const std::uint64_t lhs = inv_prev[(x % kn) % Kp];
                const std::uint64_t rhs = psi_t[x] % Kp;
                if (lhs != rhs) {
                    ++local;
                    if (!is_red(kspan_u, n, x)) ++esc;
                }
            }
            defect[b] = local;
            escaped[b] = esc;
        });
        const std::uint64_t count = std::accumulate(defect.begin(), defect.end(), std::uint64_t{0});
        const std::uint64_t esc = std::accumulate(escaped.begin(), escaped.end(), std::uint64_t{0});
        r.has_diagram = true;
        r.diagram_defect = exact_fraction(count, K);
        r.diagram_bound = exact_fraction(Kp, kn);
        add_check(r, "diagram defect <= k_{n-2}k_{n-1}/k_n", r.diagram_defect <= r.diagram_bound,
                  r.diagram_defect.get_str(), r.diagram_bound.get_str());
        add_check(r, "diagram defect contained in red region", esc == 0,
                  std::to_string(esc) + " points outside", "0");
        if (K <= (1u << 16)) {
            for (std::uint64_t x = 0; x < K; ++x) {
                const std::uint64_t lhs = inv_prev[(x % kn) % Kp];
                if (lhs != psi_t[x] % Kp) r.diagram_defect_points.push_back(x);
            }
        }
    }

    const bool phi_here = n + 1 <= plan.depth() && kv.ks.size() >= static_cast<std::size_t>(n) + 3;
    const std::uint64_t phi_dom = phi_here ? kv.k(n + 1) : 0;
    const bool phi_enumerable = phi_here && phi_dom <= opt.enumeration_cap;

    // composition with the previous level: phi_{n-1} o phi_n vs Mod(k_{n-1})
    if (n >= 2 && phi_enumerable) {
        const std::uint64_t Kp = kv.k(n - 2) * kv.k(n - 1);
        const auto& inv_prev = t.psi_inv[static_cast<std::size_t>(n - 1)];
        std::vector<std::uint64_t> defect(num_blocks(phi_dom), 0);
        for_blocks(phi_dom, opt.threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
            std::uint64_t local = 0;
            for (std::uint64_t x = lo; x < hi; ++x) {
                const std::uint64_t y = inv_t[x % K] % kv.k(n);       // phi_n(x)
                const std::uint64_t z = inv_prev[y % Kp] % kv.k(n - 1);  // phi_{n-1}(y)
                if (z != x % kv.k(n - 1)) ++local;
            }
            defect[b] = local;
        });
        const std::uint64_t count = std::accumulate(defect.begin(), defect.end(), std::uint64_t{0});
        r.has_composition = true;
        r.composition_defect = exact_fraction(count, phi_dom);
        r.composition_bound = exact_fraction(Kp, kv.k(n)) + exact_fraction(K, phi_dom);
        add_check(r, "composition defect <= k_{n-2}k_{n-1}/k_n + k_{n-1}k_n/k_{n+1}",
                  r.composition_defect <= r.composition_bound, r.composition_defect.get_str(),
                  r.composition_bound.get_str());
        if (phi_dom <= (1u << 16)) {
            for (std::uint64_t x = 0; x < phi_dom; ++x) {
                const std::uint64_t y = inv_t[x % K] % kv.k(n);
                if (inv_prev[y % Kp] % kv.k(n - 1) != x % kv.k(n - 1))
                    r.composition_defect_points.push_back(x);
            }
        }
    }

    // fiber bound for phi_n
    if (phi_enumerable) {
        std::vector<std::uint64_t> counts(kv.k(n), 0);
        for (std::uint64_t x = 0; x < phi_dom; ++x) ++counts[inv_t[x % K] % kv.k(n)];
        const std::uint64_t maxc = *std::max_element(counts.begin(), counts.end());
        r.has_fiber = true;
        r.fiber_max = exact_fraction(maxc, phi_dom);
        r.fiber_bound =
            (mpq_class(1) + exact_fraction(K, phi_dom)) * exact_fraction(1, kv.k(n));
        r.fiber_bound.canonicalize();
        add_check(r, "max fiber <= (1 + k_{n-1}k_n/k_{n+1})/k_n", r.fiber_max <= r.fiber_bound,
                  r.fiber_max.get_str(), r.fiber_bound.get_str());
    }

    // exact omega-norms vs closed-form bounds
    {
        const BaseSequence seq = plan.sequence();
        const double psi_b = psi_norm_bound(seq, n, omega).value;
        auto table_norm = [&](auto&& value_at, std::uint64_t dom) {
            std::vector<double> partial(num_blocks(dom), 0.0);
            for_blocks(dom, opt.threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
                double local = 0.0;
                for (std::uint64_t x = lo; x < hi; ++x) {
                    const std::int64_t cur = value_at(x);
                    const std::int64_t nxt = value_at(x + 1 == dom ? 0 : x + 1);
                    const std::int64_t lam = nxt - cur;
                    local += omega.eval(static_cast<std::uint64_t>(lam < 0 ? -lam : lam));
                }
                partial[b] = local;
            });
            double total = 0.0;
            for (double v : partial) total += v;
            return total / static_cast<double>(dom);
        };
        r.norm_psi = table_norm([&](std::uint64_t x) { return std::int64_t(psi_t[x]); }, K);
        r.norm_psi_inv = table_norm([&](std::uint64_t x) { return std::int64_t(inv_t[x]); }, K);
        r.norm_mod_psi_inv =
            table_norm([&](std::uint64_t x) { return std::int64_t(inv_t[x] % kv.k(n)); }, K);
        r.psi_bound = psi_b;
        r.has_norms = true;
        add_check(r, "psi cocycle norm <= bound", r.norm_psi <= psi_b, std::to_string(r.norm_psi),
                  std::to_string(psi_b));
        add_check(r, "psi_inv cocycle norm <= bound", r.norm_psi_inv <= psi_b,
                  std::to_string(r.norm_psi_inv), std::to_string(psi_b));
        add_check(r, "mod k_n psi_inv cocycle norm <= bound", r.norm_mod_psi_inv <= psi_b,
                  std::to_string(r.norm_mod_psi_inv), std::to_string(psi_b));
        if (phi_enumerable) {
            const double phi_b = phi_norm_bound(seq, n, omega).value;
            r.norm_phi = table_norm(
                [&](std::uint64_t x) { return std::int64_t(inv_t[x % K] % kv.k(n)); }, phi_dom);
            r.phi_bound = phi_b;
            r.has_phi_norm = true;
            add_check(r, "phi cocycle norm <= bound", r.norm_phi <= phi_b,
                      std::to_string(r.norm_phi), std::to_string(phi_b));
        }
    }

    // where the shortcut cocycle identity fails (block wraps); informational
    if (phi_enumerable) {
        std::vector<std::uint64_t> fails(num_blocks(phi_dom), 0);
        for_blocks(phi_dom, opt.threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
            std::uint64_t local = 0;
            for (std::uint64_t x = lo; x < hi; ++x) {
                const std::uint64_t xn = x + 1 == phi_dom ? 0 : x + 1;
                const std::int64_t direct = std::int64_t(inv_t[xn % K] % kv.k(n)) -
                                            std::int64_t(inv_t[x % K] % kv.k(n));
                const std::uint64_t z = x % K;
                const std::uint64_t zn = z + 1 == K ? 0 : z + 1;
                const std::int64_t shortcut = std::int64_t(inv_t[zn] % kv.k(n)) -
                                              std::int64_t(inv_t[z] % kv.k(n));
                if (direct != shortcut) ++local;
            }
            fails[b] = local;
        });
        r.shortcut_failures = std::accumulate(fails.begin(), fails.end(), std::uint64_t{0});
        add_check(r, "shortcut cocycle identity failures (informational)", true,
                  std::to_string(r.shortcut_failures) + " points", "");
    }

    return r;
}

LevelReport verify_level(const SequencePlan& plan, long n, const OmegaFn& omega,
                         const VerifyOptions& opt) {
    try {
        LevelTables t = build_level_tables(plan, n, opt.enumeration_cap);
        return verify_level_with_tables(plan, n, omega, t, opt);
    } catch (const CapExceededError&) {
        LevelReport r;
        r.level = n;
        r.domain = mpz_class(plan.k(n - 1) * plan.k(n)).get_str();
        r.skipped = true;
        return r;
    }
}

VerificationReport verify_plan(const SequencePlan& plan, const OmegaFn& omega,
                               const VerifyOptions& opt) {
    VerificationReport rep;
    rep.plan_hash = plan_hash(plan);
    rep.omega = omega.describe();
    for (long n = 1; n <= plan.depth(); ++n) rep.levels.push_back(verify_level(plan, n, omega, opt));
    return rep;
}

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kFuzzPrimes[] = {2, 3, 5, 7};

/// random sequence satisfying the psi-construction hypotheses, entries <= size_cap,
/// level domains <= enum_cap
BaseSequence random_sequence(std::uint64_t seed, long depth_cap, std::uint64_t size_cap,
                             std::uint64_t enum_cap) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::uint64_t s = seed * 0x2545f4914f6cdd1dull + attempt;
        BaseSequence seq;
        auto prime = [&] { return kFuzzPrimes[splitmix(s) % 4]; };
        bool full = true;
        const long depth = 2 + static_cast<long>(splitmix(s) % static_cast<std::uint64_t>(
                                                     std::max(1l, depth_cap - 1)));
        for (long idx = 1; idx <= depth; ++idx) {
            mpz_class cand = seq.k(idx - 2) * mpz_class(static_cast<unsigned long>(prime()));
            while (cand <= seq.k(idx - 2) * seq.k(idx - 1) || cand <= seq.k(idx - 1))
                cand *= 2;
            if (splitmix(s) % 2) cand *= static_cast<unsigned long>(prime());
            if (cand > size_cap || seq.k(idx - 1) * cand > enum_cap) {
                full = idx > 2;
                break;
            }
            seq.push_back(cand);
        }
        if (full && seq.depth() >= 2) return seq;
    }
}

}  // namespace

FuzzReport fuzz_plans(std::uint64_t seed, int count, long depth_cap, std::uint64_t size_cap,
                      const std::vector<OmegaFn>& omegas, const VerifyOptions& opt) {
    FuzzReport out;
    for (int i = 0; i < count; ++i) {
        BaseSequence seq =
            random_sequence(seed ^ (0x9e3779b97f4a7c15ull * (i + 1)), depth_cap, size_cap,
                            opt.enumeration_cap);
        for (const OmegaFn& omega : omegas) {
            SequencePlan p = plan_from_sequence(seq, omega, 1);
            VerificationReport rep = verify_plan(p, omega, opt);
            for (const LevelReport& lvl : rep.levels) {
                for (const CheckResult& c : lvl.checks) {
                    ++out.checks_run;
                    if (!c.pass) {
                        ++out.violations;
                        out.failures.push_back("plan " + rep.plan_hash + " omega " + rep.omega +
                                               " level " + std::to_string(lvl.level) + ": " +
                                               c.name);
                    }
                }
            }
            out.reports.push_back(std::move(rep));
        }
        ++out.plans;
    }
    return out;
}

}  // namespace oe
