/**
 * @file finitelie.cpp
 * @brief Deligne–Lusztig values on the anisotropic torus of GL_n over a finite field.
 */
#include "stf/finitelie.hpp"

#include <algorithm>
#include <thread>

#include "stf/errors.hpp"

namespace stf {

FiniteTorus::FiniteTorus(const FieldTower* tower, uint32_t base_layer, uint32_t n)
    : tower_(tower), layer_(base_layer * n), n_(n) {
    if (n == 0 || tower->top_degree() % layer_ != 0) throw DomainError("F_{q^n} is not a layer of the tower");
    q_ = tower->layer_size(base_layer);
    order_ = tower->layer_size(layer_) - 1;
    step_ = (tower->size() - 1) / order_;
}

uint64_t FiniteTorus::index(uint32_t x) const {
    if (x == 0 || !tower_->in_layer(x, layer_)) throw DomainError("element outside F_{q^n}^×");
    return tower_->log(x) / step_;
}

uint32_t FiniteTorus::element(uint64_t e) const { return tower_->exp(int64_t((e % order_) * step_)); }

std::vector<uint32_t> FiniteTorus::frobenius_orbit(uint32_t x) const {
    std::vector<uint32_t> out;
    uint64_t e = index(x);
    for (uint32_t i = 0; i < n_; ++i) {
        out.push_back(element(e));
        e = e * q_ % order_;
    }
    return out;
}

bool FiniteTorus::is_regular(uint32_t x) const {
    auto orbit = frobenius_orbit(x);
    std::sort(orbit.begin(), orbit.end());
    return std::adjacent_find(orbit.begin(), orbit.end()) == orbit.end();
}

FiniteTorusChar FiniteTorusChar::operator*(const FiniteTorusChar& o) const {
    if (modulus != o.modulus) throw DomainError("characters of different tori");
    return {(k + o.k) % int64_t(modulus), modulus};
}

CycNumber FiniteTorusChar::operator()(const FiniteTorus& T, uint32_t x) const {
    const uint64_t N = T.order();
    const uint64_t kk = uint64_t(((k % int64_t(N)) + int64_t(N)) % int64_t(N));
    return CycNumber::root_of_unity(N, int64_t(kk * T.index(x) % N));
}

CycNumber dl_value_regular(const FiniteTorus& T, const FiniteTorusChar& theta, uint32_t g) {
    if (!T.is_regular(g)) throw DomainError("g is not regular in T");
    CycNumber s;
    for (auto x : T.frobenius_orbit(g)) s += theta(T, x);
    return s;
}

CycNumber finite_L(const FiniteTorus& T, uint32_t g, uint32_t t) {
    if (!T.is_regular(g)) throw DomainError("g is not regular in T");
    const uint64_t N = T.order();
    const uint64_t ft = T.index(t);
    std::vector<int64_t> hist(N, 0);
    for (auto x : T.frobenius_orbit(g)) {
        const uint64_t a = (T.index(x) + N - ft) % N;  // ϑ_k(x t^{−1}) = ζ^{ka}
        for (uint64_t k = 0, v = 0; k < N; ++k, v = (v + a) % N) ++hist[v];
    }
    return CycNumber::from_histogram(N, hist) * CycNumber(mpq_class(1, mpz_class(std::to_string(N))));
}

uint64_t frobenius_match_count(const FiniteTorus& T, uint32_t g, uint32_t t) {
    const auto orbit = T.frobenius_orbit(g);
    return uint64_t(std::count(orbit.begin(), orbit.end(), t));
}

FiniteCheckResult finite_corollary_check(const FiniteTorus& T, unsigned jobs) {
    const uint64_t N = T.order();
    jobs = std::max(1u, jobs);
    std::vector<FiniteCheckResult> parts(jobs);
    auto work = [&](unsigned j) {
        FiniteCheckResult& r = parts[j];
        for (uint64_t e = j; e < N; e += jobs) {
            const uint32_t g = T.element(e);
            if (!T.is_regular(g)) continue;
            ++r.regular;
            CycNumber total;
            for (uint64_t f = 0; f < N; ++f) {
                const uint32_t t = T.element(f);
                const CycNumber v = finite_L(T, g, t);
                ++r.pairs;
                if (v != CycNumber(long(frobenius_match_count(T, g, t)))) ++r.mismatches;
                if (v != CycNumber(0) && v != CycNumber(1)) ++r.out_of_range;
                total += v;
            }
            if (total != CycNumber(long(T.n()))) ++r.orbit_sum_failures;
        }
    };
    std::vector<std::thread> threads;
    for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(work, j);
    work(0);
    for (auto& th : threads) th.join();
    FiniteCheckResult out;
    for (const auto& r : parts) {
        out.pairs += r.pairs;
        out.regular += r.regular;
        out.mismatches += r.mismatches;
        out.orbit_sum_failures += r.orbit_sum_failures;
        out.out_of_range += r.out_of_range;
    }
    return out;
}

}  // namespace stf
