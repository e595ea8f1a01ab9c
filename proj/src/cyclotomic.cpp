/**
 * @file cyclotomic.cpp
 * @brief CycNumber reduction and arithmetic.
 */
#include "stf/cyclotomic.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "stf/errors.hpp"
#include "stf/numtheory.hpp"

namespace stf {

namespace {

std::mutex& poly_mutex() {
    static std::mutex m;
    return m;
}

std::vector<int64_t> compute_cyclotomic(uint64_t m) {
    // Φ_m = Π_{d|m} (x^d − 1)^{μ(m/d)}: multiply by the positive factors first,
    // then divide exactly by the negative ones.
    std::vector<int64_t> poly{1};
    std::vector<uint64_t> negatives;
    for (uint64_t d : divisors(m)) {
        int mu = mobius(m / d);
        if (mu == 1) {
            std::vector<int64_t> next(poly.size() + d, 0);
            for (size_t i = 0; i < poly.size(); ++i) {
                next[i + d] += poly[i];
                next[i] -= poly[i];
            }
            poly = std::move(next);
        } else if (mu == -1) {
            negatives.push_back(d);
        }
    }
    for (uint64_t d : negatives) {
        // divide by (x^d − 1): q_i = q_{i−d} − a_i solved from the top down
        const size_t deg = poly.size() - 1;
        std::vector<int64_t> quot(deg - d + 1, 0);
        std::vector<int64_t> rem = poly;
        for (size_t i = deg; i + 1 > d; --i) {
            int64_t c = rem[i];
            quot[i - d] = c;
            rem[i] -= c;
            rem[i - d] += c;
            if (i == d) break;
        }
        poly = std::move(quot);
    }
    return poly;
}

uint64_t radical(uint64_t m) {
    uint64_t r = 1;
    for (uint64_t p : prime_factors(m)) r *= p;
    return r;
}

}  // namespace

const std::vector<int64_t>& cyclotomic_polynomial(uint64_t m) {
    static std::map<uint64_t, std::vector<int64_t>> cache;
    std::lock_guard<std::mutex> lock(poly_mutex());
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, compute_cyclotomic(m)).first;
    return it->second;
}

CycNumber::CycNumber(const mpq_class& v) {
    mpq_class c = v;
    c.canonicalize();
    num_ = {c.get_num()};
    den_ = c.get_den();
}

CycNumber CycNumber::reduce(uint64_t m, std::vector<mpz_class> full, const mpz_class& den) {
    if (full.size() != m) throw DomainError("cyclotomic reduction: wrong length");
    // Φ_m(x) = Φ_R(x^s) with R = rad(m), s = m/R; split exponents by residue mod s.
    const uint64_t R = radical(m), s = m / R;
    const auto& phiR = cyclotomic_polynomial(R);
    const size_t degR = phiR.size() - 1;
    CycNumber out;
    out.m_ = m;
    out.num_.assign(s * degR, 0);
    std::vector<mpz_class> h(R);
    for (uint64_t c = 0; c < s; ++c) {
        for (uint64_t j = 0; j < R; ++j) h[j] = full[c + s * j];
        for (size_t i = R; i-- > degR;) {
            if (h[i] == 0) continue;
            mpz_class lead = h[i];
            for (size_t j = 0; j <= degR; ++j)
                if (phiR[j] != 0) h[i - degR + j] -= lead * phiR[j];
        }
        for (size_t j = 0; j < degR; ++j) out.num_[c + s * j] = h[j];
    }
    out.den_ = den;
    out.normalize();
    return out;
}

void CycNumber::normalize() {
    if (den_ == 0) throw DomainError("cyclotomic number with zero denominator");
    if (den_ < 0) {
        den_ = -den_;
        for (auto& c : num_) c = -c;
    }
    mpz_class g = den_;
    for (const auto& c : num_) g = gcd(g, c);
    if (g > 1) {
        den_ /= g;
        for (auto& c : num_) c /= g;
    }
    bool rational = true;
    for (size_t i = 1; i < num_.size(); ++i)
        if (num_[i] != 0) rational = false;
    if (rational) {
        mpz_class c0 = num_.empty() ? mpz_class(0) : num_[0];
        m_ = 1;
        num_ = {c0};
        if (c0 == 0) den_ = 1;
    }
}

CycNumber CycNumber::root_of_unity(uint64_t m, int64_t k) {
    if (m == 0) throw DomainError("root of unity of order 0");
    std::vector<mpz_class> full(m, 0);
    full[pmod(k, int64_t(m))] = 1;
    return reduce(m, std::move(full), 1);
}

CycNumber CycNumber::from_histogram(uint64_t m, const std::vector<int64_t>& counts,
                                    const mpz_class& den) {
    std::vector<mpz_class> full(m, 0);
    if (counts.size() != m) throw DomainError("histogram length differs from modulus");
    for (uint64_t i = 0; i < m; ++i) full[i] = mpz_class(std::to_string(counts[i]));
    return reduce(m, std::move(full), den);
}

CycNumber CycNumber::from_histogram(uint64_t m, const std::vector<mpz_class>& counts,
                                    const mpz_class& den) {
    if (counts.size() != m) throw DomainError("histogram length differs from modulus");
    return reduce(m, counts, den);
}

CycNumber CycNumber::lifted(uint64_t m) const {
    if (m % m_ != 0) throw DomainError("cannot lift to a modulus that is not a multiple");
    if (m == m_) return *this;
    std::vector<mpz_class> full(m, 0);
    const uint64_t step = m / m_;
    for (size_t i = 0; i < num_.size(); ++i) full[i * step] += num_[i];
    return reduce(m, std::move(full), den_);
}

bool CycNumber::is_zero() const { return m_ == 1 && num_[0] == 0; }

bool CycNumber::is_rational() const { return m_ == 1; }

mpq_class CycNumber::to_rational() const {
    if (!is_rational()) throw DomainError("cyclotomic number is not rational");
    mpq_class r(num_[0], den_);
    r.canonicalize();
    return r;
}

CycNumber CycNumber::operator+(const CycNumber& o) const {
    const uint64_t m = std::lcm(m_, o.m_);
    CycNumber a = lifted(m), b = o.lifted(m);
    std::vector<mpz_class> full(m, 0);
    for (size_t i = 0; i < a.num_.size(); ++i) full[i] += a.num_[i] * b.den_;
    for (size_t i = 0; i < b.num_.size(); ++i) full[i] += b.num_[i] * a.den_;
    return reduce(m, std::move(full), a.den_ * b.den_);
}

CycNumber CycNumber::operator-() const {
    CycNumber r = *this;
    for (auto& c : r.num_) c = -c;
    return r;
}

CycNumber CycNumber::operator-(const CycNumber& o) const { return *this + (-o); }

CycNumber CycNumber::operator*(const CycNumber& o) const {
    const uint64_t m = std::lcm(m_, o.m_);
    CycNumber a = lifted(m), b = o.lifted(m);
    std::vector<mpz_class> full(m, 0);
    for (size_t i = 0; i < a.num_.size(); ++i) {
        if (a.num_[i] == 0) continue;
        for (size_t j = 0; j < b.num_.size(); ++j)
            if (b.num_[j] != 0) full[(i + j) % m] += a.num_[i] * b.num_[j];
    }
    return reduce(m, std::move(full), a.den_ * b.den_);
}

bool CycNumber::operator==(const CycNumber& o) const {
    if (m_ == o.m_) return den_ == o.den_ && num_ == o.num_;
    return (*this - o).is_zero();
}

std::string CycNumber::to_string() const {
    std::ostringstream out;
    if (is_rational()) {
        out << num_[0];
        if (den_ != 1) out << "/" << den_;
        return out.str();
    }
    out << "(";
    bool first = true;
    for (size_t i = 0; i < num_.size(); ++i) {
        if (num_[i] == 0) continue;
        mpz_class c = num_[i];
        if (!first) out << (c < 0 ? " - " : " + ");
        else if (c < 0) out << "-";
        mpz_class a = abs(c);
        if (i == 0) out << a;
        else {
            if (a != 1) out << a << "*";
            out << "z";
            if (i > 1) out << "^" << i;
        }
        first = false;
    }
    out << ")";
    if (den_ != 1) out << "/" << den_;
    out << " [z=zeta_" << m_ << "]";
    return out.str();
}

}  // namespace stf
