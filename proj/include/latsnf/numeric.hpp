#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace latsnf {

// Exact arithmetic everywhere the contracts demand it: arbitrary-precision
// integers and canonical rationals.  mpq_class keeps fractions reduced with a
// positive denominator, which is exactly the normalization we promise.
using Int = mpz_class;
using Rat = mpq_class;

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int mod_floor(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Representative of a mod n in (-n/2, n/2].
inline Int mod_centered(const Int& a, const Int& n) {
    Int r = mod_floor(a, n);
    if (2 * r > n) r -= n;
    return r;
}

// Nearest integer to a rational; ties round toward +infinity (floor(x + 1/2)).
inline Int round_nearest(const Rat& x) {
    Rat shifted = x + Rat(1, 2);
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
    return q;
}

inline Int floor_rat(const Rat& x) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }
inline Int int_abs(const Int& x) { return x < 0 ? Int(-x) : x; }

inline Rat norm2_exact(const RatVec& v) {
    Rat s = 0;
    for (const Rat& x : v) s += x * x;
    return s;
}

inline Int norm2_exact(const IntVec& v) {
    Int s = 0;
    for (const Int& x : v) s += x * x;
    return s;
}

inline double to_double(const Rat& x) { return x.get_d(); }
inline double to_double(const Int& x) { return x.get_d(); }

inline RatVec to_rat_vec(const IntVec& v) {
    RatVec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
    return r;
}

// Parses "p/q" or a plain integer; used by the text formats and CLI flags.
Rat parse_rat(const std::string& s);
std::string rat_to_string(const Rat& x);

}  // namespace latsnf
