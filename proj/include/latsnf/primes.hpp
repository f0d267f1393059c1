#pragma once

#include "latsnf/numeric.hpp"

namespace latsnf {

// Miller-Rabin primality test.  Deterministic witness set {2,3,...,41} for
// inputs below 3.317e24 (where those witnesses are known exact); 64 rounds of
// pseudorandom bases, derived deterministically from n, above that.
bool is_prime(const Int& n);

// Smallest prime p >= x, together with the offset p - x.
struct NextPrime {
    Int p;
    Int delta;
};
NextPrime next_prime_from(const Int& x);

// Inverse of a modulo prime-or-not N; NoInverseError when gcd(a, N) != 1.
Int mod_inverse(const Int& a, const Int& N);

}  // namespace latsnf
