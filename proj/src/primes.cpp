#include "latsnf/primes.hpp"

#include <array>

#include "latsnf/errors.hpp"

namespace latsnf {

namespace {

// Returns true if n passes a Miller-Rabin round with the given base.
bool mr_round(const Int& n, const Int& base, const Int& d, unsigned long r) {
    Int a = mod_floor(base, n);
    if (a <= 1 || a == n - 1) return true;
    Int x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < r; ++i) {
        x = x * x % n;
        if (x == n - 1) return true;
    }
    return false;
}

// First 13 primes: a witness set proven exact below 3,317,044,064,679,887,385,961,981.
constexpr std::array<int, 13> kSmallWitnesses = {2,  3,  5,  7,  11, 13, 17,
                                                19, 23, 29, 31, 37, 41};

const Int& deterministic_threshold() {
    static const Int t("3317044064679887385961981");
    return t;
}

}  // namespace

bool is_prime(const Int& n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
        if (n == p) return true;
        if (mod_floor(n, Int(p)) == 0) return false;
    }
    Int d = n - 1;
    unsigned long r = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++r;
    }
    if (n < deterministic_threshold()) {
        for (int w : kSmallWitnesses)
            if (!mr_round(n, Int(w), d, r)) return false;
        return true;
    }
    // Above the deterministic range: 64 rounds with bases derived from n, so
    // the answer is still a pure function of the input.
    Int base = mod_floor(Int(0xb5ad4ec) + n, n);
    for (int round = 0; round < 64; ++round) {
        base = mod_floor(base * base + Int(round) + 1, n);
        Int a = 2 + mod_floor(base, n - 3);
        if (!mr_round(n, a, d, r)) return false;
    }
    return true;
}

NextPrime next_prime_from(const Int& x) {
    if (x <= 2) return {Int(2), Int(2 - x)};
    Int p = x;
    while (!is_prime(p)) ++p;
    return {p, p - x};
}

Int mod_inverse(const Int& a, const Int& N) {
    if (N <= 1) throw ContractError("modulus must exceed 1");
    Int inv;
    if (!mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), N.get_mpz_t()))
        throw NoInverseError(a.get_str() + " has no inverse mod " + N.get_str());
    return inv;
}

}  // namespace latsnf
