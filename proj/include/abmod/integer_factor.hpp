#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace abmod {

namespace detail {

inline bool is_probable_prime(const mpz_class& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

// Brent's variant of Pollard rho; n odd composite.
inline mpz_class pollard_rho(const mpz_class& n) {
  for (unsigned long c = 1;; ++c) {
    mpz_class y = 2, x, g = 1, q = 1, ys;
    unsigned long r = 1, m = 128;
    auto f = [&](const mpz_class& v) {
      mpz_class t = v * v + c;
      return mpz_class(t % n);
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = (q * abs(mpz_class(x - y))) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        mpz_class d = abs(mpz_class(x - ys));
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void factor_into(mpz_class n, std::map<mpz_class, int>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    ++out[n];
    return;
  }
  mpz_class d = pollard_rho(n);
  factor_into(d, out);
  factor_into(mpz_class(n / d), out);
}

}  // namespace detail

// Prime factorization of |n| for n != 0, as (prime, exponent) ascending.
inline std::vector<std::pair<mpz_class, int>> factor_integer(mpz_class n) {
  n = abs(n);
  std::map<mpz_class, int> found;
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++found[mpz_class(p)];
      n /= p;
    }
  }
  // wheel-free small trial division keeps rho inputs free of tiny factors
  for (unsigned long p = 7; p < 10000 && n > 1; p += 2) {
    if (mpz_class(p) * p > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++found[mpz_class(p)];
      n /= p;
    }
  }
  if (n > 1) detail::factor_into(n, found);
  return {found.begin(), found.end()};
}

}  // namespace abmod
