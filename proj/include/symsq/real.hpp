#pragma once

#include <mpfr.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace symsq {

namespace detail {
inline thread_local mpfr_prec_t working_bits = 192;
}

inline long working_precision() { return static_cast<long>(detail::working_bits); }

// Scoped override of the precision used for newly created Real values.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(long bits) : saved_(detail::working_bits) {
    if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX)
      throw std::invalid_argument("working precision out of range");
    detail::working_bits = static_cast<mpfr_prec_t>(bits);
  }
  ~WorkingPrecision() { detail::working_bits = saved_; }
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

 private:
  mpfr_prec_t saved_;
};

// Owning wrapper around mpfr_t.  Results of arithmetic are created at the
// current working precision; copies keep the precision of their source.
class Real {
 public:
  Real() {
    mpfr_init2(v_, detail::working_bits);
    mpfr_set_zero(v_, 1);
  }
  Real(double d) {
    mpfr_init2(v_, detail::working_bits);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  template <std::integral I>
  Real(I i) {
    mpfr_init2(v_, detail::working_bits);
    if constexpr (std::is_signed_v<I>)
      mpfr_set_sj(v_, static_cast<intmax_t>(i), MPFR_RNDN);
    else
      mpfr_set_uj(v_, static_cast<uintmax_t>(i), MPFR_RNDN);
  }
  explicit Real(const std::string& s) {
    mpfr_init2(v_, detail::working_bits);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw std::invalid_argument("not a decimal number: " + s);
  }
  explicit Real(const char* s) : Real(std::string(s)) {}

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    *v_ = *o.v_;
    o.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& o) {
    if (this == &o) return *this;
    if (v_->_mpfr_d == nullptr)
      mpfr_init2(v_, mpfr_get_prec(o.v_));
    else if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_))
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    std::swap(*v_, *o.v_);
    return *this;
  }
  ~Real() {
    if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
  }

  // Value rounded to `bits`.
  Real rounded(long bits) const {
    WorkingPrecision wp(bits);
    Real r;
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  // floor(log2|x|) + 1 for nonzero finite x.
  long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }

  // Scientific notation with `digits` significant digits; deterministic.
  std::string to_string(int digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits > 1 ? digits - 1 : 0, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  Real operator-() const {
    Real r;
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator+=(long o) { mpfr_add_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator-=(long o) { mpfr_sub_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator+=(double o) { mpfr_add_d(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator-=(double o) { mpfr_sub_d(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator*=(double o) { mpfr_mul_d(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator/=(double o) { mpfr_div_d(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator+=(int o) { return *this += static_cast<long>(o); }
  Real& operator-=(int o) { return *this -= static_cast<long>(o); }
  Real& operator*=(int o) { return *this *= static_cast<long>(o); }
  Real& operator/=(int o) { return *this /= static_cast<long>(o); }

 private:
  mpfr_t v_;
};

#define SYMSQ_REAL_BINOP(OP, FN, FN_SI, FN_D, SI_FN, D_FN)                  \
  inline Real operator OP(const Real& a, const Real& b) {                  \
    Real r;                                                                \
    FN(r.get(), a.get(), b.get(), MPFR_RNDN);                              \
    return r;                                                              \
  }                                                                        \
  inline Real operator OP(const Real& a, long b) {                         \
    Real r;                                                                \
    FN_SI(r.get(), a.get(), b, MPFR_RNDN);                                 \
    return r;                                                              \
  }                                                                        \
  inline Real operator OP(long a, const Real& b) {                         \
    Real r;                                                                \
    SI_FN(r.get(), a, b.get(), MPFR_RNDN);                                 \
    return r;                                                              \
  }                                                                        \
  inline Real operator OP(const Real& a, double b) {                       \
    Real r;                                                                \
    FN_D(r.get(), a.get(), b, MPFR_RNDN);                                  \
    return r;                                                              \
  }                                                                        \
  inline Real operator OP(double a, const Real& b) {                       \
    Real r;                                                                \
    D_FN(r.get(), a, b.get(), MPFR_RNDN);                                  \
    return r;                                                              \
  }                                                                        \
  inline Real operator OP(const Real& a, int b) { return a OP static_cast<long>(b); } \
  inline Real operator OP(int a, const Real& b) { return static_cast<long>(a) OP b; }

namespace detail {
inline int add_si_rev(mpfr_ptr r, long a, mpfr_srcptr b, mpfr_rnd_t m) { return mpfr_add_si(r, b, a, m); }
inline int add_d_rev(mpfr_ptr r, double a, mpfr_srcptr b, mpfr_rnd_t m) { return mpfr_add_d(r, b, a, m); }
inline int mul_si_rev(mpfr_ptr r, long a, mpfr_srcptr b, mpfr_rnd_t m) { return mpfr_mul_si(r, b, a, m); }
inline int mul_d_rev(mpfr_ptr r, double a, mpfr_srcptr b, mpfr_rnd_t m) { return mpfr_mul_d(r, b, a, m); }
}  // namespace detail

SYMSQ_REAL_BINOP(+, mpfr_add, mpfr_add_si, mpfr_add_d, detail::add_si_rev, detail::add_d_rev)
SYMSQ_REAL_BINOP(-, mpfr_sub, mpfr_sub_si, mpfr_sub_d, mpfr_si_sub, mpfr_d_sub)
SYMSQ_REAL_BINOP(*, mpfr_mul, mpfr_mul_si, mpfr_mul_d, detail::mul_si_rev, detail::mul_d_rev)
SYMSQ_REAL_BINOP(/, mpfr_div, mpfr_div_si, mpfr_div_d, mpfr_si_div, mpfr_d_div)
#undef SYMSQ_REAL_BINOP

inline int compare(const Real& a, const Real& b) { return mpfr_cmp(a.get(), b.get()); }
inline int compare(const Real& a, double b) { return mpfr_cmp_d(a.get(), b); }
inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
inline bool operator<(const Real& a, const Real& b) { return compare(a, b) < 0; }
inline bool operator>(const Real& a, const Real& b) { return compare(a, b) > 0; }
inline bool operator<=(const Real& a, const Real& b) { return compare(a, b) <= 0; }
inline bool operator>=(const Real& a, const Real& b) { return compare(a, b) >= 0; }
inline bool operator<(const Real& a, double b) { return compare(a, b) < 0; }
inline bool operator>(const Real& a, double b) { return compare(a, b) > 0; }
inline bool operator<=(const Real& a, double b) { return compare(a, b) <= 0; }
inline bool operator>=(const Real& a, double b) { return compare(a, b) >= 0; }

#define SYMSQ_REAL_FN1(NAME, FN)              \
  inline Real NAME(const Real& x) {           \
    Real r;                                   \
    FN(r.get(), x.get(), MPFR_RNDN);          \
    return r;                                 \
  }
SYMSQ_REAL_FN1(abs, mpfr_abs)
SYMSQ_REAL_FN1(sqrt, mpfr_sqrt)
SYMSQ_REAL_FN1(rec_sqrt, mpfr_rec_sqrt)
SYMSQ_REAL_FN1(exp, mpfr_exp)
SYMSQ_REAL_FN1(expm1, mpfr_expm1)
SYMSQ_REAL_FN1(log, mpfr_log)
SYMSQ_REAL_FN1(log1p, mpfr_log1p)
SYMSQ_REAL_FN1(log2, mpfr_log2)
SYMSQ_REAL_FN1(sin, mpfr_sin)
SYMSQ_REAL_FN1(cos, mpfr_cos)
SYMSQ_REAL_FN1(tan, mpfr_tan)
SYMSQ_REAL_FN1(cot, mpfr_cot)
SYMSQ_REAL_FN1(asin, mpfr_asin)
SYMSQ_REAL_FN1(acos, mpfr_acos)
SYMSQ_REAL_FN1(atan, mpfr_atan)
SYMSQ_REAL_FN1(sinh, mpfr_sinh)
SYMSQ_REAL_FN1(cosh, mpfr_cosh)
SYMSQ_REAL_FN1(tanh, mpfr_tanh)
SYMSQ_REAL_FN1(coth, mpfr_coth)
SYMSQ_REAL_FN1(atanh, mpfr_atanh)
#undef SYMSQ_REAL_FN1

inline Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.get(), x.get());
  return r;
}

inline Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}
inline Real pow(const Real& x, int n) { return pow(x, static_cast<long>(n)); }
inline Real pow(const Real& x, double y) { return pow(x, Real(y)); }
inline Real sqr(const Real& x) {
  Real r;
  mpfr_sqr(r.get(), x.get(), MPFR_RNDN);
  return r;
}
inline Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}
inline void sin_cos(const Real& x, Real& s, Real& c) { mpfr_sin_cos(s.get(), c.get(), x.get(), MPFR_RNDN); }
inline Real hypot(const Real& a, const Real& b) {
  Real r;
  mpfr_hypot(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return a < b ? a : b; }

// MPFR reference implementations, used only as independent test oracles.
inline Real mpfr_lngamma_ref(const Real& x) {
  Real r;
  mpfr_lngamma(r.get(), x.get(), MPFR_RNDN);
  return r;
}
inline Real mpfr_digamma_ref(const Real& x) {
  Real r;
  mpfr_digamma(r.get(), x.get(), MPFR_RNDN);
  return r;
}
inline Real mpfr_zeta_ref(const Real& x) {
  Real r;
  mpfr_zeta(r.get(), x.get(), MPFR_RNDN);
  return r;
}

inline Real const_pi() {
  Real r;
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
inline Real const_euler() {
  Real r;
  mpfr_const_euler(r.get(), MPFR_RNDN);
  return r;
}
inline Real const_log2() {
  Real r;
  mpfr_const_log2(r.get(), MPFR_RNDN);
  return r;
}

// log2|x| as a double, safe for magnitudes outside double range.
inline double log2_abs(const Real& x) {
  if (x.is_zero()) return -1e300;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

}  // namespace symsq
