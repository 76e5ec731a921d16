#ifndef CAPACITY_EXACT_FORMULAS_HPP
#define CAPACITY_EXACT_FORMULAS_HPP

///
/// \file exact_formulas.hpp
///
/// Closed-form capacities: Jacobi theta functions, two equal disks, the
/// square, and the two-disk ratio f(q) = gamma / (2r) with its scaled
/// logarithmic derivative u(q) = q f'(q) / f(q).
///

#include <cmath>
#include <numbers>
#include <string>

#include "capacity/error.hpp"

namespace capacity
{

enum class ThetaForm
{
    series,
    product
};

namespace detail
{

inline void check_nome(double q)
{
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("nome must lie in (0, 1), got " + std::to_string(q));
}

/// q^e for q in [0, 1) through exp(e log q).
inline double nome_power(double log_q, double e)
{
    return std::exp(e * log_q);
}

/// 1 - q^e without cancellation.
inline double one_minus_power(double log_q, double e)
{
    return -std::expm1(e * log_q);
}

// Series in the exponent offset: sum over n >= 0 of sign^n q^{(n + shift)^2},
// stopped once a term drops below 1e-20 of the partial sum. Long double keeps
// the last bit of the double result honest.
inline long double theta_tail_ld(double q, double shift, bool alternate)
{
    if (q == 0.0)
        return shift == 0.0 ? 1.0L : 0.0L;
    const long double lq = std::log(static_cast<long double>(q));
    long double sum      = 0.0L;
    for (int n = 0;; ++n)
    {
        const long double e    = (n + shift) * (n + shift);
        const long double term = std::exp(e * lq);
        sum += (alternate && n % 2 == 1) ? -term : term;
        if (n > 0 && term < 1e-20L * std::abs(sum))
            break;
        if (term == 0.0L)
            break;
    }
    return sum;
}

// sum_{n in Z} q^{(n+1/2)^2} = 2 sum_{n>=0} q^{(n+1/2)^2}
inline double theta2_series(double q)
{
    return static_cast<double>(2.0L * theta_tail_ld(q, 0.5, false));
}

inline double theta3_series(double q)
{
    return static_cast<double>(2.0L * theta_tail_ld(q, 0.0, false) - 1.0L);
}

inline double theta4_series(double q)
{
    return static_cast<double>(2.0L * theta_tail_ld(q, 0.0, true) - 1.0L);
}

/// prod over n >= 1 of (1 - q^{2n})(1 + s q^{2n - o})^2, o in {0, 1}.
/// Near q = 1 the log-sum cancels heavily, so it is kept in long double.
inline double theta_product(double q, int offset, double sign)
{
    if (q == 0.0)
        return 1.0;
    const long double lq = std::log(static_cast<long double>(q));
    long double log_sum  = 0.0L;
    for (int n = 1;; ++n)
    {
        const long double inner = std::exp((2.0L * n - offset) * lq);
        log_sum += std::log(-std::expm1(2.0L * n * lq)) +
                   2.0L * std::log1p(sign * inner);
        if (std::exp((2.0L * n - 1.0L) * lq) < 1e-20L)
            break;
    }
    return static_cast<double>(std::exp(log_sum));
}

inline double theta2_product(double q)
{
    return q == 0.0 ? 0.0
                    : 2.0 * std::pow(q, 0.25) * theta_product(q, 0, 1.0);
}

inline double theta3_product(double q) { return theta_product(q, 1, 1.0); }
inline double theta4_product(double q) { return theta_product(q, 1, -1.0); }

inline constexpr double modular_threshold = 0.99;

/// For q = e^{-pi t}, the dual nome e^{-pi / t}.
inline double dual_nome(double q, double& t)
{
    t = -std::log(q) / std::numbers::pi;
    return std::exp(-std::numbers::pi / t);
}

} // namespace detail

///
/// Jacobi theta functions on (0, 1). For q > 0.99 values are obtained from
/// the dual nome through
///   theta2(e^{-pi t}) = theta4(e^{-pi/t}) / sqrt(t),
///   theta3(e^{-pi t}) = theta3(e^{-pi/t}) / sqrt(t),
///   theta4(e^{-pi t}) = theta2(e^{-pi/t}) / sqrt(t).
///
inline double theta2(double q, ThetaForm form = ThetaForm::series)
{
    detail::check_nome(q);
    if (q > detail::modular_threshold)
    {
        double t       = 0.0;
        const double p = detail::dual_nome(q, t);
        return detail::theta4_series(p) / std::sqrt(t);
    }
    return form == ThetaForm::series ? detail::theta2_series(q)
                                     : detail::theta2_product(q);
}

inline double theta3(double q, ThetaForm form = ThetaForm::series)
{
    detail::check_nome(q);
    if (q > detail::modular_threshold)
    {
        double t       = 0.0;
        const double p = detail::dual_nome(q, t);
        return detail::theta3_series(p) / std::sqrt(t);
    }
    return form == ThetaForm::series ? detail::theta3_series(q)
                                     : detail::theta3_product(q);
}

inline double theta4(double q, ThetaForm form = ThetaForm::series)
{
    detail::check_nome(q);
    if (q > detail::modular_threshold)
    {
        double t       = 0.0;
        const double p = detail::dual_nome(q, t);
        return detail::theta2_series(p) / std::sqrt(t);
    }
    return form == ThetaForm::series ? detail::theta4_series(q)
                                     : detail::theta4_product(q);
}

namespace detail
{

inline void check_disks(double c, double r)
{
    if (!(r > 0.0) || !(c > r) || !std::isfinite(c))
        throw DomainError("two-disk formulas need 0 < r < c, got c = " +
                          std::to_string(c) + ", r = " + std::to_string(r));
}

} // namespace detail

///
/// Solution in (0, 1) of c / r = (q^{-1/2} + q^{1/2}) / 2, that is
/// (2c^2 - r^2 - 2c sqrt(c^2 - r^2)) / r^2, evaluated as
/// (r / (c + sqrt(c^2 - r^2)))^2 to avoid cancellation for small r.
///
inline double nome_from_geometry(double c, double r)
{
    detail::check_disks(c, r);
    const double s = std::sqrt((c - r) * (c + r));
    const double x = r / (c + s);
    return x * x;
}

/// Capacity of the union of the closed disks of radius r centred at -c, c:
/// sqrt(c^2 - r^2) theta2(q)^2.
inline double two_disk_capacity(double c, double r)
{
    const double q = nome_from_geometry(c, r);
    if (q > detail::modular_threshold)
    {
        const double t2 = theta2(q);
        return std::sqrt((c - r) * (c + r)) * t2 * t2;
    }
    const long double cl = c, rl = r;
    const long double t2 = 2.0L * detail::theta_tail_ld(q, 0.5, false);
    return static_cast<double>(std::sqrt((cl - rl) * (cl + rl)) * t2 * t2);
}

/// Arithmetic-geometric mean, iterated to relative agreement 1e-15.
inline double agm(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("AGM needs positive arguments");
    for (int it = 0; it < 64; ++it)
    {
        if (std::abs(a - b) <= 1e-15 * a)
            break;
        const double an = 0.5 * (a + b);
        b               = std::sqrt(a * b);
        a               = an;
    }
    return 0.5 * (a + b);
}

/// Complete elliptic integral of the first kind K(k) = pi / (2 M(1, k')),
/// with the complementary modulus passed explicitly.
inline double elliptic_k(double k, double k_complement)
{
    if (!(k >= 0.0 && k < 1.0) || !(k_complement > 0.0))
        throw DomainError("elliptic modulus must lie in [0, 1)");
    return std::numbers::pi / (2.0 * agm(1.0, k_complement));
}

inline double elliptic_k(double k)
{
    if (!(k >= 0.0 && k < 1.0))
        throw DomainError("elliptic modulus must lie in [0, 1)");
    return elliptic_k(k, std::sqrt((1.0 - k) * (1.0 + k)));
}

///
/// Two-disk capacity in Murai's form
///   (2/pi) c k F(k) tanh((pi/2) F(k') / F(k)),  k = theta2^2 / theta3^2,
/// with k' = theta4^2 / theta3^2.
///
inline double murai_capacity(double c, double r)
{
    const double q  = nome_from_geometry(c, r);
    const double t2 = theta2(q);
    const double t3 = theta3(q);
    const double t4 = theta4(q);
    const double k  = (t2 * t2) / (t3 * t3);
    const double kc = (t4 * t4) / (t3 * t3);
    const double fk = elliptic_k(k, kc);
    const double fc = elliptic_k(kc, k);
    return 2.0 / std::numbers::pi * c * k * fk *
           std::tanh(0.5 * std::numbers::pi * fc / fk);
}

/// Gamma(1/4) to 20 digits.
inline constexpr long double gamma_quarter = 3.6256099082219083119L;

/// Capacity of the square with corners +-s, +-is:
/// s sqrt(2) Gamma(1/4)^2 / (4 pi^{3/2}).
inline double square_capacity(double s)
{
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("square half-diagonal must be positive");
    const long double pi = std::numbers::pi_v<long double>;
    const long double unit =
        std::sqrt(2.0L) * gamma_quarter * gamma_quarter /
        (4.0L * pi * std::sqrt(pi));
    return static_cast<double>(static_cast<long double>(s) * unit);
}

///
/// f(q) = (1/4)(q^{-1/2} - q^{1/2}) theta2(q)^2
///      = (1 - q) prod (1 - q^{4n})^2 (1 + q^{2n})^2,
/// equal to gamma / (2r) for the two disks with nome q. Product form.
///
inline double ratio_f(double q)
{
    detail::check_nome(q);
    const double lq = std::log(q);
    double log_sum  = std::log(-std::expm1(lq));
    for (int n = 1;; ++n)
    {
        log_sum += 2.0 * std::log(detail::one_minus_power(lq, 4.0 * n)) +
                   2.0 * std::log1p(detail::nome_power(lq, 2.0 * n));
        if (detail::nome_power(lq, 2.0 * n) < 1e-18)
            break;
    }
    return std::exp(log_sum);
}

/// Theta form of f; agrees with ratio_f.
inline double ratio_f_theta(double q)
{
    const double t2 = theta2(q);
    return 0.25 * (1.0 / std::sqrt(q) - std::sqrt(q)) * t2 * t2;
}

/// u(q) = q f'(q)/f(q) summed over n = 1..terms.
inline double log_deriv_u(double q, int terms)
{
    detail::check_nome(q);
    if (terms < 1)
        throw DomainError("log_deriv_u needs at least one term");
    const double lq = std::log(q);
    double out      = -q / (1.0 - q);
    for (int n = 1; n <= terms; ++n)
    {
        out -= 8.0 * n * detail::nome_power(lq, 4.0 * n) /
               detail::one_minus_power(lq, 4.0 * n);
        out += 4.0 * n * detail::nome_power(lq, 2.0 * n) /
               (1.0 + detail::nome_power(lq, 2.0 * n));
    }
    return out;
}

/// u(q) with the series summed until the terms are negligible.
inline double log_deriv_u(double q)
{
    detail::check_nome(q);
    const double lq = std::log(q);
    int terms       = 1;
    while (terms < 1000000 &&
           4.0 * terms * detail::nome_power(lq, 2.0 * terms) > 1e-18)
        ++terms;
    return log_deriv_u(q, terms);
}

///
/// Upper bound for u(q) from k - 1 exact terms and the tails bounded by
///   8n q^{4n} / (1 - q^{4n}) > 8n q^{4n},  4n q^{2n} / (1 + q^{2n}) < 4n q^{2n},
/// using sum_{n>=k} n x^n = (k x^k - (k-1) x^{k+1}) / (1-x)^2.
///
inline double log_deriv_u_bound(double q, int k)
{
    detail::check_nome(q);
    if (k < 2)
        throw DomainError("log_deriv_u_bound needs k >= 2");
    double out = k > 1 ? log_deriv_u(q, k - 1) : -q / (1.0 - q);
    auto tail  = [k](double x) {
        return (k * std::pow(x, k) - (k - 1) * std::pow(x, k + 1)) /
               ((1.0 - x) * (1.0 - x));
    };
    out -= 8.0 * tail(std::pow(q, 4));
    out += 4.0 * tail(q * q);
    return out;
}

} // namespace capacity

#endif
