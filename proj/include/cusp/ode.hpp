#pragma once

// Explicit Runge-Kutta method of order 8 (Dormand-Prince 8(5,3), coefficients as in
// Hairer's DOP853).  Step size is controlled by the embedded 5th-order estimate.

#include "cusp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

namespace cusp::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

struct IntegratorOptions {
    double tol = 1e-12;       // used as both absolute and relative tolerance
    long max_steps = 1'000'000;
    double max_step = 0.0;    // 0: unbounded
};

namespace dop853 {

inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;


inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

} // namespace dop853

/// Integrates y' = f(t, y) from t0 to t1 with local error control.
///
/// `f(t, y, dydt)` writes the derivative.  Each accepted step satisfies the
/// 5th-order embedded error estimate of DOP853 below options.tol in the mixed
/// norm (atol = rtol = tol).  The step is advanced with the 8th-order solution.  Throws
/// NumericalError on step-size underflow, non-finite state or too many steps.
template <std::size_t N, class Rhs>
State<N> integrate(const Rhs& f, double t0, double t1, State<N> y,
                   const IntegratorOptions& options = {}, IntegratorStats* stats = nullptr) {
    using namespace dop853;
    IntegratorStats local;
    IntegratorStats& st = stats ? *stats : local;
    if (!(options.tol > 0.0))
        throw DomainError("integrator tolerance must be positive");
    if (t0 == t1)
        return y;

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double tol = options.tol;
    const double hmax = options.max_step > 0.0 ? options.max_step : span;
    constexpr double safe = 0.9;
    constexpr double fac1 = 0.333;
    constexpr double fac2 = 6.0;

    State<N> k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, ytmp, k4b, k5b;
    auto eval = [&](double t, const State<N>& s, State<N>& out) {
        f(t, s, out);
        ++st.rhs_evals;
    };

    eval(t0, y, k1);

    // initial step guess (Hairer & Wanner, II.4)
    double h;
    {
        double dnf = 0.0;
        double dny = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol + tol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, hmax);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + dir * h * k1[i];
        eval(t0 + dir * h, ytmp, k2);
        double der2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol + tol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3)
                                         : std::pow(0.01 / der12, 1.0 / 8.0);
        h = std::min({100.0 * h, h1, hmax});
    }

    double t = t0;
    bool last = false;
    bool reject = false;
    for (;;) {
        if (st.accepted + st.rejected >= options.max_steps) {
            std::ostringstream msg;
            msg << "integrator exceeded " << options.max_steps << " steps at t = " << t;
            throw NumericalError(msg.str());
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "integrator step size underflow: h = " << h << " at t = " << t
                << " after " << st.accepted << " accepted steps";
            throw NumericalError(msg.str());
        }
        if ((std::abs(t1 - t) - h) <= 1e-14 * std::max(1.0, std::abs(t))) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        eval(t + c2 * hs, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        eval(t + c3 * hs, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a43 * k3[i]);
        eval(t + c4 * hs, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t + c5 * hs, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        eval(t + c6 * hs, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        eval(t + c7 * hs, ytmp, k7);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] +
                                   a87 * k7[i]);
        eval(t + c8 * hs, ytmp, k8);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                                   a97 * k7[i] + a98 * k8[i]);
        eval(t + c9 * hs, ytmp, k9);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                   a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        eval(t + c10 * hs, ytmp, k10);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                   a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        eval(t + c11 * hs, ytmp, k2); // k2 <- stage 11
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hs * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                   a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                   a1211 * k2[i]);
        eval(t + hs, ytmp, k3); // k3 <- stage 12

        for (std::size_t i = 0; i < N; ++i) {
            k4b[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                     b10 * k10[i] + b11 * k2[i] + b12 * k3[i];
            k5b[i] = y[i] + hs * k4b[i];
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol + tol * std::max(std::abs(y[i]), std::abs(k5b[i]));
            const double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] +
                              er9 * k9[i] + er10 * k10[i] + er11 * k2[i] + er12 * k3[i];
            err += (e5 / sk) * (e5 / sk);
        }
        // The 5th-order embedded estimate alone.  The blended 5th/3rd-order norm
        // used by Hairer's code badly underestimates steps that run into the flat
        // edge of a C-infinity bump.
        err = h * std::sqrt(err / static_cast<double>(N));
        if (!std::isfinite(err))
            throw NumericalError("integrator produced a non-finite error estimate");

        const double fac11 = std::pow(err, 1.0 / 6.0);
        double fac = fac11 / safe;
        fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac));
        double hnew = h / fac;

        if (err <= 1.0) {
            ++st.accepted;
            eval(t + hs, k5b, k4); // FSAL
            k1 = k4;
            y = k5b;
            t = last ? t1 : t + hs;
            if (last)
                return y;
            hnew = std::min(hnew, hmax);
            if (reject)
                hnew = std::min(hnew, h);
            reject = false;
            h = hnew;
        } else {
            ++st.rejected;
            last = false;
            reject = true;
            h = h / std::min(1.0 / fac1, fac11 / safe);
        }
    }
}

} // namespace cusp::ode
