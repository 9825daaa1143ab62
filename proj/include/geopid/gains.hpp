#pragma once

namespace geopid {

// PID gains. Positivity is required for certification and enforced there;
// the simulator intentionally accepts zero gains (free constrained motion).
struct Gains {
    double kp = 0.0;
    double kd = 0.0;
    double ki = 0.0;
};

// Coefficients of the cross terms in the Lyapunov function W. The selection
// mirrors the Euclidean design
//   alpha = ki/kd^2, beta = ki/kd, gamma = (ki^2 + ki kp kd)/kd^2,
//   sigma = 2 kappa ki,
// which is also what the geometric certificate assumes.
struct WCoeffs {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;

    static WCoeffs from_gains(const Gains& gains, double kappa = 1.0) {
        WCoeffs c;
        if (gains.kd > 0.0) {
            c.alpha = gains.ki / (gains.kd * gains.kd);
            c.beta = gains.ki / gains.kd;
            c.gamma = (gains.ki * gains.ki + gains.ki * gains.kp * gains.kd) /
                      (gains.kd * gains.kd);
            c.sigma = 2.0 * kappa * gains.ki;
        }
        return c;
    }
};

} // namespace geopid
