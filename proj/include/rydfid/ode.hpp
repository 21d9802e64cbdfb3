#pragma once

#include <boost/numeric/odeint.hpp>
#include <complex>
#include <vector>

// Thin wrapper around an adaptive Dormand-Prince (RK45) integrator for
// complex state vectors.  Default tolerances are tight enough that time
// integration error is negligible against basis-truncation error everywhere
// in this project.

namespace rydfid {

using cvec = std::vector<std::complex<double>>;

struct OdeOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  double initial_dt_fraction = 1e-3;  // of the span
};

// Integrates dy/dt = sys(y, dydt, t) from t0 to t1 in place.
template <class System>
void integrate_cvec(System&& sys, cvec& state, double t0, double t1,
                    const OdeOptions& opt = {}) {
  namespace od = boost::numeric::odeint;
  if (t1 <= t0) return;
  using stepper_t = od::runge_kutta_dopri5<cvec>;
  auto controlled = od::make_controlled<stepper_t>(opt.abs_tol, opt.rel_tol);
  const double dt0 = (t1 - t0) * opt.initial_dt_fraction;
  od::integrate_adaptive(controlled, std::forward<System>(sys), state, t0, t1,
                         dt0);
}

// Same, with an observer called at every accepted step.
template <class System, class Observer>
void integrate_cvec_observed(System&& sys, cvec& state, double t0, double t1,
                             Observer&& obs, const OdeOptions& opt = {}) {
  namespace od = boost::numeric::odeint;
  if (t1 <= t0) return;
  using stepper_t = od::runge_kutta_dopri5<cvec>;
  auto controlled = od::make_controlled<stepper_t>(opt.abs_tol, opt.rel_tol);
  const double dt0 = (t1 - t0) * opt.initial_dt_fraction;
  od::integrate_adaptive(controlled, std::forward<System>(sys), state, t0, t1,
                         dt0, std::forward<Observer>(obs));
}

}  // namespace rydfid
