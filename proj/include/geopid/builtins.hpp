#pragma once

#include "geopid/dynamics.hpp"
#include "geopid/morse.hpp"

namespace geopid::builtin {

// Two-wheeled mobile robot on R^2 x S^1: locally Euclidean metric, rolling
// constraint xdot sin(theta) - ydot cos(theta) = 0, basis columns
// (0,0,1) and (cos theta, sin theta, 0) so u = (thetadot, v).
MechanicalSystem unicycle_system();

// V = 1/2 (x^2 + y^2) + (1 - cos theta), minimum at the identity. Its
// D-critical set is the vertical axis x = 0 with theta in {0, pi}.
MorseSpec unicycle_morse();

// Point particle of mass m in the plane constrained to circles about the
// origin (basis (-y, x)). The basis is rank deficient at the origin, which
// must stay outside any queried region.
MechanicalSystem circle_particle_system(double mass = 1.0);

// Regulates the angular position to the point (radius, 0) on the particle's
// own circle: V = 1/2 ((x - radius)^2 + y^2).
MorseSpec circle_particle_morse(double radius = 1.5);

// Unconstrained R^n with the identity metric and V = 1/2 |x - x_d|^2; the
// geometric pipeline reduces to the classical Euclidean PID loop here.
MechanicalSystem euclidean_system(int n);
MorseSpec euclidean_morse(int n, const Eigen::VectorXd& x_d);

} // namespace geopid::builtin
