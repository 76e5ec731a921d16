#ifndef CAPACITY_CAPACITY_HPP
#define CAPACITY_CAPACITY_HPP

#include "capacity/error.hpp"
#include "capacity/geometry.hpp"
#include "capacity/basis.hpp"
#include "capacity/quadrature.hpp"
#include "capacity/boundary_integrals.hpp"
#include "capacity/capacity_solver.hpp"
#include "capacity/exact_formulas.hpp"
#include "capacity/discrete_capacity.hpp"
#include "capacity/subadditivity_lab.hpp"

#endif
