#pragma once

// Umbrella header: a deterministic-MDP solver running the simplex method with
// the highest-gain pivot rule on the flux polytope, in exact rational or
// float arithmetic, instrumented so the structural facts the pivoting relies
// on (flux layers, gain identities, monotone values, per-pivot progress,
// cycle events) are all checkable per run.

#include "fluxmdp/evaluate.hpp"
#include "fluxmdp/experiments.hpp"
#include "fluxmdp/generate.hpp"
#include "fluxmdp/instance.hpp"
#include "fluxmdp/numerics.hpp"
#include "fluxmdp/oracle.hpp"
#include "fluxmdp/policy.hpp"
#include "fluxmdp/rational.hpp"
#include "fluxmdp/serialize.hpp"
#include "fluxmdp/simplex.hpp"
#include "fluxmdp/verify.hpp"
