#pragma once

#include "cflow/alpha.hpp"
#include "cflow/approximator.hpp"
#include "cflow/conductance.hpp"
#include "cflow/degree.hpp"
#include "cflow/generators.hpp"
#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"
#include "cflow/hierarchy.hpp"
#include "cflow/io.hpp"
#include "cflow/oracle.hpp"
#include "cflow/potential.hpp"
#include "cflow/softmax.hpp"
#include "cflow/solver.hpp"
#include "cflow/tree.hpp"
