#pragma once

/// Umbrella header.

#include "element.hpp"
#include "monoid.hpp"
#include "catalog.hpp"
#include "krelation.hpp"
#include "transport.hpp"
#include "joins.hpp"
#include "hypergraph.hpp"
#include "consistency.hpp"
#include "covers.hpp"
#include "io.hpp"
