#pragma once

// Ring-linear private information retrieval: exact arithmetic over Z_m and
// its chain-ring factors, codes over those rings, the single-server PIR
// protocol built from them, the completeness repair condition, and the
// rank-difference attack that recovers the queried index.

#include "ringpir/attack.hpp"
#include "ringpir/chain_code.hpp"
#include "ringpir/cyclic_code.hpp"
#include "ringpir/errors.hpp"
#include "ringpir/fixtures.hpp"
#include "ringpir/matrix.hpp"
#include "ringpir/pir.hpp"
#include "ringpir/ring.hpp"
#include "ringpir/rng.hpp"
#include "ringpir/zm_code.hpp"
