#ifndef TLNMF_TLNMF_HPP
#define TLNMF_TLNMF_HPP

#include "tlnmf/csv.hpp"
#include "tlnmf/driver.hpp"
#include "tlnmf/manifold.hpp"
#include "tlnmf/metrics.hpp"
#include "tlnmf/objective.hpp"
#include "tlnmf/random.hpp"
#include "tlnmf/signal_io.hpp"
#include "tlnmf/supervised.hpp"
#include "tlnmf/transform.hpp"
#include "tlnmf/types.hpp"
#include "tlnmf/updates.hpp"

#endif
