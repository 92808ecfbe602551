#pragma once

#include "setcomp/bench.hpp"
#include "setcomp/codecs.hpp"
#include "setcomp/container.hpp"
#include "setcomp/corpus.hpp"
#include "setcomp/distributions.hpp"
#include "setcomp/emitter.hpp"
#include "setcomp/error.hpp"
#include "setcomp/pmf.hpp"
#include "setcomp/range_coder.hpp"
#include "setcomp/settree.hpp"
#include "setcomp/stats.hpp"
