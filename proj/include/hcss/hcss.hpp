#pragma once

#include "hcss/alphabet.hpp"
#include "hcss/awgn.hpp"
#include "hcss/bigint.hpp"
#include "hcss/codebook.hpp"
#include "hcss/codecs.hpp"
#include "hcss/demapper.hpp"
#include "hcss/error.hpp"
#include "hcss/gn_fit.hpp"
#include "hcss/maxwell_boltzmann.hpp"
#include "hcss/metrics.hpp"
#include "hcss/multiset_rank.hpp"
#include "hcss/pas_frame.hpp"
#include "hcss/symbol_mapping.hpp"
