#pragma once

#include "kkb/akkb.hpp"
#include "kkb/common.hpp"
#include "kkb/csv.hpp"
#include "kkb/data_model.hpp"
#include "kkb/eval.hpp"
#include "kkb/kernels.hpp"
#include "kkb/kgroups.hpp"
#include "kkb/rng.hpp"
#include "kkb/synth.hpp"
