#pragma once

#include "srlda/errors.hpp"
#include "srlda/normal.hpp"
#include "srlda/linalg.hpp"
#include "srlda/dataset.hpp"
#include "srlda/spiked_model.hpp"
#include "srlda/error_surface.hpp"
#include "srlda/optimizer.hpp"
#include "srlda/classifiers.hpp"
#include "srlda/model_io.hpp"
#include "srlda/rng.hpp"
#include "srlda/experiments.hpp"
#include "srlda/report_io.hpp"
#include "srlda/config.hpp"
