// SPDX-License-Identifier: Apache-2.0
//
// beamspot   Distributed massive MIMO beamforming and PA distortion analysis
// Copyright (C) 2026 beamspot contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef beamspot_beamspot_H
#define beamspot_beamspot_H

#include "errors.hpp"
#include "fft.hpp"
#include "geometry.hpp"
#include "gridsweep.hpp"
#include "io.hpp"
#include "montecarlo.hpp"
#include "pa.hpp"
#include "precoder.hpp"
#include "psd_engine.hpp"
#include "rng.hpp"
#include "scenario_config.hpp"
#include "signals.hpp"
#include "threading.hpp"

#endif
