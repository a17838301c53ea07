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

#ifndef beamspot_errors_H
#define beamspot_errors_H

#include <stdexcept>
#include <string>

namespace beamspot
{

// Base class for all library failures.
struct error : std::runtime_error
{
    explicit error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent configuration (bad schema, unknown key, grid too
// narrow for the requested distortion order, ...). CLI exit code 2.
struct config_error : error
{
    explicit config_error(const std::string &msg) : error(msg) {}
};

// Filesystem failures; message carries the offending path. CLI exit code 3.
struct io_error : error
{
    explicit io_error(const std::string &msg) : error(msg) {}
};

// Location inside the reference distance of an array, where the far-field
// channel parameterization is undefined.
struct geometry_error : error
{
    explicit geometry_error(const std::string &msg) : error(msg) {}
};

// Lag shift beyond the representable correlation window.
struct aliasing_error : error
{
    explicit aliasing_error(const std::string &msg) : error(msg) {}
};

// Polynomial order outside the supported closed forms.
struct order_error : error
{
    explicit order_error(const std::string &msg) : error(msg) {}
};

// Model-consistency violation (e.g. a cross-correlation exceeding the input
// power beyond numerical slack).
struct consistency_error : error
{
    explicit consistency_error(const std::string &msg) : error(msg) {}
};

} // namespace beamspot

#endif
