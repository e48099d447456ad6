/*
 Copyright 2026 The dfkmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef DFKMPC_DFKMPC_HPP
#define DFKMPC_DFKMPC_HPP

// Umbrella header for the library modules. The CLI front end (cli.hpp) is
// separate because it pulls in CLI11.

#include "dfkmpc/control.hpp"
#include "dfkmpc/errors.hpp"
#include "dfkmpc/experiments.hpp"
#include "dfkmpc/hankel.hpp"
#include "dfkmpc/koopman_id.hpp"
#include "dfkmpc/numerics.hpp"
#include "dfkmpc/qp.hpp"
#include "dfkmpc/traffic_sim.hpp"

#endif // DFKMPC_DFKMPC_HPP
