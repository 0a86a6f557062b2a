// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include "ria/channel.hpp"
#include "ria/config_io.hpp"
#include "ria/ee_power.hpp"
#include "ria/error.hpp"
#include "ria/export.hpp"
#include "ria/inner.hpp"
#include "ria/network_config.hpp"
#include "ria/numerics.hpp"
#include "ria/outer.hpp"
#include "ria/receive.hpp"
#include "ria/sim.hpp"
