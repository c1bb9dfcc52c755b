// Copyright 2026 The tracefault Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "tracefault/attribution.hpp"
#include "tracefault/campaign.hpp"
#include "tracefault/config.hpp"
#include "tracefault/errors.hpp"
#include "tracefault/event_store.hpp"
#include "tracefault/hash.hpp"
#include "tracefault/metamorphic.hpp"
#include "tracefault/mock_components.hpp"
#include "tracefault/payload.hpp"
#include "tracefault/perturbation.hpp"
#include "tracefault/pipeline.hpp"
#include "tracefault/report.hpp"
#include "tracefault/synthetic.hpp"
#include "tracefault/trace.hpp"
