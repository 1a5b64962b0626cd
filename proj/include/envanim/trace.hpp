// Copyright 2026 The envanim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "envanim/tensor.hpp"

namespace envanim {

/// Ordered record of named forward events, used to assert placement
/// contracts (which layers run where, and in what order within a stage).
struct ForwardTrace {
    struct Event {
        std::string kind;   // "res", "ref_attn", "blend", "temporal_attn", ...
        std::string stage;  // "down0".."down2", "mid", "up2".."up0", ...
    };
    std::vector<Event> events;

    bool capture_attention = false;
    std::vector<std::pair<std::string, Tensor>> attention_weights;

    void event(const std::string& kind, const std::string& stage) {
        events.push_back(Event{kind, stage});
    }
    int64_t count(const std::string& kind, const std::string& stage_prefix = "") const {
        int64_t n = 0;
        for (const auto& e : events)
            if (e.kind == kind && e.stage.rfind(stage_prefix, 0) == 0) ++n;
        return n;
    }
};

}  // namespace envanim
