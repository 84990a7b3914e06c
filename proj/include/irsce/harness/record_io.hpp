// SPDX-License-Identifier: Apache-2.0
//
// irsce: cascaded IRS channel estimation and training design
// Copyright (C) 2026 The irsce authors
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


#ifndef IRSCE_HARNESS_RECORD_IO_HPP
#define IRSCE_HARNESS_RECORD_IO_HPP

#include "irsce/model.hpp"
#include "irsce/protocol.hpp"

#include <string>

namespace irsce::harness {

/// A training record together with the channel it was drawn from.
struct StoredRecord
{
    TrainingRecord<double> record;
    ChannelRealization<double> channel;
};

/// Writes `<prefix>.bin` (little-endian float64, interleaved re/im, column-major,
/// arrays in sidecar order) and `<prefix>.json` describing the arrays.
void write_record(const std::string &prefix, const StoredRecord &rec);
StoredRecord read_record(const std::string &prefix);

} // namespace irsce::harness

#endif // IRSCE_HARNESS_RECORD_IO_HPP
