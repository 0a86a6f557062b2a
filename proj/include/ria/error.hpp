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

#include <stdexcept>
#include <string>

namespace ria {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RIA_DEFINE_ERROR(name)                                  \
    class name : public Error {                                 \
    public:                                                     \
        explicit name(const std::string& what) : Error(what) {} \
    }

RIA_DEFINE_ERROR(NotHermitian);
RIA_DEFINE_ERROR(NonFinite);
RIA_DEFINE_ERROR(DimensionError);
RIA_DEFINE_ERROR(RankDeficient);
RIA_DEFINE_ERROR(SolverFailure);
RIA_DEFINE_ERROR(InfeasibleSLNR);
RIA_DEFINE_ERROR(SingularCovariance);
RIA_DEFINE_ERROR(ValidationError);
RIA_DEFINE_ERROR(IoError);

#undef RIA_DEFINE_ERROR

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, std::string key)
        : Error(what), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

} // namespace ria
