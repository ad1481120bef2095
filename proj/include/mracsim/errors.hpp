/******************************************************************************
 * Copyright 2026 The mracsim Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace mracsim {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class NotHurwitz : public Error {
 public:
  explicit NotHurwitz(const std::string& what) : Error(what) {}
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& what) : Error(what) {}
};

class NotSymmetric : public Error {
 public:
  explicit NotSymmetric(const std::string& what) : Error(what) {}
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error(what) {}
};

class NonFiniteDerivative : public Error {
 public:
  explicit NonFiniteDerivative(const std::string& what) : Error(what) {}
};

// The barrier denominator xi'^2 - e'Pe is numerically unusable.
class BarrierBreach : public Error {
 public:
  explicit BarrierBreach(const std::string& what) : Error(what) {}
};

class MissingX0 : public Error {
 public:
  explicit MissingX0(const std::string& what) : Error(what) {}
};

class EmptyTrajectory : public Error {
 public:
  explicit EmptyTrajectory(const std::string& what) : Error(what) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what) : Error(what) {}
};

// C1 fails and the caller did not set the override flag.
class InfeasibleConfig : public Error {
 public:
  explicit InfeasibleConfig(const std::string& what) : Error(what) {}
};

}  // namespace mracsim
