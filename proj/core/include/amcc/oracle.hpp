// Copyright 2026 The AMCC Authors. All Rights Reserved.
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

// Source of fresh annotations for the active-learning loop.

#ifndef AMCC_ORACLE_HPP_
#define AMCC_ORACLE_HPP_

namespace amcc {

class AnnotationOracle {
 public:
  virtual ~AnnotationOracle() = default;

  // Returns +1 or -1 for the (sample, label) query put to `worker`.
  virtual int answer(int sample, int label, int worker) = 0;

  // Whether `answer` can serve this query; selection skips workers that
  // cannot.
  virtual bool can_answer(int /*sample*/, int /*label*/, int /*worker*/) const { return true; }
};

}  // namespace amcc

#endif  // AMCC_ORACLE_HPP_
