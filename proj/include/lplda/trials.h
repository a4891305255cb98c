// lplda/trials.h

// Copyright 2026  The lplda Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LPLDA_TRIALS_H_
#define LPLDA_TRIALS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace lplda {

/// Indices into TrialSet::model_ids / TrialSet::test_ids.
struct Trial {
  uint32_t model = 0;
  uint32_t test = 0;
  bool target = false;
};

/// Enroll-model x test-utterance pairs with their keys. Ids are stored once;
/// trials refer to them by index so full cross products stay compact.
struct TrialSet {
  std::vector<std::string> model_ids;
  std::vector<std::string> test_ids;
  std::vector<Trial> trials;

  size_t NumTargets() const;
  size_t NumNontargets() const { return trials.size() - NumTargets(); }
  /// Throws Error on duplicate ids, out-of-range indices or repeated pairs.
  void Validate() const;
};

}  // namespace lplda

#endif  // LPLDA_TRIALS_H_
