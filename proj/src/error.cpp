/*
 * Copyright 2026 The NETL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "netl/error.hpp"

namespace netl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCorpus: return "empty corpus";
    case ErrorCode::kEmptyVocabulary: return "empty vocabulary";
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kDegenerateVector: return "degenerate vector";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kDuplicateToken: return "duplicate token";
    case ErrorCode::kMalformedRecord: return "malformed record";
    case ErrorCode::kUnknownTitle: return "unknown title";
    case ErrorCode::kAllTermsMissing: return "all topic terms missing";
    case ErrorCode::kMissingTermProbs: return "missing term probabilities";
    case ErrorCode::kNoTrigrams: return "no trigrams";
    case ErrorCode::kUnknownLabel: return "unknown label";
    case ErrorCode::kEmptyLabel: return "empty label";
    case ErrorCode::kEmptyGraph: return "empty graph";
    case ErrorCode::kDegenerateTrainingSet: return "degenerate training set";
    case ErrorCode::kUnfittedModel: return "unfitted model";
    case ErrorCode::kMissingFeatures: return "missing features";
    case ErrorCode::kMissingGold: return "missing gold rating";
    case ErrorCode::kTooFewTopics: return "too few topics";
    case ErrorCode::kOverlappingDomain: return "overlapping domains";
    case ErrorCode::kMissingInput: return "missing input";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

}  // namespace netl
