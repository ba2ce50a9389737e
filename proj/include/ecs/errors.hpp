#pragma once

#include <stdexcept>
#include <string>

namespace ecs {

// Base for everything this library throws. The CLI maps NearSingularState,
// NonConvergence, and EngineDisagreement to a "numerical failure" exit code,
// every other subclass to a "validation" exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MismatchedModeCount : Error { using Error::Error; };
struct EmptyState          : Error { using Error::Error; };
struct BadModeIndex        : Error { using Error::Error; };
struct SameMode            : Error { using Error::Error; };
struct NearSingularState   : Error { using Error::Error; };
struct NotNormalized       : Error { using Error::Error; };
struct NonConvergence      : Error { using Error::Error; };
struct CutoffTooSmall      : Error { using Error::Error; };
struct CutoffMismatch      : Error { using Error::Error; };
struct ZeroState           : Error { using Error::Error; };
struct AlphaMismatch       : Error { using Error::Error; };
struct ParityMismatch      : Error { using Error::Error; };
struct IoError             : Error { using Error::Error; };
struct EngineDisagreement  : Error { using Error::Error; };

} // namespace ecs
