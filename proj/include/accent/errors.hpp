#pragma once

#include <stdexcept>
#include <string>

namespace accent {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// audio_io
struct MalformedHeader : Error { using Error::Error; };
struct UnsupportedEncoding : Error { using Error::Error; };
struct EmptyAudio : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// dsp
struct SignalTooShort : Error { using Error::Error; };

// nn / models
struct ShapeMismatch : Error { using Error::Error; };
struct OddSpatialDims : Error { using Error::Error; };
struct LabelOutOfRange : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyMatrix : Error { using Error::Error; };
struct UndefinedRate : Error { using Error::Error; };
struct NotADistribution : Error { using Error::Error; };

// dataset
struct MissingColumn : Error { using Error::Error; };
struct EmptyManifest : Error { using Error::Error; };
struct MalformedRow : Error { using Error::Error; };
struct TotalDecodeFailure : Error { using Error::Error; };

// analysis
struct OutOfRange : Error { using Error::Error; };
struct EmptySegment : Error { using Error::Error; };
struct ConfigMismatch : Error { using Error::Error; };

}  // namespace accent
