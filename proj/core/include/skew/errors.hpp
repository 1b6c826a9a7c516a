#pragma once

#include <stdexcept>
#include <string>

namespace skew {

/// Base class for all domain errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SKEW_DEFINE_ERROR(NAME)                                                \
    class NAME : public Error {                                                \
    public:                                                                    \
        using Error::Error;                                                    \
    }

// pricing / inversion
SKEW_DEFINE_ERROR(PriceOutOfBand);
SKEW_DEFINE_ERROR(NoConvergence);

// model-domain errors
SKEW_DEFINE_ERROR(SpotNotAtBarrier);
SKEW_DEFINE_ERROR(StrikeAtBarrier);
SKEW_DEFINE_ERROR(StrikeAboveBarrier);
SKEW_DEFINE_ERROR(SeriesBudgetExceeded);

// data / surface errors
SKEW_DEFINE_ERROR(SchemaError);
SKEW_DEFINE_ERROR(EmptySurface);
SKEW_DEFINE_ERROR(CurveDomainError);
SKEW_DEFINE_ERROR(OutOfDomain);

// beliefs
SKEW_DEFINE_ERROR(GridMismatch);
SKEW_DEFINE_ERROR(BarrierOnStrike);
SKEW_DEFINE_ERROR(NotFound);
SKEW_DEFINE_ERROR(Infeasible);

// portfolios
SKEW_DEFINE_ERROR(NoEligibleStrike);

// hedging
SKEW_DEFINE_ERROR(PathGap);

// calibration
SKEW_DEFINE_ERROR(InsufficientQuotes);
SKEW_DEFINE_ERROR(OneSidedSmile);
SKEW_DEFINE_ERROR(EmptySeries);

// cli
SKEW_DEFINE_ERROR(UnknownFigure);
SKEW_DEFINE_ERROR(IoError);

#undef SKEW_DEFINE_ERROR

} // namespace skew
