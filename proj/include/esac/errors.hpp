#pragma once

#include <stdexcept>
#include <string>

namespace esac {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ESAC_DEFINE_ERROR(Name)                                                \
    class Name : public Error {                                               \
    public:                                                                    \
        using Error::Error;                                                    \
    }

ESAC_DEFINE_ERROR(NonFiniteError);         // input contains NaN or Inf
ESAC_DEFINE_ERROR(TooShortError);          // fewer than two time points
ESAC_DEFINE_ERROR(BadIntervalError);       // (s,e,v) ordering violated
ESAC_DEFINE_ERROR(NegativeThresholdError); // nu_trunc called with a < 0
ESAC_DEFINE_ERROR(OutOfRangeError);        // sparsity level outside [1,p]
ESAC_DEFINE_ERROR(BadSparsityError);       // sparsity level not on the grid
ESAC_DEFINE_ERROR(BadParamsError);         // invalid tuning parameters
ESAC_DEFINE_ERROR(DegenerateSeriesError);  // MAD noise estimate is zero
ESAC_DEFINE_ERROR(MismatchedNError);       // interval set built for another n
ESAC_DEFINE_ERROR(SpecInvalidError);       // inconsistent simulation spec
ESAC_DEFINE_ERROR(ConfigMismatchError);    // calibration table does not match data/flags
ESAC_DEFINE_ERROR(ParseError);             // malformed CSV/JSON input

#undef ESAC_DEFINE_ERROR

} // namespace esac
