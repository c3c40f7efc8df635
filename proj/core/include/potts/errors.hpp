#pragma once

#include <stdexcept>
#include <string>

namespace potts {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define POTTS_ERROR(name)                          \
    class name : public Error {                    \
    public:                                        \
        using Error::Error;                        \
    }

POTTS_ERROR(InvalidArgument);
POTTS_ERROR(BoundaryPoint);
POTTS_ERROR(SizeLimit);
POTTS_ERROR(SingularInput);
POTTS_ERROR(NoRoot);
POTTS_ERROR(NoValleys);
POTTS_ERROR(OutOfRange);
POTTS_ERROR(NoSolution);
POTTS_ERROR(FoldDetected);
POTTS_ERROR(DegenerateRegime);
POTTS_ERROR(EpsilonTooLarge);
POTTS_ERROR(DegenerateInput);
POTTS_ERROR(NotASaddle);

#undef POTTS_ERROR

}  // namespace potts
